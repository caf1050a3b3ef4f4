// Copyright 2026 The driftlab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef DRIFTLAB_DRIFTLAB_H_
#define DRIFTLAB_DRIFTLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DL_API __declspec(dllexport)
#else
#define DL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dl_status {
  DL_OK = 0,
  DL_ERR_INVALID_ARGUMENT = 1,
  DL_ERR_DIMENSION_MISMATCH = 2,
  DL_ERR_DOMAIN = 3,
  DL_ERR_UNSUPPORTED_FAMILY = 4,
  DL_ERR_UNSUPPORTED_COMBINATION = 5,
  DL_ERR_UNSUPPORTED_DIMENSION = 6,
  DL_ERR_SINGULAR_DENOMINATOR = 7,
  DL_ERR_DEGENERATE_CONFIG = 8,
  DL_ERR_COLLISION_GUARD = 9,
  DL_ERR_NON_FINITE = 10,
  DL_ERR_OUT_OF_REGIME = 11,
  DL_ERR_DEGENERATE_COERCIVITY = 12,
  DL_ERR_SIZE_MISMATCH = 13,
  DL_ERR_VALIDATION = 14,
  DL_ERR_IO = 15,
  DL_ERR_CHECK_FAILED = 16,
  DL_ERR_NULL_POINTER = 17,
  DL_ERR_INTERNAL = 18
} dl_status;

typedef struct dl_kernel dl_kernel;
typedef struct dl_measure dl_measure;
typedef struct dl_config dl_config;
typedef struct dl_field dl_field;
typedef struct dl_trajectory dl_trajectory;

DL_API const char* dl_version(void);
DL_API const char* dl_status_name(dl_status status);
/* Message of the last failed call on this thread; "" if none. */
DL_API const char* dl_last_error(void);
DL_API void dl_string_free(char* s);

/* Kernels. family: "gaussian", "laplace", "smooth_compact". */
DL_API dl_status dl_kernel_create(const char* family, size_t dim, double h, dl_kernel** out);
DL_API void dl_kernel_free(dl_kernel* k);
DL_API dl_status dl_kernel_eval(const dl_kernel* k, const double* u, double* out);
DL_API dl_status dl_kernel_grad(const dl_kernel* k, const double* u, double* out);
DL_API dl_status dl_kernel_peak(const dl_kernel* k, double* out);
DL_API dl_status dl_kernel_moment(const dl_kernel* k, int p, double* out);
DL_API dl_status dl_kernel_sharp_eval(const dl_kernel* k, const double* u, double* out);
DL_API dl_status dl_kernel_sharp_grad(const dl_kernel* k, const double* u, double* out);

/* Particle configurations, row-major n x dim. */
DL_API dl_status dl_config_create(size_t dim, size_t n, const double* coords, dl_config** out);
DL_API void dl_config_free(dl_config* c);
DL_API dl_status dl_config_shape(const dl_config* c, size_t* n, size_t* dim);
DL_API dl_status dl_config_coords(const dl_config* c, double* out);

/* Measures. weights may be NULL for uniform. */
DL_API dl_status dl_measure_empirical(size_t dim, size_t n, const double* points, const double* weights,
                                      dl_measure** out);
DL_API dl_status dl_measure_mixture(size_t dim, size_t k, const double* means, const double* variances,
                                    const double* weights, dl_measure** out);
DL_API dl_status dl_measure_load_csv(const char* path, size_t dim, dl_measure** out);
DL_API void dl_measure_free(dl_measure* m);
DL_API dl_status dl_kde_density(const dl_measure* m, const dl_kernel* k, const double* z, double* out);
DL_API dl_status dl_kde_score(const dl_measure* m, const dl_kernel* k, const double* z, double* out);
DL_API dl_status dl_mean_shift(const dl_measure* m, const dl_kernel* k, const double* z, double* out);
DL_API dl_status dl_scale_factor(const dl_measure* m, const dl_kernel* k, const double* z, double* out);
DL_API dl_status dl_sharp_score(const dl_measure* m, const dl_kernel* k, const double* z, double* out);

/* Fields. kind: "conservative", "displacement", "laplace_loo". */
DL_API dl_status dl_field_create(const char* kind, const dl_measure* target, const dl_kernel* k,
                                 int leave_one_out, dl_field** out);
DL_API void dl_field_free(dl_field* f);
/* Field seen by particle i at z; i matters only for leave-one-out sources. */
DL_API dl_status dl_field_eval(const dl_field* f, const dl_config* c, size_t i, const double* z, double* out);
/* Velocities of all particles, n x dim. */
DL_API dl_status dl_field_velocities(const dl_field* f, const dl_config* c, double* out);
DL_API dl_status dl_field_curl2d(const dl_field* f, const dl_config* c, const double* z, double* out);
DL_API dl_status dl_diagnostics(const dl_field* f, const dl_config* c, double* v_n, double* s_n, double* r_n,
                                double* min_q);

/* Dynamics. scheme: "frozen_euler" or "rk4"; collision_guard <= 0 keeps the default. */
DL_API dl_status dl_integrate(const dl_field* f, const dl_config* c0, double eta, double t_end, const char* scheme,
                              double collision_guard, dl_trajectory** out);
DL_API void dl_trajectory_free(dl_trajectory* t);
DL_API dl_status dl_trajectory_length(const dl_trajectory* t, size_t* out);
DL_API dl_status dl_trajectory_time(const dl_trajectory* t, size_t k, double* out);
DL_API dl_status dl_trajectory_state(const dl_trajectory* t, size_t k, dl_config** out);
DL_API dl_status dl_trajectory_write_csv(const dl_trajectory* t, const char* path);

DL_API dl_status dl_optimal_bandwidth(double a, double c, double beta, int d, double n, double* h);
DL_API dl_status dl_chernoff_bound(double p0, long long n, double h, int d, double* out);

/* Subcommands. JSON outputs are allocated and must be released with
 * dl_string_free; they are set whenever a report could be produced. */
DL_API dl_status dl_cmd_simulate(const char* config_path, const char* out_dir, int has_seed, uint64_t seed,
                                 char** meta_json);
DL_API dl_status dl_cmd_figure1(const char* out_dir, int has_seed, uint64_t seed, char** summary_json);
/* DL_ERR_CHECK_FAILED when any check fails; the report is still returned. */
DL_API dl_status dl_cmd_verify(const char* suite, uint64_t seed, char** report_json);
DL_API dl_status dl_cmd_sweep(const char* config_path, const char* param, const char* values_csv,
                              const char* out_dir, int has_seed, uint64_t seed, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif  // DRIFTLAB_DRIFTLAB_H_
