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


#include "driftlab/driftlab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/experiment.hpp"
#include "core/verify.hpp"

struct dl_kernel {
  driftlab::KernelSpec spec;
};
struct dl_measure {
  std::shared_ptr<const driftlab::Measure> measure;
};
struct dl_config {
  driftlab::ParticleConfig config;
};
struct dl_field {
  driftlab::FieldSpec spec;
};
struct dl_trajectory {
  driftlab::Trajectory traj;
};

namespace {

using driftlab::ErrorCode;

thread_local std::string g_last_error;

dl_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return DL_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimensionMismatch: return DL_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kDomain: return DL_ERR_DOMAIN;
    case ErrorCode::kUnsupportedFamily: return DL_ERR_UNSUPPORTED_FAMILY;
    case ErrorCode::kUnsupportedCombination: return DL_ERR_UNSUPPORTED_COMBINATION;
    case ErrorCode::kUnsupportedDimension: return DL_ERR_UNSUPPORTED_DIMENSION;
    case ErrorCode::kSingularDenominator: return DL_ERR_SINGULAR_DENOMINATOR;
    case ErrorCode::kDegenerateConfig: return DL_ERR_DEGENERATE_CONFIG;
    case ErrorCode::kCollisionGuard: return DL_ERR_COLLISION_GUARD;
    case ErrorCode::kNonFinite: return DL_ERR_NON_FINITE;
    case ErrorCode::kOutOfRegime: return DL_ERR_OUT_OF_REGIME;
    case ErrorCode::kDegenerateCoercivity: return DL_ERR_DEGENERATE_COERCIVITY;
    case ErrorCode::kSizeMismatch: return DL_ERR_SIZE_MISMATCH;
    case ErrorCode::kValidation: return DL_ERR_VALIDATION;
    case ErrorCode::kIo: return DL_ERR_IO;
  }
  return DL_ERR_INTERNAL;
}

template <typename F>
dl_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return DL_OK;
  } catch (const driftlab::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DL_ERR_INTERNAL;
  }
}


// Null checks are reported with their own status rather than kInvalidArgument.
#define DL_REQUIRE(p)                                 \
  do {                                                \
    if ((p) == nullptr) {                             \
      g_last_error = std::string(#p) + " is null";    \
      return DL_ERR_NULL_POINTER;                     \
    }                                                 \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

driftlab::ConstVec view(const double* p, std::size_t d) { return {p, d}; }

void copy_out(const driftlab::Vector& v, double* out) { std::memcpy(out, v.data(), v.size() * sizeof(double)); }

void set_json(char** out, const driftlab::Json& j) {
  if (out != nullptr) *out = dup_string(j.dump(2) + "\n");
}

std::optional<std::uint64_t> seed_override(int has_seed, std::uint64_t seed) {
  if (has_seed != 0) return seed;
  return std::nullopt;
}

driftlab::ExperimentConfig load_config(const char* path, std::optional<std::uint64_t> seed) {
  driftlab::ExperimentConfig cfg = driftlab::ExperimentConfig::load(path);
  if (seed) {
    driftlab::Json doc = cfg.source;
    doc["seed"] = *seed;
    cfg = driftlab::ExperimentConfig::from_json(doc, cfg.base_dir);
  }
  return cfg;
}

}  // namespace

extern "C" {

const char* dl_version(void) { return "0.1.0"; }

const char* dl_status_name(dl_status status) {
  switch (status) {
    case DL_OK: return "ok";
    case DL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DL_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case DL_ERR_DOMAIN: return "domain";
    case DL_ERR_UNSUPPORTED_FAMILY: return "unsupported_family";
    case DL_ERR_UNSUPPORTED_COMBINATION: return "unsupported_combination";
    case DL_ERR_UNSUPPORTED_DIMENSION: return "unsupported_dimension";
    case DL_ERR_SINGULAR_DENOMINATOR: return "singular_denominator";
    case DL_ERR_DEGENERATE_CONFIG: return "degenerate_config";
    case DL_ERR_COLLISION_GUARD: return "collision_guard";
    case DL_ERR_NON_FINITE: return "non_finite";
    case DL_ERR_OUT_OF_REGIME: return "out_of_regime";
    case DL_ERR_DEGENERATE_COERCIVITY: return "degenerate_coercivity";
    case DL_ERR_SIZE_MISMATCH: return "size_mismatch";
    case DL_ERR_VALIDATION: return "validation";
    case DL_ERR_IO: return "io";
    case DL_ERR_CHECK_FAILED: return "check_failed";
    case DL_ERR_NULL_POINTER: return "null_pointer";
    case DL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dl_last_error(void) { return g_last_error.c_str(); }

void dl_string_free(char* s) { std::free(s); }

dl_status dl_kernel_create(const char* family, size_t dim, double h, dl_kernel** out) {
  DL_REQUIRE(family);
  DL_REQUIRE(out);
  return guarded([&] {
    *out = new dl_kernel{driftlab::KernelSpec(driftlab::kernel_family_from_string(family), dim, h)};
  });
}

void dl_kernel_free(dl_kernel* k) { delete k; }

dl_status dl_kernel_eval(const dl_kernel* k, const double* u, double* out) {
  DL_REQUIRE(k);
  DL_REQUIRE(u);
  DL_REQUIRE(out);
  return guarded([&] { *out = k->spec.eval(view(u, k->spec.dim())); });
}

dl_status dl_kernel_grad(const dl_kernel* k, const double* u, double* out) {
  DL_REQUIRE(k);
  DL_REQUIRE(u);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(k->spec.grad(view(u, k->spec.dim())), out); });
}

dl_status dl_kernel_peak(const dl_kernel* k, double* out) {
  DL_REQUIRE(k);
  DL_REQUIRE(out);
  return guarded([&] { *out = k->spec.peak(); });
}

dl_status dl_kernel_moment(const dl_kernel* k, int p, double* out) {
  DL_REQUIRE(k);
  DL_REQUIRE(out);
  return guarded([&] { *out = k->spec.moment(p); });
}

dl_status dl_kernel_sharp_eval(const dl_kernel* k, const double* u, double* out) {
  DL_REQUIRE(k);
  DL_REQUIRE(u);
  DL_REQUIRE(out);
  return guarded([&] { *out = k->spec.sharp_eval(view(u, k->spec.dim())); });
}

dl_status dl_kernel_sharp_grad(const dl_kernel* k, const double* u, double* out) {
  DL_REQUIRE(k);
  DL_REQUIRE(u);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(k->spec.sharp_grad(view(u, k->spec.dim())), out); });
}

dl_status dl_config_create(size_t dim, size_t n, const double* coords, dl_config** out) {
  DL_REQUIRE(coords);
  DL_REQUIRE(out);
  return guarded([&] {
    *out = new dl_config{driftlab::ParticleConfig(dim, std::vector<double>(coords, coords + n * dim))};
  });
}

void dl_config_free(dl_config* c) { delete c; }

dl_status dl_config_shape(const dl_config* c, size_t* n, size_t* dim) {
  DL_REQUIRE(c);
  if (n != nullptr) *n = c->config.size();
  if (dim != nullptr) *dim = c->config.dim();
  return DL_OK;
}

dl_status dl_config_coords(const dl_config* c, double* out) {
  DL_REQUIRE(c);
  DL_REQUIRE(out);
  const auto& v = c->config.coords();
  std::memcpy(out, v.data(), v.size() * sizeof(double));
  return DL_OK;
}

dl_status dl_measure_empirical(size_t dim, size_t n, const double* points, const double* weights,
                               dl_measure** out) {
  DL_REQUIRE(points);
  DL_REQUIRE(out);
  return guarded([&] {
    driftlab::ParticleConfig pts(dim, std::vector<double>(points, points + n * dim));
    driftlab::Vector w;
    if (weights != nullptr) w.assign(weights, weights + n);
    *out = new dl_measure{
        std::make_shared<driftlab::Measure>(driftlab::Measure::empirical(std::move(pts), std::move(w)))};
  });
}

dl_status dl_measure_mixture(size_t dim, size_t k, const double* means, const double* variances,
                             const double* weights, dl_measure** out) {
  DL_REQUIRE(means);
  DL_REQUIRE(variances);
  DL_REQUIRE(out);
  return guarded([&] {
    driftlab::ParticleConfig mu(dim, std::vector<double>(means, means + k * dim));
    driftlab::Vector var(variances, variances + k);
    driftlab::Vector w;
    if (weights != nullptr) w.assign(weights, weights + k);
    *out = new dl_measure{std::make_shared<driftlab::Measure>(
        driftlab::Measure::mixture(std::move(mu), std::move(var), std::move(w)))};
  });
}

dl_status dl_measure_load_csv(const char* path, size_t dim, dl_measure** out) {
  DL_REQUIRE(path);
  DL_REQUIRE(out);
  return guarded([&] {
    *out = new dl_measure{std::make_shared<driftlab::Measure>(driftlab::read_measure_csv(path, dim))};
  });
}

void dl_measure_free(dl_measure* m) { delete m; }

dl_status dl_kde_density(const dl_measure* m, const dl_kernel* k, const double* z, double* out) {
  DL_REQUIRE(m);
  DL_REQUIRE(k);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] { *out = driftlab::kde_density(*m->measure, k->spec, view(z, k->spec.dim())); });
}

dl_status dl_kde_score(const dl_measure* m, const dl_kernel* k, const double* z, double* out) {
  DL_REQUIRE(m);
  DL_REQUIRE(k);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(driftlab::kde_score(*m->measure, k->spec, view(z, k->spec.dim())), out); });
}

dl_status dl_mean_shift(const dl_measure* m, const dl_kernel* k, const double* z, double* out) {
  DL_REQUIRE(m);
  DL_REQUIRE(k);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(driftlab::mean_shift(*m->measure, k->spec, view(z, k->spec.dim())), out); });
}

dl_status dl_scale_factor(const dl_measure* m, const dl_kernel* k, const double* z, double* out) {
  DL_REQUIRE(m);
  DL_REQUIRE(k);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] { *out = driftlab::scale_factor(*m->measure, k->spec, view(z, k->spec.dim())); });
}

dl_status dl_sharp_score(const dl_measure* m, const dl_kernel* k, const double* z, double* out) {
  DL_REQUIRE(m);
  DL_REQUIRE(k);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(driftlab::sharp_score(*m->measure, k->spec, view(z, k->spec.dim())), out); });
}

dl_status dl_field_create(const char* kind, const dl_measure* target, const dl_kernel* k, int leave_one_out,
                          dl_field** out) {
  DL_REQUIRE(kind);
  DL_REQUIRE(target);
  DL_REQUIRE(k);
  DL_REQUIRE(out);
  return guarded([&] {
    const auto source = leave_one_out != 0 ? driftlab::ModelSource::kLeaveOneOut : driftlab::ModelSource::kFullConfig;
    *out = new dl_field{driftlab::FieldSpec(driftlab::field_kind_from_string(kind), target->measure, k->spec, source)};
  });
}

void dl_field_free(dl_field* f) { delete f; }

dl_status dl_field_eval(const dl_field* f, const dl_config* c, size_t i, const double* z, double* out) {
  DL_REQUIRE(f);
  DL_REQUIRE(c);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(driftlab::particle_field(f->spec, c->config, i, view(z, f->spec.dim())), out); });
}

dl_status dl_field_velocities(const dl_field* f, const dl_config* c, double* out) {
  DL_REQUIRE(f);
  DL_REQUIRE(c);
  DL_REQUIRE(out);
  return guarded([&] { copy_out(driftlab::velocities(f->spec, c->config), out); });
}

dl_status dl_field_curl2d(const dl_field* f, const dl_config* c, const double* z, double* out) {
  DL_REQUIRE(f);
  DL_REQUIRE(c);
  DL_REQUIRE(z);
  DL_REQUIRE(out);
  return guarded([&] {
    const driftlab::VectorField field = [&](driftlab::ConstVec p) {
      return driftlab::spatial_field(f->spec, c->config, p);
    };
    *out = driftlab::curl2d(field, view(z, f->spec.dim()));
  });
}

dl_status dl_diagnostics(const dl_field* f, const dl_config* c, double* v_n, double* s_n, double* r_n,
                         double* min_q) {
  DL_REQUIRE(f);
  DL_REQUIRE(c);
  return guarded([&] {
    if (v_n != nullptr) *v_n = driftlab::v_n(c->config, f->spec);
    if (s_n != nullptr) *s_n = driftlab::s_n(c->config, f->spec);
    if (r_n != nullptr || min_q != nullptr) {
      const driftlab::ReciprocalKde rk = driftlab::r_n(c->config, f->spec.kernel());
      if (r_n != nullptr) *r_n = rk.r_n;
      if (min_q != nullptr) *min_q = rk.min_q;
    }
  });
}

dl_status dl_integrate(const dl_field* f, const dl_config* c0, double eta, double t_end, const char* scheme,
                       double collision_guard, dl_trajectory** out) {
  DL_REQUIRE(f);
  DL_REQUIRE(c0);
  DL_REQUIRE(out);
  return guarded([&] {
    driftlab::IntegratorParams p;
    p.eta = eta;
    p.t_end = t_end;
    if (scheme != nullptr) p.scheme = driftlab::scheme_from_string(scheme);
    if (collision_guard > 0.0) p.collision_guard = collision_guard;
    *out = new dl_trajectory{driftlab::integrate(c0->config, f->spec, p)};
  });
}

void dl_trajectory_free(dl_trajectory* t) { delete t; }

dl_status dl_trajectory_length(const dl_trajectory* t, size_t* out) {
  DL_REQUIRE(t);
  DL_REQUIRE(out);
  *out = t->traj.size();
  return DL_OK;
}

dl_status dl_trajectory_time(const dl_trajectory* t, size_t k, double* out) {
  DL_REQUIRE(t);
  DL_REQUIRE(out);
  return guarded([&] {
    if (k >= t->traj.size()) throw driftlab::Error(ErrorCode::kInvalidArgument, "trajectory index out of range");
    *out = t->traj.times[k];
  });
}

dl_status dl_trajectory_state(const dl_trajectory* t, size_t k, dl_config** out) {
  DL_REQUIRE(t);
  DL_REQUIRE(out);
  return guarded([&] {
    if (k >= t->traj.size()) throw driftlab::Error(ErrorCode::kInvalidArgument, "trajectory index out of range");
    *out = new dl_config{t->traj.states[k]};
  });
}

dl_status dl_trajectory_write_csv(const dl_trajectory* t, const char* path) {
  DL_REQUIRE(t);
  DL_REQUIRE(path);
  return guarded([&] { driftlab::write_trajectory_csv(path, t->traj); });
}

dl_status dl_optimal_bandwidth(double a, double c, double beta, int d, double n, double* h) {
  DL_REQUIRE(h);
  return guarded([&] { *h = driftlab::optimal_bandwidth(a, c, beta, d, n).h; });
}

dl_status dl_chernoff_bound(double p0, long long n, double h, int d, double* out) {
  DL_REQUIRE(out);
  return guarded([&] { *out = driftlab::chernoff_occupancy_bound(p0, n, h, d); });
}

dl_status dl_cmd_simulate(const char* config_path, const char* out_dir, int has_seed, uint64_t seed,
                          char** meta_json) {
  DL_REQUIRE(config_path);
  DL_REQUIRE(out_dir);
  if (meta_json != nullptr) *meta_json = nullptr;
  return guarded([&] {
    const auto cfg = load_config(config_path, seed_override(has_seed, seed));
    set_json(meta_json, driftlab::simulate_to_dir(cfg, out_dir).meta);
  });
}

dl_status dl_cmd_figure1(const char* out_dir, int has_seed, uint64_t seed, char** summary_json) {
  DL_REQUIRE(out_dir);
  if (summary_json != nullptr) *summary_json = nullptr;
  return guarded([&] {
    driftlab::Figure1Options opt;
    if (has_seed != 0) opt.seed = seed;
    set_json(summary_json, driftlab::run_figure1(out_dir, opt).meta);
  });
}

dl_status dl_cmd_verify(const char* suite, uint64_t seed, char** report_json) {
  DL_REQUIRE(suite);
  if (report_json != nullptr) *report_json = nullptr;
  bool pass = false;
  const dl_status st = guarded([&] {
    const driftlab::SuiteReport rep = driftlab::run_suite(suite, seed);
    pass = rep.pass;
    set_json(report_json, rep.to_json());
  });
  if (st != DL_OK) return st;
  if (!pass) {
    g_last_error = std::string("suite '") + suite + "' has failing checks";
    return DL_ERR_CHECK_FAILED;
  }
  return DL_OK;
}

dl_status dl_cmd_sweep(const char* config_path, const char* param, const char* values_csv, const char* out_dir,
                       int has_seed, uint64_t seed, char** summary_json) {
  DL_REQUIRE(config_path);
  DL_REQUIRE(param);
  DL_REQUIRE(values_csv);
  DL_REQUIRE(out_dir);
  if (summary_json != nullptr) *summary_json = nullptr;
  bool all_ok = true;
  const dl_status st = guarded([&] {
    const auto cfg = load_config(config_path, seed_override(has_seed, seed));
    const driftlab::SweepResult r = driftlab::run_sweep(cfg, param, driftlab::parse_value_list(values_csv), out_dir);
    for (const auto& p : r.points) all_ok = all_ok && p.ok;
    set_json(summary_json, r.summary);
  });
  if (st != DL_OK) return st;
  if (!all_ok) {
    g_last_error = "one or more sweep points failed";
    return DL_ERR_CHECK_FAILED;
  }
  return DL_OK;
}

}  // extern "C"
