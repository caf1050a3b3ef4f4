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

#ifndef DRIFTLAB_CORE_DIAGNOSTICS_HPP_
#define DRIFTLAB_CORE_DIAGNOSTICS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "core/fields.hpp"
#include "core/numerics.hpp"
#include "core/record.hpp"

namespace driftlab {

// V_N = (1/N) sum |v_i|^2 with v_i the velocity of particle i.
double v_n(const ParticleConfig& config, const FieldSpec& spec);

// S_N = (1/N) sum A f_i(x_i), with f_i the field driving particle i and the
// Stein operator bound to reference_score(spec).
double s_n(const ParticleConfig& config, const FieldSpec& spec, std::optional<double> fd_step = {});

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // refinement error (grid) or standard error (MC)
  bool coarse = false;  // error above 10% of |value|
};

// I_N = \int |f_x(z)|^2 q_x(z) dz with f_x the frozen spatial field.
IntegralEstimate i_n(const ParticleConfig& config, const FieldSpec& spec, const GridSpec& grid);
IntegralEstimate i_n_mc(const ParticleConfig& config, const FieldSpec& spec, std::size_t samples,
                        std::uint64_t seed);

// Both sides of \int A_rho b_x q_x = I_N on one grid.
struct SteinIdentityCheck {
  QuadratureResult stein;
  QuadratureResult fisher;
};

SteinIdentityCheck kde_stein_identity(const ParticleConfig& config, const FieldSpec& spec,
                                      const GridSpec& grid, std::optional<double> fd_step = {});

struct ReciprocalKde {
  double r_n = 0.0;
  double min_q = 0.0;
  double self_bound = 0.0;  // N h^d / K(0)
};

ReciprocalKde r_n(const ParticleConfig& config, const KernelSpec& k);

// Sharp-smoothed population functionals of the full-configuration Laplace
// displacement field, integrated against rho^#_x = R_x / Z_#.
struct LaplacePopulation {
  QuadratureResult j;        // \int A_# u_x rho^#
  QuadratureResult vcal;     // \int |u_x|^2 rho^#
  QuadratureResult delta_sq; // \int |e_x|^2 rho^#
  QuadratureResult j_sharp;  // \int b^# . u_x rho^#
  QuadratureResult mass;     // \int rho^#
  double lambda = 0.0;       // min of a_x over the grid
  double big_l = 0.0;        // max of a_x over the grid
};

LaplacePopulation laplace_population_pair(const ParticleConfig& config, const FieldSpec& spec,
                                          const GridSpec& grid,
                                          std::optional<double> fd_step = {});

struct CoercivityConstants {
  double gamma = 0.0;
  double beta = 0.0;
};

CoercivityConstants coercivity_constants(double lambda_h, double big_l_h);

std::vector<int> occupancy_counts(const ParticleConfig& config, double h, double r_k);

struct OccupancyReport {
  bool holds = false;  // occupancy premise satisfied by every particle
  double min_q = 0.0;
  double bound = 0.0;  // certified lower bound on min_q when holds
  double r_n = 0.0;
  double r_bound = 0.0;
  int min_count = 0;
  // A certificate is false when holds but min_q < bound.
  bool false_certificate() const { return holds && min_q < bound; }
};

// M_i >= alpha N h^d for all i implies q_x(x_i) >= kappa_K alpha and
// R_N <= 1 / (kappa_K alpha).
OccupancyReport occupancy_implication_check(const ParticleConfig& config, const KernelSpec& k,
                                            double r_k, double kappa_k, double alpha);

// n_i^(-) >= alpha (N - 1) h^d for all i implies the leave-one-out Laplace
// denominator Q_{x,-i}(x_i) >= c_d e^{-r_0} alpha.
OccupancyReport loo_occupancy_check(const ParticleConfig& config, const KernelSpec& k, double r0,
                                    double alpha);

double chernoff_occupancy_bound(double p0, long long n, double h, int d);

// kappa0 stands for H_N(0) / N. Laplace-only inputs: gamma_h through eps_v.
struct RateInputs {
  double kappa0 = 0.0;
  int d = 1;
  double a1 = 0.0;
  double lambda = 0.0;
  double b_a = 0.0;
  double b_v = 0.0;
  double m2_base = 0.0;
  double n = 1.0;
  double t = 1.0;
  double h = 1.0;
  double beta = 0.0;
  double a_const = 1.0;
  double c_const = 1.0;
  double gamma_h = 0.0;
  double beta_h = 0.0;
  double delta_sq = 0.0;
  double eps_s = 0.0;
  double eps_v = 0.0;
};

struct ConservativeRate {
  double entropy_term = 0.0;
  double self_term = 0.0;
  double quad_term = 0.0;
  double total = 0.0;
};

struct LaplaceRate {
  double entropy_term = 0.0;
  double delta_term = 0.0;
  double eps_s_term = 0.0;
  double eps_v_term = 0.0;
  double total = 0.0;
};

ConservativeRate rate_rhs_conservative(const RateInputs& in);
LaplaceRate rate_rhs_laplace(const RateInputs& in);

struct OptimalBandwidth {
  double h = 0.0;
  double self_term = 0.0;  // A / (N h^{d+2})
  double quad_term = 0.0;  // C h^{2 - beta}
};

OptimalBandwidth optimal_bandwidth(double a, double c, double beta, int d, double n);

struct W2Check {
  double coupling_bound = 0.0;
  double exact_w2 = 0.0;
  bool holds = true;
};

W2Check one_step_w2_check(const ParticleConfig& config, const FieldSpec& spec, double eta);

struct LooErrors {
  double ell_s = 0.0;
  double ell_v = 0.0;
};

LooErrors loo_errors(const ParticleConfig& config, const FieldSpec& spec,
                     std::optional<double> fd_step = {});

// KL(mu0 || rho_{nu,h}) by grid quadrature, for a mixture mu0.
QuadratureResult kl_to_target(const Measure& mu0, const FieldSpec& spec, const GridSpec& grid);

// Empirical sup of the FD-Hessian operator norm of A_rho f_x and |f_x|^2
// over the grid.
struct HessianBounds {
  double b_a = 0.0;
  double b_v = 0.0;
};

HessianBounds quadrature_constants(const ParticleConfig& config, const FieldSpec& spec,
                                   const GridSpec& grid);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_DIAGNOSTICS_HPP_
