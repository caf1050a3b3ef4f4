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

#include "core/diagnostics.hpp"

#include "core/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace driftlab {
namespace {

double mean_over_particles(const ParticleConfig& config,
                           const std::function<double(std::size_t)>& term) {
  const std::size_t n = config.size();
  if (n == 0) fail(ErrorCode::kDegenerateConfig, "empty configuration");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += term(i);
  return total / static_cast<double>(n);
}

double particle_stein(const ParticleConfig& config, const FieldSpec& spec, std::size_t i,
                      std::optional<double> fd_step) {
  const VectorField f = [&](ConstVec z) { return particle_field(spec, config, i, z); };
  const VectorField score = [&](ConstVec z) { return reference_score(spec, z); };
  return stein_divergence(f, score, config.point(i), fd_step);
}

double particle_stein_full(const ParticleConfig& config, const FieldSpec& spec, ConstVec z,
                           std::optional<double> fd_step) {
  const VectorField f = [&](ConstVec p) { return spatial_field(spec, config, p); };
  const VectorField score = [&](ConstVec p) { return reference_score(spec, p); };
  return stein_divergence(f, score, z, fd_step);
}

void require_laplace(const FieldSpec& spec, const char* what) {
  if (spec.kernel().family() != KernelFamily::kLaplace) {
    fail(ErrorCode::kUnsupportedFamily, std::string(what) + " requires the Laplace kernel");
  }
}

}  // namespace

double v_n(const ParticleConfig& config, const FieldSpec& spec) {
  return mean_over_particles(
      config, [&](std::size_t i) { return squared_norm(particle_velocity(spec, config, i)); });
}

double s_n(const ParticleConfig& config, const FieldSpec& spec, std::optional<double> fd_step) {
  return mean_over_particles(config, [&](std::size_t i) {
    try {
      return particle_stein(config, spec, i, fd_step);
    } catch (const Error& e) {
      fail(e.code(), std::string(e.what()) + " (particle " + std::to_string(i) + ")");
    }
  });
}

IntegralEstimate i_n(const ParticleConfig& config, const FieldSpec& spec, const GridSpec& grid) {
  const KernelSpec& k = spec.kernel();
  const AtomView model = AtomView::of(config);
  const QuadratureResult r = grid_integrate(
      [&](ConstVec z) {
        const double q = kde_density(model, k, z);
        if (q < kDensityFloor) return 0.0;
        return squared_norm(spatial_field(spec, config, z)) * q;
      },
      grid);
  return {r.value, r.refinement_error, r.refinement_error > 0.1 * std::abs(r.value)};
}

IntegralEstimate i_n_mc(const ParticleConfig& config, const FieldSpec& spec, std::size_t samples,
                        std::uint64_t seed) {
  const KernelSpec& k = spec.kernel();
  const AtomView model = AtomView::of(config);
  const McResult r = mc_integrate(
      [&](ConstVec z) { return squared_norm(spatial_field(spec, config, z)) * kde_density(model, k, z); },
      [&](Rng& rng) {
        const ParticleConfig one = sample_from_kde(model, k, 1, rng);
        return Vector(one.coords());
      },
      [&](ConstVec z) { return kde_density(model, k, z); }, samples, seed);
  return {r.value, r.stderr_value, r.stderr_value > 0.1 * std::abs(r.value)};
}

SteinIdentityCheck kde_stein_identity(const ParticleConfig& config, const FieldSpec& spec,
                                      const GridSpec& grid, std::optional<double> fd_step) {
  const KernelSpec& k = spec.kernel();
  const AtomView model = AtomView::of(config);
  const auto res = grid_integrate_many(
      [&](ConstVec z, MutVec out) {
        const double q = kde_density(model, k, z);
        if (q < kDensityFloor) {
          out[0] = out[1] = 0.0;
          return;
        }
        out[0] = particle_stein_full(config, spec, z, fd_step) * q;
        out[1] = squared_norm(spatial_field(spec, config, z)) * q;
      },
      2, grid);
  return {res[0], res[1]};
}

ReciprocalKde r_n(const ParticleConfig& config, const KernelSpec& k) {
  if (config.empty()) fail(ErrorCode::kDegenerateConfig, "empty configuration");
  if (config.dim() != k.dim()) fail(ErrorCode::kDimensionMismatch, "kernel dimension differs");
  const AtomView model = AtomView::of(config);
  ReciprocalKde out;
  out.min_q = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const double q = kde_density(model, k, config.point(i));
    if (!(q >= kDensityFloor)) {
      fail(ErrorCode::kSingularDenominator,
           "q_x(x_i) below 1e-300 (particle " + std::to_string(i) + ")");
    }
    out.min_q = std::min(out.min_q, q);
    total += 1.0 / q;
  }
  const double n = static_cast<double>(config.size());
  out.r_n = total / n;
  out.self_bound = n / k.peak();
  return out;
}

LaplacePopulation laplace_population_pair(const ParticleConfig& config, const FieldSpec& spec,
                                          const GridSpec& grid, std::optional<double> fd_step) {
  require_laplace(spec, "laplace_population_pair");
  const KernelSpec& k = spec.kernel();
  const AtomView model = AtomView::of(config);
  const double z_sharp = k.sharp_normalizer();
  grid.validate();
  LaplacePopulation out;
  out.lambda = std::numeric_limits<double>::infinity();
  out.big_l = 0.0;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const double a = scale_factor(model, k, grid.node(node));
    out.lambda = std::min(out.lambda, a);
    out.big_l = std::max(out.big_l, a);
  }
  const auto res = grid_integrate_many(
      [&](ConstVec z, MutVec v) {
        const double rho = sharp_density(model, k, z) / z_sharp;
        if (rho < kDensityFloor) {
          std::fill(v.begin(), v.end(), 0.0);
          return;
        }
        const Vector u = displacement_field(spec, config, z);
        const Vector e = scale_residual_field(spec, config, z);
        const Vector b = sharp_mismatch_field(spec, config, z);
        v[0] = particle_stein_full(config, spec, z, fd_step) * rho;
        v[1] = squared_norm(u) * rho;
        v[2] = squared_norm(e) * rho;
        v[3] = dot(b, u) * rho;
        v[4] = rho;
      },
      5, grid);
  out.j = res[0];
  out.vcal = res[1];
  out.delta_sq = res[2];
  out.j_sharp = res[3];
  out.mass = res[4];
  return out;
}

CoercivityConstants coercivity_constants(double lambda_h, double big_l_h) {
  if (!(lambda_h > 0.0) || !(lambda_h <= big_l_h) || !std::isfinite(big_l_h)) {
    fail(ErrorCode::kInvalidArgument, "coercivity constants need 0 < lambda <= L");
  }
  const double l2 = big_l_h * big_l_h;
  return {lambda_h / (4.0 * l2), lambda_h / (2.0 * l2) + 1.0 / (2.0 * lambda_h)};
}

std::vector<int> occupancy_counts(const ParticleConfig& config, double h, double r_k) {
  if (!(r_k > 0.0) || !(h > 0.0)) fail(ErrorCode::kInvalidArgument, "r_K and h must be positive");
  const double radius2 = (r_k * h) * (r_k * h);
  const std::size_t n = config.size();
  std::vector<int> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (squared_distance(config.point(i), config.point(j)) <= radius2) ++counts[i];
    }
  }
  return counts;
}

OccupancyReport occupancy_implication_check(const ParticleConfig& config, const KernelSpec& k,
                                            double r_k, double kappa_k, double alpha) {
  if (!(kappa_k > 0.0) || !(alpha > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "kappa_K and alpha must be positive");
  }
  const double h = k.bandwidth();
  const double d = static_cast<double>(k.dim());
  Vector probe(k.dim(), 0.0);
  probe[0] = r_k * h;
  // Radially decreasing kernels attain their minimum over the ball at the rim.
  if (k.eval(probe) < kappa_k * std::pow(h, -d) * (1.0 - 1e-12)) {
    fail(ErrorCode::kInvalidArgument, "invalid (r_K, kappa_K): kernel falls below kappa_K inside radius");
  }
  const std::vector<int> counts = occupancy_counts(config, h, r_k);
  const double need = alpha * static_cast<double>(config.size()) * std::pow(h, d);
  OccupancyReport out;
  out.min_count = *std::min_element(counts.begin(), counts.end());
  out.holds = std::all_of(counts.begin(), counts.end(), [&](int c) { return c >= need; });
  const ReciprocalKde rk = r_n(config, k);
  out.min_q = rk.min_q;
  out.r_n = rk.r_n;
  out.bound = kappa_k * alpha;
  out.r_bound = 1.0 / (kappa_k * alpha);
  return out;
}

OccupancyReport loo_occupancy_check(const ParticleConfig& config, const KernelSpec& k, double r0,
                                    double alpha) {
  if (k.family() != KernelFamily::kLaplace) {
    fail(ErrorCode::kUnsupportedFamily, "leave-one-out occupancy check requires the Laplace kernel");
  }
  if (config.size() < 2) fail(ErrorCode::kDegenerateConfig, "leave-one-out needs N >= 2");
  if (!(r0 > 0.0) || !(alpha > 0.0)) fail(ErrorCode::kInvalidArgument, "r0 and alpha must be positive");
  const double h = k.bandwidth();
  const std::vector<int> counts = occupancy_counts(config, h, r0);
  const double need = alpha * static_cast<double>(config.size() - 1) *
                      std::pow(h, static_cast<double>(k.dim()));
  OccupancyReport out;
  out.min_count = std::numeric_limits<int>::max();
  out.holds = true;
  out.min_q = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const int without_self = counts[i] - 1;
    out.min_count = std::min(out.min_count, without_self);
    if (without_self < need) out.holds = false;
    const double q = kde_density(AtomView::leave_out(config, i), k, config.point(i));
    out.min_q = std::min(out.min_q, q);
    total += 1.0 / q;
  }
  out.r_n = total / static_cast<double>(config.size());
  out.bound = k.base_normalizer() * std::exp(-r0) * alpha;
  out.r_bound = 1.0 / out.bound;
  return out;
}

double chernoff_occupancy_bound(double p0, long long n, double h, int d) {
  if (!(p0 > 0.0 && p0 <= 1.0)) fail(ErrorCode::kInvalidArgument, "p0 must lie in (0, 1]");
  if (n < 2) fail(ErrorCode::kInvalidArgument, "Chernoff bound needs N >= 2");
  if (!(h > 0.0) || d < 1) fail(ErrorCode::kInvalidArgument, "h and d must be positive");
  const double nd = static_cast<double>(n);
  const double log_bound = std::log(nd) - p0 * nd * std::pow(h, d) / 16.0;
  return log_bound >= 0.0 ? 1.0 : std::exp(log_bound);
}

ConservativeRate rate_rhs_conservative(const RateInputs& in) {
  if (!(in.h > 0.0) || !(in.n > 0.0) || !(in.t > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "h, N and T must be positive");
  }
  if (in.d < 1) fail(ErrorCode::kInvalidArgument, "d must be >= 1");
  ConservativeRate out;
  out.entropy_term = in.kappa0 / in.t;
  out.self_term = in.a1 * in.lambda / (in.n * std::pow(in.h, static_cast<double>(in.d) + 2.0));
  out.quad_term = 0.5 * (in.b_a + in.b_v) * in.m2_base * in.h * in.h;
  out.total = out.entropy_term + out.self_term + out.quad_term;
  return out;
}

LaplaceRate rate_rhs_laplace(const RateInputs& in) {
  if (!(in.gamma_h > 0.0)) fail(ErrorCode::kDegenerateCoercivity, "gamma_h must be positive");
  if (!(in.n > 0.0)) fail(ErrorCode::kInvalidArgument, "N must be positive");
  LaplaceRate out;
  out.entropy_term = in.kappa0 / (in.gamma_h * in.n);
  out.delta_term = in.beta_h / in.gamma_h * in.delta_sq;
  out.eps_s_term = in.eps_s / in.gamma_h;
  out.eps_v_term = in.eps_v;
  out.total = out.entropy_term + out.delta_term + out.eps_s_term + out.eps_v_term;
  return out;
}

OptimalBandwidth optimal_bandwidth(double a, double c, double beta, int d, double n) {
  if (!(a > 0.0) || !(c > 0.0) || d < 1 || !(n > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "A, C, d and N must be positive");
  }
  if (beta < 0.0) fail(ErrorCode::kInvalidArgument, "beta must be nonnegative");
  if (beta >= 2.0) {
    fail(ErrorCode::kOutOfRegime, "quadrature term h^{2-beta} does not vanish for beta >= 2");
  }
  const double dd = static_cast<double>(d);
  OptimalBandwidth out;
  out.h = std::pow((dd + 2.0) * a / ((2.0 - beta) * c * n), 1.0 / (dd + 4.0 - beta));
  out.self_term = a / (n * std::pow(out.h, dd + 2.0));
  out.quad_term = c * std::pow(out.h, 2.0 - beta);
  return out;
}

W2Check one_step_w2_check(const ParticleConfig& config, const FieldSpec& spec, double eta) {
  if (!(eta > 0.0)) fail(ErrorCode::kInvalidArgument, "eta must be positive");
  const ParticleConfig next = step_frozen_euler(config, spec, eta);
  W2Check out;
  out.coupling_bound = eta * std::sqrt(v_n(config, spec));
  out.exact_w2 = exact_w2_empirical(config, next);
  out.holds = out.exact_w2 <= out.coupling_bound + 1e-12;
  return out;
}

LooErrors loo_errors(const ParticleConfig& config, const FieldSpec& spec,
                     std::optional<double> fd_step) {
  require_laplace(spec, "loo_errors");
  if (config.size() < 2) fail(ErrorCode::kDegenerateConfig, "leave-one-out needs N >= 2");
  const VectorField score = [&](ConstVec z) { return reference_score(spec, z); };
  LooErrors out;
  const double n = static_cast<double>(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    const ConstVec xi = config.point(i);
    const VectorField loo = [&](ConstVec z) { return laplace_loo_field(spec, config, i, z); };
    const VectorField full = [&](ConstVec z) { return displacement_field(spec, config, z); };
    out.ell_s += std::abs(stein_divergence(loo, score, xi, fd_step) -
                          stein_divergence(full, score, xi, fd_step)) / n;
    out.ell_v += std::abs(squared_norm(loo(xi)) - squared_norm(full(xi))) / n;
  }
  return out;
}

QuadratureResult kl_to_target(const Measure& mu0, const FieldSpec& spec, const GridSpec& grid) {
  if (mu0.kind() != MeasureKind::kGaussianMixture) {
    fail(ErrorCode::kUnsupportedCombination, "KL initialization constant needs a mixture mu0");
  }
  return grid_integrate(
      [&](ConstVec z) {
        const double p = mu0.mixture_density(z);
        if (p < kDensityFloor) return 0.0;
        const double rho = kde_density(spec.target(), spec.kernel(), z);
        if (rho < kDensityFloor) fail(ErrorCode::kSingularDenominator, "target density vanished");
        return p * std::log(p / rho);
      },
      grid);
}

HessianBounds quadrature_constants(const ParticleConfig& config, const FieldSpec& spec,
                                   const GridSpec& grid) {
  HessianBounds out;
  out.b_a = hessian_sup_estimate(
      [&](ConstVec z) { return particle_stein_full(config, spec, z, std::nullopt); }, grid);
  out.b_v = hessian_sup_estimate(
      [&](ConstVec z) { return squared_norm(spatial_field(spec, config, z)); }, grid);
  return out;
}

}  // namespace driftlab
