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

#include "core/measures.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

namespace driftlab {
namespace {

Vector validated_weights(const Vector& weights, std::size_t n, bool* uniform) {
  if (weights.empty()) {
    *uniform = true;
    return Vector(n, 1.0 / static_cast<double>(n));
  }
  if (weights.size() != n) fail(ErrorCode::kSizeMismatch, "weight count differs from atom count");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::kValidation, "weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) fail(ErrorCode::kValidation, "weights must sum to 1");
  *uniform = std::all_of(weights.begin(), weights.end(),
                         [&](double w) { return w == weights.front(); });
  return weights;
}

std::size_t view_count(const AtomView& v) {
  const std::size_t n = v.atoms->size();
  return v.skip == AtomView::kNoSkip ? n : n - 1;
}

void require_positive(double q, const char* what) {
  if (!(q >= kDensityFloor)) {
    fail(ErrorCode::kSingularDenominator, std::string(what) + ": kernel density below 1e-300");
  }
}

void require_laplace(const KernelSpec& k, const char* what) {
  if (k.family() != KernelFamily::kLaplace) {
    fail(ErrorCode::kUnsupportedFamily, std::string(what) + " requires the Laplace kernel");
  }
}

void require_empirical(const Measure& alpha, const char* what) {
  if (!alpha.is_empirical()) {
    fail(ErrorCode::kUnsupportedCombination, std::string(what) + " requires an empirical measure");
  }
}

// Smoothed mixture: components N(m, (s^2 + h^2) I).
struct MixtureEval {
  double density = 0.0;
  Vector score_num;
};

MixtureEval mixture_eval(const Measure& alpha, double h2, ConstVec z, bool with_score) {
  const std::size_t d = alpha.dim();
  MixtureEval out;
  if (with_score) out.score_num.assign(d, 0.0);
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    const ConstVec m = alpha.atoms().point(c);
    const double var = alpha.variances()[c] + h2;
    const double r2 = squared_distance(z, m);
    const double dens = alpha.weights()[c] *
                        std::pow(2.0 * std::numbers::pi * var, -0.5 * static_cast<double>(d)) *
                        std::exp(-0.5 * r2 / var);
    out.density += dens;
    if (with_score) {
      for (std::size_t k = 0; k < d; ++k) out.score_num[k] += dens * (m[k] - z[k]) / var;
    }
  }
  return out;
}

}  // namespace

const char* to_string(MeasureKind kind) {
  return kind == MeasureKind::kEmpirical ? "empirical" : "gaussian_mixture";
}

Measure::Measure(MeasureKind kind, ParticleConfig atoms, Vector weights, Vector variances)
    : kind_(kind), atoms_(std::move(atoms)), variances_(std::move(variances)) {
  if (atoms_.empty()) fail(ErrorCode::kValidation, "measure needs at least one atom");
  weights_ = validated_weights(weights, atoms_.size(), &uniform_);
}

Measure Measure::empirical(ParticleConfig atoms, Vector weights) {
  return Measure(MeasureKind::kEmpirical, std::move(atoms), std::move(weights), {});
}

Measure Measure::mixture(ParticleConfig means, Vector variances, Vector weights) {
  if (variances.size() != means.size()) {
    fail(ErrorCode::kSizeMismatch, "variance count differs from component count");
  }
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::kValidation, "variances must be positive");
  }
  return Measure(MeasureKind::kGaussianMixture, std::move(means), std::move(weights),
                 std::move(variances));
}

ParticleConfig Measure::sample(std::size_t n, Rng& rng) const {
  const std::size_t d = dim();
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> coords(n * d);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t c = uniform_ ? std::uniform_int_distribution<std::size_t>(0, size() - 1)(rng)
                                   : pick(rng);
    const ConstVec m = atoms_.point(c);
    const double sd = kind_ == MeasureKind::kGaussianMixture ? std::sqrt(variances_[c]) : 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      coords[s * d + k] = m[k] + (sd > 0.0 ? sd * normal(rng) : 0.0);
    }
  }
  return ParticleConfig(d, std::move(coords));
}

double Measure::mixture_density(ConstVec z) const {
  if (kind_ != MeasureKind::kGaussianMixture) {
    fail(ErrorCode::kUnsupportedCombination, "mixture_density on an empirical measure");
  }
  require_dim(z, dim(), "mixture_density");
  return mixture_eval(*this, 0.0, z, false).density;
}

AtomView AtomView::of(const Measure& measure) {
  require_empirical(measure, "atom view");
  return {&measure.atoms(), measure.uniform() ? nullptr : &measure.weights(), kNoSkip};
}

AtomView AtomView::leave_out(const ParticleConfig& config, std::size_t i) {
  if (config.size() < 2) fail(ErrorCode::kDegenerateConfig, "leave-one-out needs N >= 2");
  if (i >= config.size()) fail(ErrorCode::kInvalidArgument, "particle index out of range");
  return {&config, nullptr, i};
}

KdeSums kde_sums(const AtomView& view, const KernelSpec& k, ConstVec z, unsigned terms) {
  const std::size_t d = view.dim();
  require_dim(z, d, "kde evaluation");
  if (k.dim() != d) fail(ErrorCode::kDimensionMismatch, "kernel and measure dimensions differ");
  const bool laplace = k.family() == KernelFamily::kLaplace;
  if ((terms & (kTermSharp | kTermSharpGrad | kTermRadius)) && !laplace) {
    require_laplace(k, "sharp-smoothed quantity");
  }
  KdeSums out;
  if (terms & kTermShift) out.shift_num.assign(d, 0.0);
  if (terms & kTermGrad) out.grad.assign(d, 0.0);
  if (terms & kTermSharpGrad) out.sharp_grad.assign(d, 0.0);

  const std::size_t n = view.atoms->size();
  double uniform_w = 1.0 / static_cast<double>(view_count(view));
  double renorm = 1.0;
  if (view.weights != nullptr && view.skip != AtomView::kNoSkip) {
    renorm = 1.0 / (1.0 - (*view.weights)[view.skip]);
  }
  const double h = k.bandwidth();
  const double* base = view.atoms->coords().data();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == view.skip) continue;
    const double w = view.weights == nullptr ? uniform_w : (*view.weights)[j] * renorm;
    const double* y = base + j * d;
    double r2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double t = z[c] - y[c];
      r2 += t * t;
    }
    const double kv = k.eval_sq(r2);
    if (kv == 0.0 && !(terms & kTermGrad)) continue;
    const double wk = w * kv;
    if (terms & kTermDensity) out.density += wk;
    if (terms & (kTermSharp | kTermRadius)) {
      const double r = std::sqrt(r2);
      if (terms & kTermRadius) out.radius_num += wk * r;
      if (terms & kTermSharp) out.sharp += w * h * (r + h) * kv;
    }
    if (terms & kTermShift) {
      for (std::size_t c = 0; c < d; ++c) out.shift_num[c] += wk * (y[c] - z[c]);
    }
    if (terms & kTermGrad) {
      if (laplace && r2 == 0.0) {
        fail(ErrorCode::kDomain, "kernel not differentiable at origin: evaluation point is an atom");
      }
      const double g = w * k.grad_factor_sq(r2);
      for (std::size_t c = 0; c < d; ++c) out.grad[c] += g * (z[c] - y[c]);
    }
    if (terms & kTermSharpGrad) {
      // grad L_h(u) = -u K_h(u) with u = z - y.
      for (std::size_t c = 0; c < d; ++c) out.sharp_grad[c] -= wk * (z[c] - y[c]);
    }
  }
  return out;
}

double kde_density(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  return kde_sums(alpha, k, z, kTermDensity).density;
}

Vector kde_score(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  KdeSums s = kde_sums(alpha, k, z, kTermDensity | kTermGrad);
  require_positive(s.density, "kde_score");
  for (double& g : s.grad) g /= s.density;
  return s.grad;
}

Vector mean_shift(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  KdeSums s = kde_sums(alpha, k, z, kTermDensity | kTermShift);
  require_positive(s.density, "mean_shift");
  for (double& g : s.shift_num) g /= s.density;
  return s.shift_num;
}

double mean_radius(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  require_laplace(k, "mean_radius");
  const KdeSums s = kde_sums(alpha, k, z, kTermDensity | kTermRadius);
  require_positive(s.density, "mean_radius");
  return s.radius_num / s.density;
}

double sharp_density(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  require_laplace(k, "sharp_density");
  return kde_sums(alpha, k, z, kTermSharp).sharp;
}

Vector sharp_score(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  require_laplace(k, "sharp_score");
  KdeSums s = kde_sums(alpha, k, z, kTermSharp | kTermSharpGrad);
  require_positive(s.sharp, "sharp_score");
  for (double& g : s.sharp_grad) g /= s.sharp;
  return s.sharp_grad;
}

double scale_factor(const AtomView& alpha, const KernelSpec& k, ConstVec z) {
  require_laplace(k, "scale_factor");
  const KdeSums s = kde_sums(alpha, k, z, kTermDensity | kTermSharp);
  require_positive(s.density, "scale_factor");
  return s.sharp / s.density;
}

void require_compatible(const Measure& alpha, const KernelSpec& k) {
  if (alpha.dim() != k.dim()) {
    fail(ErrorCode::kDimensionMismatch, "kernel and measure dimensions differ");
  }
  if (!alpha.is_empirical() && k.family() != KernelFamily::kGaussian) {
    fail(ErrorCode::kUnsupportedCombination,
         "Gaussian-mixture measures are smoothed in closed form only under the Gaussian kernel");
  }
}

double kde_density(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_compatible(alpha, k);
  if (alpha.is_empirical()) return kde_density(AtomView::of(alpha), k, z);
  require_dim(z, alpha.dim(), "kde_density");
  const double h = k.bandwidth();
  return mixture_eval(alpha, h * h, z, false).density;
}

Vector kde_score(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_compatible(alpha, k);
  if (alpha.is_empirical()) return kde_score(AtomView::of(alpha), k, z);
  require_dim(z, alpha.dim(), "kde_score");
  const double h = k.bandwidth();
  MixtureEval e = mixture_eval(alpha, h * h, z, true);
  require_positive(e.density, "kde_score");
  for (double& g : e.score_num) g /= e.density;
  return e.score_num;
}

Vector mean_shift(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_compatible(alpha, k);
  if (alpha.is_empirical()) return mean_shift(AtomView::of(alpha), k, z);
  // Gaussian smoothing of any measure satisfies M = h^2 s.
  const double h = k.bandwidth();
  return scaled(kde_score(alpha, k, z), h * h);
}

double mean_radius(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_empirical(alpha, "mean_radius");
  return mean_radius(AtomView::of(alpha), k, z);
}

double sharp_density(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_empirical(alpha, "sharp_density");
  return sharp_density(AtomView::of(alpha), k, z);
}

Vector sharp_score(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_empirical(alpha, "sharp_score");
  return sharp_score(AtomView::of(alpha), k, z);
}

double scale_factor(const Measure& alpha, const KernelSpec& k, ConstVec z) {
  require_empirical(alpha, "scale_factor");
  return scale_factor(AtomView::of(alpha), k, z);
}

Measure loo_measure(const ParticleConfig& config, std::size_t i) {
  if (config.size() < 2) fail(ErrorCode::kDegenerateConfig, "leave-one-out needs N >= 2");
  if (i >= config.size()) fail(ErrorCode::kInvalidArgument, "particle index out of range");
  const std::size_t d = config.dim();
  std::vector<double> coords;
  coords.reserve((config.size() - 1) * d);
  for (std::size_t j = 0; j < config.size(); ++j) {
    if (j == i) continue;
    const ConstVec p = config.point(j);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return Measure::empirical(ParticleConfig(d, std::move(coords)));
}

ParticleConfig sample_from_kde(const AtomView& alpha, const KernelSpec& k, std::size_t count,
                               Rng& rng) {
  const std::size_t d = alpha.dim();
  if (k.dim() != d) fail(ErrorCode::kDimensionMismatch, "kernel and measure dimensions differ");
  if (count < 1) fail(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  const std::size_t n = alpha.atoms->size();
  Vector probs(n, 1.0);
  if (alpha.weights != nullptr) probs = *alpha.weights;
  if (alpha.skip != AtomView::kNoSkip) probs[alpha.skip] = 0.0;
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  std::vector<double> coords(count * d);
  for (std::size_t s = 0; s < count; ++s) {
    const ConstVec y = alpha.atoms->point(pick(rng));
    MutVec out(coords.data() + s * d, d);
    k.sample_noise(rng, out);
    for (std::size_t c = 0; c < d; ++c) out[c] += y[c];
  }
  return ParticleConfig(d, std::move(coords));
}

ParticleConfig sample_from_kde(const Measure& alpha, const KernelSpec& k, std::size_t count,
                               std::uint64_t seed) {
  require_empirical(alpha, "sample_from_kde");
  Rng rng(seed);
  return sample_from_kde(AtomView::of(alpha), k, count, rng);
}

}  // namespace driftlab
