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

#include "core/kernels.hpp"

#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace driftlab {
namespace {

constexpr double kRadialCutoff = 40.0;
constexpr double kRadialTol = 1e-14;

// \int_0^\infty r^{k} e^{-r} dr split as quadrature on [0, 40] plus the
// closed-form tail Gamma(k + 1, 40) for integer k.
double laplace_radial_integral(std::size_t k) {
  const double body = adaptive_simpson(
      [k](double r) { return std::pow(r, static_cast<double>(k)) * std::exp(-r); }, 0.0,
      kRadialCutoff, kRadialTol);
  double term = 1.0;
  double series = 1.0;
  for (std::size_t j = 1; j <= k; ++j) {
    term *= kRadialCutoff / static_cast<double>(j);
    series += term;
  }
  const double tail = std::tgamma(static_cast<double>(k) + 1.0) * std::exp(-kRadialCutoff) * series;
  return body + tail;
}

double bump_radial_integral(std::size_t k) {
  return adaptive_simpson(
      [k](double r) {
        const double t = 1.0 - r * r;
        return std::pow(r, static_cast<double>(k)) * t * t * t;
      },
      0.0, 1.0, kRadialTol);
}

// Base-kernel radial integrals depend only on (family, k); memoized so that
// constructing many specs at varying h stays cheap.
double radial_integral(KernelFamily family, std::size_t k) {
  static std::mutex mu;
  static std::map<std::pair<int, std::size_t>, double> memo;
  const std::pair<int, std::size_t> key(static_cast<int>(family), k);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const double v = family == KernelFamily::kLaplace ? laplace_radial_integral(k) : bump_radial_integral(k);
  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, v);
  return v;
}

}  // namespace

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kGaussian: return "gaussian";
    case KernelFamily::kLaplace: return "laplace";
    case KernelFamily::kSmoothCompact: return "smooth_compact";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::kGaussian;
  if (name == "laplace") return KernelFamily::kLaplace;
  if (name == "smooth_compact") return KernelFamily::kSmoothCompact;
  fail(ErrorCode::kValidation, "unknown kernel family '" + name + "'");
}

double unit_sphere_area(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

KernelSpec::KernelSpec(KernelFamily family, std::size_t dim, double bandwidth)
    : family_(family), dim_(dim), h_(bandwidth) {
  if (dim_ < 1) fail(ErrorCode::kValidation, "kernel dimension must be >= 1");
  if (!(h_ > 0.0) || !std::isfinite(h_)) fail(ErrorCode::kValidation, "bandwidth must be positive");
  const double d = static_cast<double>(dim_);
  const double sphere = unit_sphere_area(dim_);
  switch (family_) {
    case KernelFamily::kGaussian:
      base_norm_ = std::pow(2.0 * std::numbers::pi, -0.5 * d);
      base_lap0_ = -d * base_norm_;
      m1_ = std::sqrt(2.0) * std::tgamma(0.5 * (d + 1.0)) / std::tgamma(0.5 * d);
      m2_ = d;
      break;
    case KernelFamily::kLaplace: {
      const double mass = sphere * radial_integral(family_, dim_ - 1);
      base_norm_ = 1.0 / mass;
      base_lap0_ = std::numeric_limits<double>::quiet_NaN();
      m1_ = base_norm_ * sphere * radial_integral(family_, dim_);
      m2_ = base_norm_ * sphere * radial_integral(family_, dim_ + 1);
      break;
    }
    case KernelFamily::kSmoothCompact: {
      const double mass = sphere * radial_integral(family_, dim_ - 1);
      base_norm_ = 1.0 / mass;
      base_lap0_ = -6.0 * d * base_norm_;
      m1_ = base_norm_ * sphere * radial_integral(family_, dim_);
      m2_ = base_norm_ * sphere * radial_integral(family_, dim_ + 1);
      break;
    }
  }
  peak_ = base_norm_ * std::pow(h_, -d);
  inv_h_ = 1.0 / h_;
  inv_h2_ = inv_h_ * inv_h_;
}

double KernelSpec::base_moment(int order) const {
  if (order == 1) return m1_;
  if (order == 2) return m2_;
  fail(ErrorCode::kInvalidArgument, "kernel moment order must be 1 or 2");
}

double KernelSpec::eval_sq(double r2) const {
  switch (family_) {
    case KernelFamily::kGaussian:
      return peak_ * std::exp(-0.5 * r2 * inv_h2_);
    case KernelFamily::kLaplace:
      return peak_ * std::exp(-std::sqrt(r2) * inv_h_);
    case KernelFamily::kSmoothCompact: {
      const double t = r2 * inv_h2_;
      if (t >= 1.0) return 0.0;
      const double s = 1.0 - t;
      return peak_ * s * s * s;
    }
  }
  return 0.0;
}

double KernelSpec::grad_factor_sq(double r2) const {
  switch (family_) {
    case KernelFamily::kGaussian:
      return -inv_h2_ * eval_sq(r2);
    case KernelFamily::kLaplace:
      return -inv_h_ / std::sqrt(r2) * eval_sq(r2);
    case KernelFamily::kSmoothCompact: {
      const double t = r2 * inv_h2_;
      if (t >= 1.0) return 0.0;
      const double s = 1.0 - t;
      return -6.0 * peak_ * s * s * inv_h2_;
    }
  }
  return 0.0;
}

double KernelSpec::sharp_eval_sq(double r2) const {
  return h_ * (std::sqrt(r2) + h_) * eval_sq(r2);
}

double KernelSpec::eval(ConstVec u) const {
  require_dim(u, dim_, "eval_kernel");
  return eval_sq(squared_norm(u));
}

Vector KernelSpec::grad(ConstVec u) const {
  require_dim(u, dim_, "grad_kernel");
  const double r2 = squared_norm(u);
  if (family_ == KernelFamily::kLaplace && r2 == 0.0) {
    fail(ErrorCode::kDomain, "kernel not differentiable at origin");
  }
  return scaled(u, grad_factor_sq(r2));
}

double KernelSpec::laplacian_at_zero() const {
  if (family_ == KernelFamily::kLaplace) {
    fail(ErrorCode::kUnsupportedFamily, "Laplacian at the origin is undefined for the Laplace kernel");
  }
  return std::pow(h_, -static_cast<double>(dim_) - 2.0) * base_lap0_;
}

double KernelSpec::moment(int order) const {
  return std::pow(h_, static_cast<double>(order)) * base_moment(order);
}

void KernelSpec::require_laplace(const char* op) const {
  if (family_ != KernelFamily::kLaplace) {
    fail(ErrorCode::kUnsupportedFamily, std::string(op) + " requires the Laplace kernel");
  }
}

double KernelSpec::sharp_eval(ConstVec u) const {
  require_laplace("sharp_kernel_eval");
  require_dim(u, dim_, "sharp_kernel_eval");
  return sharp_eval_sq(squared_norm(u));
}

Vector KernelSpec::sharp_grad(ConstVec u) const {
  require_laplace("sharp_kernel_grad");
  require_dim(u, dim_, "sharp_kernel_grad");
  return scaled(u, -eval_sq(squared_norm(u)));
}

double KernelSpec::sharp_normalizer() const {
  require_laplace("sharp_normalizer");
  return h_ * (moment(1) + h_);
}

void KernelSpec::sample_noise(Rng& rng, MutVec out) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (family_) {
    case KernelFamily::kGaussian:
      for (double& v : out) v = h_ * normal(rng);
      return;
    case KernelFamily::kLaplace: {
      std::gamma_distribution<double> radius(static_cast<double>(dim_), h_);
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (double& v : out) {
          v = normal(rng);
          n2 += v * v;
        }
      } while (n2 == 0.0);
      const double r = radius(rng) / std::sqrt(n2);
      for (double& v : out) v *= r;
      return;
    }
    case KernelFamily::kSmoothCompact: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double d = static_cast<double>(dim_);
      for (;;) {
        double n2 = 0.0;
        for (double& v : out) {
          v = normal(rng);
          n2 += v * v;
        }
        if (n2 == 0.0) continue;
        const double r = std::pow(unif(rng), 1.0 / d);
        const double s = 1.0 - r * r;
        if (unif(rng) <= s * s * s) {
          const double scale = h_ * r / std::sqrt(n2);
          for (double& v : out) v *= scale;
          return;
        }
      }
    }
  }
}

}  // namespace driftlab
