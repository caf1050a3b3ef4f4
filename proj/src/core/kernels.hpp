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

#ifndef DRIFTLAB_CORE_KERNELS_HPP_
#define DRIFTLAB_CORE_KERNELS_HPP_

#include <string>

#include "core/numerics.hpp"
#include "core/types.hpp"

namespace driftlab {

enum class KernelFamily { kGaussian, kLaplace, kSmoothCompact };

const char* to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// Radial kernel K_h(u) = h^{-d} K(u / h) with base profile
//   Gaussian       K(u) = (2 pi)^{-d/2} exp(-|u|^2 / 2)
//   Laplace        K(u) = c_d exp(-|u|)
//   SmoothCompact  K(u) = c (1 - |u|^2)^3 on |u| <= 1
// Base constants are computed once at construction. Immutable afterwards.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, std::size_t dim, double bandwidth);

  KernelFamily family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return dim_; }
  double bandwidth() const noexcept { return h_; }

  // Constant c of the base profile, K(0) = c.
  double base_normalizer() const noexcept { return base_norm_; }
  // K_h(0) = c h^{-d}.
  double peak() const noexcept { return peak_; }
  // Base-kernel Laplacian at the origin; NaN for Laplace.
  double base_laplacian_at_zero() const noexcept { return base_lap0_; }
  double base_moment(int order) const;

  double eval(ConstVec u) const;
  Vector grad(ConstVec u) const;
  // h^{-d-2} Delta K(0). Throws kUnsupportedFamily for Laplace.
  double laplacian_at_zero() const;
  // m_p(K_h) = h^p m_p(K) for p in {1, 2}.
  double moment(int order) const;

  // Laplace companion kernel L_h(u) = h (|u| + h) K_h(u).
  double sharp_eval(ConstVec u) const;
  // grad L_h(u) = -u K_h(u); zero at the origin.
  Vector sharp_grad(ConstVec u) const;
  // \int L_h = h (m_1(K_h) + h).
  double sharp_normalizer() const;

  // Unchecked fast paths on the squared radius, used by the KDE sums.
  double eval_sq(double r2) const;
  // grad K_h(u) = grad_factor_sq(|u|^2) * u. Undefined at r = 0 for Laplace.
  double grad_factor_sq(double r2) const;
  double sharp_eval_sq(double r2) const;

  bool differentiable() const noexcept { return family_ != KernelFamily::kLaplace; }

  // Draws u with density K_h into `out`.
  void sample_noise(Rng& rng, MutVec out) const;

 private:
  void require_laplace(const char* op) const;

  KernelFamily family_;
  std::size_t dim_;
  double h_;
  double base_norm_ = 0.0;
  double peak_ = 0.0;
  double base_lap0_ = 0.0;
  double m1_ = 0.0;
  double m2_ = 0.0;
  double inv_h_ = 0.0;
  double inv_h2_ = 0.0;
};

// Surface area of the unit sphere in R^d.
double unit_sphere_area(std::size_t d);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_KERNELS_HPP_
