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

#ifndef DRIFTLAB_CORE_MEASURES_HPP_
#define DRIFTLAB_CORE_MEASURES_HPP_

#include <cstdint>
#include <limits>
#include <string>

#include "core/kernels.hpp"
#include "core/types.hpp"

namespace driftlab {

// Densities below this value are treated as vanished.
inline constexpr double kDensityFloor = 1e-300;

enum class MeasureKind { kEmpirical, kGaussianMixture };

const char* to_string(MeasureKind kind);

// Weighted point cloud, or an isotropic Gaussian mixture. Weights always sum
// to one.
class Measure {
 public:
  // Uniform weights when `weights` is empty.
  static Measure empirical(ParticleConfig atoms, Vector weights = {});
  static Measure mixture(ParticleConfig means, Vector variances, Vector weights = {});

  MeasureKind kind() const noexcept { return kind_; }
  bool is_empirical() const noexcept { return kind_ == MeasureKind::kEmpirical; }
  std::size_t dim() const noexcept { return atoms_.dim(); }
  std::size_t size() const noexcept { return atoms_.size(); }
  // Atoms for empirical measures, component means for mixtures.
  const ParticleConfig& atoms() const noexcept { return atoms_; }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& variances() const noexcept { return variances_; }
  bool uniform() const noexcept { return uniform_; }

  // i.i.d. draws from the measure itself.
  ParticleConfig sample(std::size_t n, Rng& rng) const;
  double mixture_density(ConstVec z) const;

 private:
  Measure(MeasureKind kind, ParticleConfig atoms, Vector weights, Vector variances);

  MeasureKind kind_;
  ParticleConfig atoms_;
  Vector weights_;
  Vector variances_;
  bool uniform_ = true;
};

// Non-owning view of a discrete measure used by the inner KDE loops. With
// `skip` set, atom `skip` is removed and the rest renormalized, which gives
// the leave-one-out measure without a copy.
struct AtomView {
  static constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();

  const ParticleConfig* atoms = nullptr;
  const Vector* weights = nullptr;  // nullptr means uniform
  std::size_t skip = kNoSkip;

  static AtomView of(const ParticleConfig& config) { return {&config, nullptr, kNoSkip}; }
  static AtomView of(const Measure& measure);
  static AtomView leave_out(const ParticleConfig& config, std::size_t i);

  std::size_t dim() const { return atoms->dim(); }
};

// Kernel sums at one evaluation point.
struct KdeSums {
  double density = 0.0;     // Q = sum w K
  double sharp = 0.0;       // R = sum w L
  double radius_num = 0.0;  // sum w |y - z| K
  Vector shift_num;         // sum w (y - z) K
  Vector grad;              // sum w grad K(z - y)
  Vector sharp_grad;        // sum w grad L(z - y)
};

enum KdeTerm : unsigned {
  kTermDensity = 1u,
  kTermSharp = 2u,
  kTermRadius = 4u,
  kTermShift = 8u,
  kTermGrad = 16u,
  kTermSharpGrad = 32u,
};

KdeSums kde_sums(const AtomView& view, const KernelSpec& k, ConstVec z, unsigned terms);

double kde_density(const AtomView& alpha, const KernelSpec& k, ConstVec z);
Vector kde_score(const AtomView& alpha, const KernelSpec& k, ConstVec z);
Vector mean_shift(const AtomView& alpha, const KernelSpec& k, ConstVec z);
double mean_radius(const AtomView& alpha, const KernelSpec& k, ConstVec z);
double sharp_density(const AtomView& alpha, const KernelSpec& k, ConstVec z);
Vector sharp_score(const AtomView& alpha, const KernelSpec& k, ConstVec z);
double scale_factor(const AtomView& alpha, const KernelSpec& k, ConstVec z);

// Measure overloads. Mixtures are accepted only by the first three and only
// under a Gaussian kernel.
double kde_density(const Measure& alpha, const KernelSpec& k, ConstVec z);
Vector kde_score(const Measure& alpha, const KernelSpec& k, ConstVec z);
Vector mean_shift(const Measure& alpha, const KernelSpec& k, ConstVec z);
double mean_radius(const Measure& alpha, const KernelSpec& k, ConstVec z);
double sharp_density(const Measure& alpha, const KernelSpec& k, ConstVec z);
Vector sharp_score(const Measure& alpha, const KernelSpec& k, ConstVec z);
double scale_factor(const Measure& alpha, const KernelSpec& k, ConstVec z);

Measure loo_measure(const ParticleConfig& config, std::size_t i);

// Exact draws from alpha * K_h.
ParticleConfig sample_from_kde(const Measure& alpha, const KernelSpec& k, std::size_t count,
                               std::uint64_t seed);
ParticleConfig sample_from_kde(const AtomView& alpha, const KernelSpec& k, std::size_t count,
                               Rng& rng);

// Throws kUnsupportedCombination for a mixture under a non-Gaussian kernel.
void require_compatible(const Measure& alpha, const KernelSpec& k);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_MEASURES_HPP_
