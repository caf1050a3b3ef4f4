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

#ifndef DRIFTLAB_CORE_FIELDS_HPP_
#define DRIFTLAB_CORE_FIELDS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "core/measures.hpp"

namespace driftlab {

enum class FieldKind { kConservative, kDisplacement, kLaplaceLoo };
enum class ModelSource { kFullConfig, kLeaveOneOut };

const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

// Drift definition: which field, toward which target, under which kernel.
// The model measure is always the empirical measure of the configuration the
// field is evaluated against.
class FieldSpec {
 public:
  FieldSpec(FieldKind kind, std::shared_ptr<const Measure> target, KernelSpec kernel,
            ModelSource source = ModelSource::kFullConfig);

  FieldKind kind() const noexcept { return kind_; }
  const Measure& target() const noexcept { return *target_; }
  const std::shared_ptr<const Measure>& target_ptr() const noexcept { return target_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  ModelSource source() const noexcept { return source_; }
  std::size_t dim() const noexcept { return kernel_.dim(); }

 private:
  FieldKind kind_;
  std::shared_ptr<const Measure> target_;
  KernelSpec kernel_;
  ModelSource source_;
};

// b_x(z) = s_rho(z) - s_x(z).
Vector conservative_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z);
// u_x(z) = M_nu(z) - M_x(z) with the full configuration as model.
Vector displacement_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z);
// u_{x,-i}(z) = M_nu(z) - M_{x,-i}(z).
Vector laplace_loo_field(const FieldSpec& spec, const ParticleConfig& config, std::size_t i,
                         ConstVec z);
// b^#_x = sigma_nu - sigma_x.
Vector sharp_mismatch_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z);
// e_x = (a_nu - a_x) sigma_nu.
Vector scale_residual_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z);

// Field described by a FieldSpec, against the full frozen configuration: b_x for the
// conservative kind, u_x otherwise.
Vector spatial_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z);
// Field driving particle i, evaluated on the frozen configuration z.
// Leave-one-out sources use u_{x,-i}.
Vector particle_field(const FieldSpec& spec, const ParticleConfig& config, std::size_t i,
                      ConstVec z);
// particle_field at z = x_i.
Vector particle_velocity(const FieldSpec& spec, const ParticleConfig& config, std::size_t i);
// Score bound into the Stein operator: sigma_nu under the Laplace kernel,
// s_rho otherwise.
Vector reference_score(const FieldSpec& spec, ConstVec z);

// A f(z) = div f(z) + score(z) . f(z), divergence by central differences.
double stein_divergence(const VectorField& field, const VectorField& score, ConstVec z,
                        std::optional<double> step = {});

struct DivergencePair {
  double lhs = 0.0;         // div of x_i -> b_i(x) with the center moving
  double rhs = 0.0;         // frozen divergence + correction
  double frozen = 0.0;      // div_z b_x(z) at z = x_i
  double correction = 0.0;  // Delta K_h(0) / (N q_x(x_i))
};

DivergencePair particle_divergence_pair(const ParticleConfig& config,
                                        const std::shared_ptr<const Measure>& target,
                                        const KernelSpec& k, std::size_t i,
                                        std::optional<double> step = {});

double curl2d(const VectorField& field, ConstVec z, std::optional<double> step = {});

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_FIELDS_HPP_
