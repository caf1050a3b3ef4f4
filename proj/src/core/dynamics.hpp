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

#ifndef DRIFTLAB_CORE_DYNAMICS_HPP_
#define DRIFTLAB_CORE_DYNAMICS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/fields.hpp"
#include "core/record.hpp"

namespace driftlab {

enum class Scheme { kFrozenEuler, kRk4 };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct IntegratorParams {
  double eta = 0.01;
  double t_end = 1.0;
  Scheme scheme = Scheme::kFrozenEuler;
  int record_every = 1;
  // Minimum pairwise distance enforced for Laplace fields. Defaults to 1e-8 h.
  std::optional<double> collision_guard;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ParticleConfig> states;
  std::vector<DiagnosticsRecord> records;
  IntegratorParams params;
  std::uint64_t seed = 0;

  std::size_t size() const { return times.size(); }
};

// Per-particle velocities on one frozen snapshot, row-major N x d.
std::vector<double> velocities(const FieldSpec& spec, const ParticleConfig& config);

ParticleConfig step_frozen_euler(const ParticleConfig& config, const FieldSpec& spec, double eta);
ParticleConfig step_rk4(const ParticleConfig& config, const FieldSpec& spec, double eta);

// Throws kCollisionGuard naming the closest pair if any distance is <= guard.
void check_collision_guard(const ParticleConfig& config, double guard);

using Recorder = std::function<DiagnosticsRecord(double, const ParticleConfig&)>;

// Uniform-step integration to params.t_end. The last step is shortened to
// land on t_end. State 0 and the final state are always recorded.
Trajectory integrate(const ParticleConfig& config0, const FieldSpec& spec,
                     const IntegratorParams& params, const Recorder& recorder = {});
Trajectory integrate_rk4(const ParticleConfig& config0, const FieldSpec& spec,
                         IntegratorParams params, const Recorder& recorder = {});

struct LipschitzEstimate {
  double value = 0.0;
  std::size_t skipped = 0;
};

// Max FD-Jacobian operator norm of the frozen spatial field over the probes.
LipschitzEstimate estimate_lipschitz(const ParticleConfig& config, const FieldSpec& spec,
                                     const std::vector<Vector>& probes,
                                     std::optional<double> fd_step = {});

// Trapezoid integral of L-hat over the recorded states, probing at the
// particles of each state.
double lipschitz_integral(const Trajectory& traj, const FieldSpec& spec,
                          std::optional<double> fd_step = {});

struct DistortionViolation {
  std::size_t i = 0;
  std::size_t j = 0;
  double t = 0.0;
  double ratio = 0.0;
};

struct DistortionReport {
  double max_ratio = 1.0;
  double bound = 1.0;  // e^{gamma_hat}
  std::vector<DistortionViolation> violating_pairs;
  std::size_t excluded_pairs = 0;
};

DistortionReport distortion_report(const Trajectory& traj, double gamma_hat, double tol = 0.05);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_DYNAMICS_HPP_
