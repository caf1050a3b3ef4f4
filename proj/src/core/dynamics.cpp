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

#include "core/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace driftlab {
namespace {

double guard_for(const FieldSpec& spec, const IntegratorParams& params) {
  return params.collision_guard.value_or(1e-8 * spec.kernel().bandwidth());
}

bool needs_guard(const FieldSpec& spec) {
  return spec.kernel().family() == KernelFamily::kLaplace;
}

ParticleConfig advanced(const ParticleConfig& base, const std::vector<double>& v, double dt) {
  ParticleConfig out = base;
  auto& c = out.coords();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] += dt * v[k];
  return out;
}

std::string time_context(double t) {
  std::ostringstream os;
  os.precision(10);
  os << " (at t=" << t << ")";
  return os.str();
}

Trajectory run(const ParticleConfig& config0, const FieldSpec& spec,
               const IntegratorParams& params, const Recorder& recorder) {
  params.validate();
  if (config0.dim() != spec.dim()) {
    fail(ErrorCode::kDimensionMismatch, "initial configuration dimension differs from field");
  }
  const double guard = guard_for(spec, params);
  const auto steps = static_cast<std::size_t>(std::ceil(params.t_end / params.eta - 1e-9));

  Trajectory traj;
  traj.params = params;
  auto record = [&](double t, const ParticleConfig& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    if (recorder) traj.records.push_back(recorder(t, x));
  };

  ParticleConfig x = config0;
  double t = 0.0;
  try {
    record(0.0, x);
    for (std::size_t k = 1; k <= steps; ++k) {
      const double t_next = k == steps ? params.t_end : static_cast<double>(k) * params.eta;
      const double dt = t_next - t;
      if (needs_guard(spec)) check_collision_guard(x, guard);
      x = params.scheme == Scheme::kRk4 ? step_rk4(x, spec, dt) : step_frozen_euler(x, spec, dt);
      t = t_next;
      if (k == steps || k % static_cast<std::size_t>(params.record_every) == 0) record(t, x);
    }
  } catch (const Error& e) {
    fail(e.code(), e.what() + time_context(t));
  }
  return traj;
}

}  // namespace

const char* to_string(Scheme scheme) {
  return scheme == Scheme::kRk4 ? "rk4" : "frozen_euler";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "frozen_euler" || name == "euler") return Scheme::kFrozenEuler;
  if (name == "rk4") return Scheme::kRk4;
  fail(ErrorCode::kValidation, "unknown integration scheme '" + name + "'");
}

void IntegratorParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) fail(ErrorCode::kValidation, "eta must be positive");
  if (!(t_end >= eta) || !std::isfinite(t_end)) fail(ErrorCode::kValidation, "t_end must be >= eta");
  if (record_every < 1) fail(ErrorCode::kValidation, "record_every must be >= 1");
  if (collision_guard && !(*collision_guard > 0.0)) {
    fail(ErrorCode::kValidation, "collision_guard must be positive");
  }
}

std::vector<double> velocities(const FieldSpec& spec, const ParticleConfig& config) {
  const std::size_t n = config.size();
  const std::size_t d = config.dim();
  std::vector<double> v(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector vi = particle_velocity(spec, config, i);
    for (std::size_t c = 0; c < d; ++c) v[i * d + c] = vi[c];
  }
  return v;
}

ParticleConfig step_frozen_euler(const ParticleConfig& config, const FieldSpec& spec, double eta) {
  return advanced(config, velocities(spec, config), eta);
}

ParticleConfig step_rk4(const ParticleConfig& config, const FieldSpec& spec, double eta) {
  const std::vector<double> k1 = velocities(spec, config);
  const std::vector<double> k2 = velocities(spec, advanced(config, k1, 0.5 * eta));
  const std::vector<double> k3 = velocities(spec, advanced(config, k2, 0.5 * eta));
  const std::vector<double> k4 = velocities(spec, advanced(config, k3, eta));
  std::vector<double> v(k1.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]) / 6.0;
  return advanced(config, v, eta);
}

void check_collision_guard(const ParticleConfig& config, double guard) {
  const std::size_t n = config.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = std::sqrt(squared_distance(config.point(i), config.point(j)));
      if (dist <= guard) {
        std::ostringstream os;
        os << "collision guard: particles " << i << " and " << j << " at distance " << dist
           << " <= " << guard;
        fail(ErrorCode::kCollisionGuard, os.str());
      }
    }
  }
}

Trajectory integrate(const ParticleConfig& config0, const FieldSpec& spec,
                     const IntegratorParams& params, const Recorder& recorder) {
  return run(config0, spec, params, recorder);
}

Trajectory integrate_rk4(const ParticleConfig& config0, const FieldSpec& spec,
                         IntegratorParams params, const Recorder& recorder) {
  params.scheme = Scheme::kRk4;
  return run(config0, spec, params, recorder);
}

LipschitzEstimate estimate_lipschitz(const ParticleConfig& config, const FieldSpec& spec,
                                     const std::vector<Vector>& probes,
                                     std::optional<double> fd_step) {
  LipschitzEstimate out;
  const std::size_t d = spec.dim();
  const VectorField f = [&](ConstVec z) { return spatial_field(spec, config, z); };
  for (const Vector& z : probes) {
    try {
      const std::vector<double> jac = fd_jacobian(f, z, fd_step);
      const double value = operator_norm(jac, d);
      if (!std::isfinite(value)) {
        ++out.skipped;
        continue;
      }
      out.value = std::max(out.value, value);
    } catch (const Error&) {
      ++out.skipped;
    }
  }
  return out;
}

double lipschitz_integral(const Trajectory& traj, const FieldSpec& spec,
                          std::optional<double> fd_step) {
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const ParticleConfig& x = traj.states[k];
    std::vector<Vector> probes;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const ConstVec p = x.point(i);
      probes.emplace_back(p.begin(), p.end());
    }
    const double value = estimate_lipschitz(x, spec, probes, fd_step).value;
    if (k > 0) total += 0.5 * (prev + value) * (traj.times[k] - traj.times[k - 1]);
    prev = value;
  }
  return total;
}

DistortionReport distortion_report(const Trajectory& traj, double gamma_hat, double tol) {
  DistortionReport out;
  out.bound = std::exp(gamma_hat);
  if (traj.size() == 0) return out;
  const ParticleConfig& x0 = traj.states.front();
  const std::size_t n = x0.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d0 = std::sqrt(squared_distance(x0.point(i), x0.point(j)));
      if (d0 == 0.0) {
        ++out.excluded_pairs;
        continue;
      }
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const ParticleConfig& x = traj.states[k];
        const double ratio = std::sqrt(squared_distance(x.point(i), x.point(j))) / d0;
        out.max_ratio = std::max(out.max_ratio, ratio);
        if (ratio > out.bound * (1.0 + tol)) out.violating_pairs.push_back({i, j, traj.times[k], ratio});
      }
    }
  }
  return out;
}

}  // namespace driftlab
