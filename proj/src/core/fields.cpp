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

#include "core/fields.hpp"

namespace driftlab {
namespace {

void subtract_into(Vector& a, const Vector& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
}

void require_laplace_field(const FieldSpec& spec, const char* what) {
  if (spec.kernel().family() != KernelFamily::kLaplace) {
    fail(ErrorCode::kUnsupportedFamily, std::string(what) + " requires the Laplace kernel");
  }
}

void require_config(const FieldSpec& spec, const ParticleConfig& config) {
  if (config.empty()) fail(ErrorCode::kDegenerateConfig, "empty configuration");
  if (config.dim() != spec.dim()) {
    fail(ErrorCode::kDimensionMismatch, "configuration dimension differs from field dimension");
  }
}

Vector target_shift(const FieldSpec& spec, ConstVec z) {
  return mean_shift(spec.target(), spec.kernel(), z);
}

}  // namespace

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::kConservative: return "conservative";
    case FieldKind::kDisplacement: return "displacement";
    case FieldKind::kLaplaceLoo: return "laplace_loo";
  }
  return "unknown";
}

FieldKind field_kind_from_string(const std::string& name) {
  if (name == "conservative") return FieldKind::kConservative;
  if (name == "displacement") return FieldKind::kDisplacement;
  if (name == "laplace_loo") return FieldKind::kLaplaceLoo;
  fail(ErrorCode::kValidation, "unknown field kind '" + name + "'");
}

FieldSpec::FieldSpec(FieldKind kind, std::shared_ptr<const Measure> target, KernelSpec kernel,
                     ModelSource source)
    : kind_(kind), target_(std::move(target)), kernel_(kernel), source_(source) {
  if (!target_) fail(ErrorCode::kValidation, "field needs a target measure");
  require_compatible(*target_, kernel_);
  if (kind_ == FieldKind::kLaplaceLoo) {
    if (kernel_.family() != KernelFamily::kLaplace) {
      fail(ErrorCode::kValidation, "laplace_loo field requires the Laplace kernel");
    }
    source_ = ModelSource::kLeaveOneOut;
  }
  if (kind_ == FieldKind::kConservative) {
    if (!kernel_.differentiable()) {
      fail(ErrorCode::kValidation,
           "conservative field requires a differentiable kernel (gaussian or smooth_compact)");
    }
    if (source_ != ModelSource::kFullConfig) {
      fail(ErrorCode::kValidation, "conservative field uses the full configuration");
    }
  }
}

Vector conservative_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z) {
  require_config(spec, config);
  Vector b = kde_score(spec.target(), spec.kernel(), z);
  subtract_into(b, kde_score(AtomView::of(config), spec.kernel(), z));
  return b;
}

Vector displacement_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z) {
  require_config(spec, config);
  Vector u = target_shift(spec, z);
  subtract_into(u, mean_shift(AtomView::of(config), spec.kernel(), z));
  return u;
}

Vector laplace_loo_field(const FieldSpec& spec, const ParticleConfig& config, std::size_t i,
                         ConstVec z) {
  require_config(spec, config);
  const AtomView model = AtomView::leave_out(config, i);
  Vector u = target_shift(spec, z);
  subtract_into(u, mean_shift(model, spec.kernel(), z));
  return u;
}

Vector sharp_mismatch_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z) {
  require_laplace_field(spec, "sharp_mismatch_field");
  require_config(spec, config);
  Vector b = sharp_score(spec.target(), spec.kernel(), z);
  subtract_into(b, sharp_score(AtomView::of(config), spec.kernel(), z));
  return b;
}

Vector scale_residual_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z) {
  require_laplace_field(spec, "scale_residual_field");
  require_config(spec, config);
  const double a_nu = scale_factor(spec.target(), spec.kernel(), z);
  const double a_x = scale_factor(AtomView::of(config), spec.kernel(), z);
  return scaled(sharp_score(spec.target(), spec.kernel(), z), a_nu - a_x);
}

Vector spatial_field(const FieldSpec& spec, const ParticleConfig& config, ConstVec z) {
  if (spec.kind() == FieldKind::kConservative) return conservative_field(spec, config, z);
  return displacement_field(spec, config, z);
}

Vector particle_field(const FieldSpec& spec, const ParticleConfig& config, std::size_t i,
                      ConstVec z) {
  if (spec.source() == ModelSource::kLeaveOneOut) return laplace_loo_field(spec, config, i, z);
  return spatial_field(spec, config, z);
}

Vector particle_velocity(const FieldSpec& spec, const ParticleConfig& config, std::size_t i) {
  if (i >= config.size()) fail(ErrorCode::kInvalidArgument, "particle index out of range");
  try {
    return particle_field(spec, config, i, config.point(i));
  } catch (const Error& e) {
    fail(e.code(), std::string(e.what()) + " (particle " + std::to_string(i) + ")");
  }
}

Vector reference_score(const FieldSpec& spec, ConstVec z) {
  if (spec.kernel().family() == KernelFamily::kLaplace) {
    return sharp_score(spec.target(), spec.kernel(), z);
  }
  return kde_score(spec.target(), spec.kernel(), z);
}

double stein_divergence(const VectorField& field, const VectorField& score, ConstVec z,
                        std::optional<double> step) {
  const double div = fd_divergence(field, z, step);
  const Vector f = field(z);
  const Vector s = score(z);
  require_dim(s, z.size(), "reference score");
  const double value = div + dot(s, f);
  if (!std::isfinite(value)) fail(ErrorCode::kNonFinite, "non-finite Stein divergence");
  return value;
}

DivergencePair particle_divergence_pair(const ParticleConfig& config,
                                        const std::shared_ptr<const Measure>& target,
                                        const KernelSpec& k, std::size_t i,
                                        std::optional<double> step) {
  const FieldSpec spec(FieldKind::kConservative, target, k);
  require_config(spec, config);
  if (i >= config.size()) fail(ErrorCode::kInvalidArgument, "particle index out of range");
  const std::size_t d = config.dim();
  const ConstVec xi = config.point(i);
  const double hstep = step.value_or(default_fd_step(xi));

  DivergencePair out;
  ParticleConfig moved = config;
  for (std::size_t c = 0; c < d; ++c) {
    const double orig = xi[c];
    moved.point(i)[c] = orig + hstep;
    const double fp = conservative_field(spec, moved, moved.point(i))[c];
    moved.point(i)[c] = orig - hstep;
    const double fm = conservative_field(spec, moved, moved.point(i))[c];
    moved.point(i)[c] = orig;
    out.lhs += (fp - fm) / (2.0 * hstep);
  }
  out.frozen = fd_divergence(
      [&](ConstVec z) { return conservative_field(spec, config, z); }, xi, hstep);
  const double q = kde_density(AtomView::of(config), k, xi);
  if (!(q >= kDensityFloor)) fail(ErrorCode::kSingularDenominator, "q_x(x_i) below 1e-300");
  out.correction = k.laplacian_at_zero() / (static_cast<double>(config.size()) * q);
  out.rhs = out.frozen + out.correction;
  if (!std::isfinite(out.lhs) || !std::isfinite(out.rhs)) {
    fail(ErrorCode::kNonFinite, "non-finite divergence");
  }
  return out;
}

double curl2d(const VectorField& field, ConstVec z, std::optional<double> step) {
  if (z.size() != 2) fail(ErrorCode::kUnsupportedDimension, "curl2d requires d = 2");
  const double hstep = step.value_or(default_fd_step(z));
  Vector p(z.begin(), z.end());
  p[0] = z[0] + hstep;
  const double f2_xp = field(p)[1];
  p[0] = z[0] - hstep;
  const double f2_xm = field(p)[1];
  p[0] = z[0];
  p[1] = z[1] + hstep;
  const double f1_yp = field(p)[0];
  p[1] = z[1] - hstep;
  const double f1_ym = field(p)[0];
  const double value = (f2_xp - f2_xm) / (2.0 * hstep) - (f1_yp - f1_ym) / (2.0 * hstep);
  if (!std::isfinite(value)) fail(ErrorCode::kNonFinite, "non-finite curl");
  return value;
}

}  // namespace driftlab
