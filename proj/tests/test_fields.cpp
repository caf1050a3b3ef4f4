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


#include <cmath>

#include <doctest.h>

#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/fields.hpp"
#include "generators.hpp"

using namespace driftlab;
using driftlab::testing::Gen;

namespace {

std::shared_ptr<const Measure> atoms(std::size_t d, std::vector<double> c) {
  return std::make_shared<Measure>(Measure::empirical(ParticleConfig(d, std::move(c))));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("field spec validation") {
  const auto t = atoms(1, {0.0, 1.0});
  const KernelSpec lap(KernelFamily::kLaplace, 1, 1.0);
  const KernelSpec gau(KernelFamily::kGaussian, 1, 1.0);
  CHECK(code_of([&] { FieldSpec(FieldKind::kConservative, t, lap); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { FieldSpec(FieldKind::kLaplaceLoo, t, gau); }) == ErrorCode::kValidation);
  const FieldSpec loo(FieldKind::kLaplaceLoo, t, lap);
  CHECK(loo.source() == ModelSource::kLeaveOneOut);
  const auto mix = std::make_shared<Measure>(Measure::mixture(ParticleConfig(1, {0.0}), {1.0}));
  CHECK(code_of([&] { FieldSpec(FieldKind::kDisplacement, mix, lap); }) == ErrorCode::kUnsupportedCombination);
  CHECK(code_of([&] { FieldSpec(FieldKind::kConservative, atoms(2, {0.0, 0.0}), gau); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("fields vanish when the model equals the target") {
  Gen gen;
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = gen.index(1, 3);
    const ParticleConfig x = gen.cloud(gen.index(1, 12), d);
    const auto target = std::make_shared<Measure>(Measure::empirical(x));
    const double h = gen.uniform(0.4, 1.5);
    const Vector z = gen.near(x, h);
    const FieldSpec c(FieldKind::kConservative, target, KernelSpec(KernelFamily::kGaussian, d, h));
    const FieldSpec u(FieldKind::kDisplacement, target, KernelSpec(KernelFamily::kLaplace, d, h));
    CHECK(norm(conservative_field(c, x, z)) <= 1e-12 * (1.0 + norm(kde_score(*target, c.kernel(), z))));
    CHECK(norm(displacement_field(u, x, z)) <= 1e-14);
    CHECK(norm(sharp_mismatch_field(u, x, z)) <= 1e-12);
    CHECK(norm(scale_residual_field(u, x, z)) <= 1e-14);
  }
}

TEST_CASE("single atom closed forms") {
  const auto target = atoms(2, {1.0, 2.0});
  const ParticleConfig x(2, {-0.5, 0.25});
  const double h = 0.8;
  const Vector z{0.1, -0.3};
  const FieldSpec c(FieldKind::kConservative, target, KernelSpec(KernelFamily::kGaussian, 2, h));
  const Vector b = conservative_field(c, x, z);
  CHECK(b[0] == doctest::Approx(1.5 / (h * h)).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(1.75 / (h * h)).epsilon(1e-12));
  for (KernelFamily f : {KernelFamily::kGaussian, KernelFamily::kLaplace}) {
    const FieldSpec u(FieldKind::kDisplacement, target, KernelSpec(f, 2, h));
    const Vector v = displacement_field(u, x, z);
    CHECK(v[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(1.75).epsilon(1e-14));
  }
}

TEST_CASE("gaussian displacement is h^2 times the conservative field") {
  Gen gen;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = gen.index(1, 3);
    const double h = gen.uniform(0.3, 2.0);
    const KernelSpec k(KernelFamily::kGaussian, d, h);
    const auto target = gen.coin() ? gen.mixture(d) : gen.empirical(gen.index(1, 20), d, gen.coin());
    const ParticleConfig x = gen.cloud(gen.index(1, 20), d, 1.2);
    const Vector z = gen.near(x, h);
    const Vector b = conservative_field(FieldSpec(FieldKind::kConservative, target, k), x, z);
    const Vector u = displacement_field(FieldSpec(FieldKind::kDisplacement, target, k), x, z);
    CHECK(std::sqrt(squared_distance(b, scaled(u, 1.0 / (h * h)))) <= 1e-12 * (1.0 + norm(b)));
  }
}

TEST_CASE("leave-one-out Laplace field") {
  const auto target = atoms(1, {-1.0, 0.5, 2.0});
  const KernelSpec k(KernelFamily::kLaplace, 1, 0.7);
  const FieldSpec spec(FieldKind::kLaplaceLoo, target, k);
  const ParticleConfig x(1, {0.0, 1.0});
  const Vector z{0.3};
  // With N = 2 the model for particle 0 is the single atom x_1.
  const Vector u = laplace_loo_field(spec, x, 0, z);
  CHECK(u[0] == doctest::Approx(mean_shift(*target, k, z)[0] - (1.0 - 0.3)).epsilon(1e-13));
  // At its own position particle i sees no self-atom, so there is no kink.
  CHECK_NOTHROW(particle_velocity(spec, x, 0));
  // Mean shifts need no kernel gradient, so a particle on a data atom is fine.
  const ParticleConfig on_atom(1, {0.5, 1.0});
  CHECK(std::isfinite(particle_velocity(spec, on_atom, 0)[0]));
}

TEST_CASE("leave-one-out bias is small but nonzero at data positions") {
  Gen gen;
  const ParticleConfig x = gen.cloud(60, 1);
  const auto target = std::make_shared<Measure>(Measure::empirical(x));
  const FieldSpec spec(FieldKind::kLaplaceLoo, target, KernelSpec(KernelFamily::kLaplace, 1, 0.5));
  const FieldSpec full(FieldKind::kDisplacement, target, KernelSpec(KernelFamily::kLaplace, 1, 0.5));
  // Evaluate slightly off the atoms, where both fields are defined.
  Vector z{x.point(7)[0] + 1e-3};
  const double loo = norm(laplace_loo_field(spec, x, 7, z));
  CHECK(loo > 0.0);
  CHECK(loo < 0.5);
  CHECK(norm(displacement_field(full, x, z)) <= 1e-14);
}

TEST_CASE("laplace decomposition") {
  Gen gen;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = gen.index(1, 3);
    const double h = gen.uniform(0.2, 2.0);
    const KernelSpec k(KernelFamily::kLaplace, d, h);
    const auto target = gen.empirical(gen.index(1, 20), d, gen.coin());
    const ParticleConfig x = gen.cloud(gen.index(1, 20), d, 1.3);
    const FieldSpec spec(FieldKind::kDisplacement, target, k);
    const Vector z = gen.near(x, h);
    const Vector u = displacement_field(spec, x, z);
    const Vector b = sharp_mismatch_field(spec, x, z);
    const Vector e = scale_residual_field(spec, x, z);
    const double a = scale_factor(AtomView::of(x), k, z);
    Vector sum(d);
    for (std::size_t c = 0; c < d; ++c) sum[c] = a * b[c] + e[c];
    CHECK(std::sqrt(squared_distance(u, sum)) <= 1e-10 * (1.0 + norm(u)));
    const double dr = mean_radius(*target, k, z) - mean_radius(AtomView::of(x), k, z);
    const Vector e2 = scaled(sharp_score(*target, k, z), h * dr);
    CHECK(std::sqrt(squared_distance(e, e2)) <= 1e-12 * (1.0 + norm(e)));
  }
}

TEST_CASE("stein operator") {
  const auto target = std::make_shared<Measure>(Measure::mixture(ParticleConfig(2, {0.0, 0.0}), {1.0}));
  const KernelSpec k(KernelFamily::kGaussian, 2, 1.0);
  const VectorField score = [&](ConstVec z) { return kde_score(*target, k, z); };
  const Vector z{0.4, -0.7};
  const Vector c{2.0, -1.0};
  const VectorField constant = [&](ConstVec) { return c; };
  CHECK(stein_divergence(constant, score, z) == doctest::Approx(dot(score(z), c)).epsilon(1e-12));
  const VectorField identity = [](ConstVec p) { return Vector(p.begin(), p.end()); };
  CHECK(stein_divergence(identity, score, z) == doctest::Approx(2.0 + dot(score(z), z)).epsilon(1e-9));
}

TEST_CASE("divergence of the Gaussian conservative field matches analytic Laplacians") {
  // Single-atom target y and single model atom x: b(z) = (y - x) / h^2,
  // divergence 0. For mixtures with one component and one model atom we have
  // div b = -d / (s^2 + h^2) + d / h^2.
  const double h = 0.6;
  const double var = 0.5;
  const auto target = std::make_shared<Measure>(Measure::mixture(ParticleConfig(1, {0.3}), {var}));
  const FieldSpec spec(FieldKind::kConservative, target, KernelSpec(KernelFamily::kGaussian, 1, h));
  const ParticleConfig x(1, {-0.4});
  const Vector z{0.2};
  const double div = fd_divergence([&](ConstVec p) { return conservative_field(spec, x, p); }, z);
  CHECK(div == doctest::Approx(-1.0 / (var + h * h) + 1.0 / (h * h)).epsilon(1e-5));
}

TEST_CASE("particle divergence pair") {
  const KernelSpec k(KernelFamily::kGaussian, 1, 1.0);
  const auto target = atoms(1, {0.7});
  const DivergencePair one = particle_divergence_pair(ParticleConfig(1, {0.2}), target, k, 0);
  CHECK(one.correction == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(one.lhs - one.rhs) <= 1e-6);

  Gen gen;
  for (std::size_t n : {1u, 5u, 20u}) {
    for (std::size_t d : {1u, 2u}) {
      const ParticleConfig x = gen.cloud(n, d);
      const auto t = gen.mixture(d);
      const DivergencePair p = particle_divergence_pair(x, t, KernelSpec(KernelFamily::kGaussian, d, 0.8), 0);
      CHECK(std::abs(p.lhs - p.rhs) <= 1e-4);
    }
  }
}

TEST_CASE("self-interaction correction decays like 1/N") {
  Gen gen;
  const auto target = gen.mixture(1);
  const KernelSpec k(KernelFamily::kGaussian, 1, 0.5);
  std::vector<double> ns;
  std::vector<double> gaps;
  for (std::size_t n : {25u, 50u, 100u, 200u, 400u, 800u}) {
    // Same quantiles of N(0,1) at every N, so q_x(0) stabilizes.
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      c[j] = std::sqrt(2.0) * std::erf(2.0 * p - 1.0);
    }
    c[0] = 0.0;
    const DivergencePair pair = particle_divergence_pair(ParticleConfig(1, c), target, k, 0);
    ns.push_back(static_cast<double>(n));
    gaps.push_back(std::abs(pair.lhs - pair.frozen));
  }
  CHECK(loglog_slope(ns, gaps) == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("curl") {
  const VectorField rot = [](ConstVec z) { return Vector{-z[1], z[0]}; };
  CHECK(curl2d(rot, Vector{0.3, 0.5}) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(code_of([&] { (void)curl2d(rot, Vector{0.3}); }) == ErrorCode::kUnsupportedDimension);

  Gen gen;
  const auto target = gen.mixture(2);
  const ParticleConfig x = gen.cloud(10, 2);
  const FieldSpec spec(FieldKind::kConservative, target, KernelSpec(KernelFamily::kGaussian, 2, 0.7));
  for (int t = 0; t < 30; ++t) {
    const Vector z = gen.point(2);
    CHECK(std::abs(curl2d([&](ConstVec p) { return conservative_field(spec, x, p); }, z)) <= 1e-5);
  }
}

TEST_CASE("two-cluster Laplace displacement field is not curl-free") {
  Gen gen;
  std::vector<double> data;
  std::vector<double> model;
  for (int j = 0; j < 60; ++j) {
    data.push_back(gen.uniform(-1.5, 1.5));
    data.push_back(0.05 * gen.point(1)[0]);
    model.push_back(0.05 * gen.point(1)[0]);
    model.push_back(gen.uniform(-1.5, 1.5));
  }
  const auto target = atoms(2, data);
  const ParticleConfig x(2, model);
  const FieldSpec spec(FieldKind::kDisplacement, target, KernelSpec(KernelFamily::kLaplace, 2, 0.55));
  GridSpec g;
  g.lo = {-2.0, -2.0};
  g.hi = {2.0, 2.0};
  g.points_per_dim = 41;
  g.rule = QuadratureRule::kTrapezoid;
  CHECK(max_abs_curl(spec, x, g) > 0.01);
}

}  // TEST_SUITE
