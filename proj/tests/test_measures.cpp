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
#include <numbers>

#include <doctest.h>

#include "core/error.hpp"
#include "core/measures.hpp"
#include "generators.hpp"

using namespace driftlab;
using driftlab::testing::Gen;

TEST_SUITE("measures") {

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(Measure::empirical(ParticleConfig(1, {0.0, 1.0}), {0.5, 0.4}), Error);
  CHECK_THROWS_AS(Measure::empirical(ParticleConfig(1, {0.0, 1.0}), {1.5, -0.5}), Error);
  CHECK_THROWS_AS(Measure::mixture(ParticleConfig(1, {0.0}), {0.0}), Error);
  CHECK_THROWS_AS(Measure::mixture(ParticleConfig(1, {0.0, 1.0}), {1.0}), Error);
  const Measure m = Measure::empirical(ParticleConfig(2, {0.0, 0.0, 1.0, 1.0}));
  CHECK(m.uniform());
  CHECK(m.weights()[0] == doctest::Approx(0.5));
}

TEST_CASE("kde density oracles") {
  const Measure single = Measure::empirical(ParticleConfig(1, {0.4}));
  CHECK(kde_density(single, KernelSpec(KernelFamily::kGaussian, 1, 1.0), Vector{0.4}) ==
        doctest::Approx(0.398942).epsilon(1e-6));
  const Measure mix = Measure::mixture(ParticleConfig(1, {0.0}), {1.0});
  CHECK(kde_density(mix, KernelSpec(KernelFamily::kGaussian, 1, 1.0), Vector{0.0}) ==
        doctest::Approx(0.282095).epsilon(1e-6));
  const Measure pm = Measure::empirical(ParticleConfig(1, {-1.0, 1.0}));
  CHECK(kde_density(pm, KernelSpec(KernelFamily::kLaplace, 1, 1.0), Vector{0.0}) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(0.5 * std::exp(-1.0) == doctest::Approx(0.183940).epsilon(1e-6));
}

TEST_CASE("mixtures need the Gaussian kernel") {
  const Measure mix = Measure::mixture(ParticleConfig(1, {0.0}), {1.0});
  try {
    (void)kde_density(mix, KernelSpec(KernelFamily::kLaplace, 1, 1.0), Vector{0.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedCombination);
  }
}

TEST_CASE("scores") {
  const KernelSpec g(KernelFamily::kGaussian, 2, 0.7);
  const Measure single = Measure::empirical(ParticleConfig(2, {1.0, -1.0}));
  const Vector z{0.2, 0.3};
  const Vector s = kde_score(single, g, z);
  CHECK(s[0] == doctest::Approx((1.0 - 0.2) / 0.49).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx((-1.0 - 0.3) / 0.49).epsilon(1e-12));

  const Measure pm = Measure::empirical(ParticleConfig(1, {-1.0, 1.0}));
  for (KernelFamily f : {KernelFamily::kGaussian, KernelFamily::kLaplace, KernelFamily::kSmoothCompact}) {
    CHECK(kde_score(pm, KernelSpec(f, 1, 1.5), Vector{0.0})[0] == doctest::Approx(0.0).scale(1.0));
  }
  const Measure mix = Measure::mixture(ParticleConfig(1, {0.0}), {1.0});
  CHECK(kde_score(mix, KernelSpec(KernelFamily::kGaussian, 1, 1.0), Vector{1.0})[0] ==
        doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("laplace score at an atom is a domain error") {
  const Measure pm = Measure::empirical(ParticleConfig(1, {-1.0, 1.0}));
  try {
    (void)kde_score(pm, KernelSpec(KernelFamily::kLaplace, 1, 1.0), Vector{1.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDomain);
  }
}

TEST_CASE("density underflow is reported") {
  const Measure single = Measure::empirical(ParticleConfig(1, {0.0}));
  try {
    (void)kde_score(single, KernelSpec(KernelFamily::kGaussian, 1, 0.01), Vector{100.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularDenominator);
  }
}

TEST_CASE("mean shift oracles") {
  const KernelSpec l(KernelFamily::kLaplace, 2, 0.6);
  const Measure single = Measure::empirical(ParticleConfig(2, {1.0, 2.0}));
  const Vector z{0.5, 0.5};
  const Vector m = mean_shift(single, l, z);
  CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(1.5).epsilon(1e-14));
  const Measure pm = Measure::empirical(ParticleConfig(1, {-1.0, 1.0}));
  CHECK(mean_shift(pm, KernelSpec(KernelFamily::kLaplace, 1, 1.0), Vector{0.0})[0] ==
        doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("gaussian mean shift is h^2 times the score") {
  Gen gen;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = gen.index(1, 3);
    const double h = gen.uniform(0.3, 2.0);
    const KernelSpec k(KernelFamily::kGaussian, d, h);
    const auto alpha = gen.coin() ? gen.empirical(gen.index(1, 15), d, gen.coin()) : gen.mixture(d);
    const Vector z = gen.near(alpha->atoms(), h);
    const Vector m = mean_shift(*alpha, k, z);
    const Vector s = scaled(kde_score(*alpha, k, z), h * h);
    CHECK(std::sqrt(squared_distance(m, s)) <= 1e-12 * std::max(1.0, norm(m)));
  }
}

TEST_CASE("mean radius and scale factor") {
  const KernelSpec l(KernelFamily::kLaplace, 1, 1.0);
  const Measure pm = Measure::empirical(ParticleConfig(1, {-1.0, 1.0}));
  CHECK(mean_radius(pm, l, Vector{0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  const KernelSpec l2(KernelFamily::kLaplace, 2, 0.4);
  const Measure single = Measure::empirical(ParticleConfig(2, {1.0, 1.0}));
  const Vector z{0.2, -0.1};
  const double r = std::hypot(0.8, 1.1);
  CHECK(mean_radius(single, l2, z) == doctest::Approx(r).epsilon(1e-14));
  CHECK(scale_factor(single, l2, z) == doctest::Approx(0.4 * (r + 0.4)).epsilon(1e-12));
  const Vector sig = sharp_score(single, l2, z);
  CHECK(sig[0] == doctest::Approx(0.8 / (0.4 * (r + 0.4))).epsilon(1e-12));
  CHECK(sig[1] == doctest::Approx(1.1 / (0.4 * (r + 0.4))).epsilon(1e-12));
  const Vector m = mean_shift(single, l2, z);
  const Vector as = scaled(sig, scale_factor(single, l2, z));
  CHECK(std::sqrt(squared_distance(m, as)) <= 1e-12);
}

TEST_CASE("scale radius identity on random setups") {
  Gen gen;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = gen.index(1, 3);
    const double h = gen.uniform(0.2, 2.0);
    const KernelSpec k(KernelFamily::kLaplace, d, h);
    const auto alpha = gen.empirical(gen.index(1, 20), d, gen.coin());
    const Vector z = gen.near(alpha->atoms(), h);
    const double a = scale_factor(*alpha, k, z);
    CHECK(std::abs(a - h * (mean_radius(*alpha, k, z) + h)) <= 1e-12 * a);
  }
}

TEST_CASE("sharp quantities need Laplace") {
  const Measure single = Measure::empirical(ParticleConfig(1, {0.0}));
  CHECK_THROWS_AS(sharp_density(single, KernelSpec(KernelFamily::kGaussian, 1, 1.0), Vector{0.5}), Error);
}

TEST_CASE("leave one out") {
  const ParticleConfig two(1, {3.0, 7.0});
  const Measure lo2 = loo_measure(two, 0);
  REQUIRE(lo2.size() == 1);
  CHECK(lo2.atoms().point(0)[0] == 7.0);
  CHECK(lo2.weights()[0] == 1.0);
  const ParticleConfig three(1, {1.0, 2.0, 3.0});
  const Measure lo3 = loo_measure(three, 1);
  REQUIRE(lo3.size() == 2);
  CHECK(lo3.atoms().point(0)[0] == 1.0);
  CHECK(lo3.atoms().point(1)[0] == 3.0);
  CHECK(lo3.weights()[0] + lo3.weights()[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(loo_measure(ParticleConfig(1, {1.0}), 0), Error);

  // The skip view agrees with the materialized measure.
  Gen gen;
  const ParticleConfig x = gen.cloud(9, 2);
  const KernelSpec k(KernelFamily::kLaplace, 2, 0.7);
  const Vector z = gen.point(2);
  for (std::size_t i = 0; i < 9; ++i) {
    const Measure m = loo_measure(x, i);
    CHECK(kde_density(AtomView::leave_out(x, i), k, z) == doctest::Approx(kde_density(m, k, z)).epsilon(1e-14));
    CHECK(scale_factor(AtomView::leave_out(x, i), k, z) == doctest::Approx(scale_factor(m, k, z)).epsilon(1e-13));
  }
}

TEST_CASE("sampling from the KDE") {
  const Measure single = Measure::empirical(ParticleConfig(1, {2.5}));
  const KernelSpec g(KernelFamily::kGaussian, 1, 1.0);
  const ParticleConfig s = sample_from_kde(single, g, 10000, 42);
  double mean = 0.0;
  for (double v : s.coords()) mean += v;
  mean /= 10000.0;
  CHECK(std::abs(mean - 2.5) <= 3.0 / std::sqrt(10000.0));
  CHECK(sample_from_kde(single, g, 500, 42) == sample_from_kde(single, g, 500, 42));

  const KernelSpec l(KernelFamily::kLaplace, 1, 0.8);
  const ParticleConfig sl = sample_from_kde(single, l, 20000, 3);
  double abs_mean = 0.0;
  for (double v : sl.coords()) abs_mean += std::abs(v - 2.5);
  abs_mean /= 20000.0;
  CHECK(std::abs(abs_mean - 0.8) <= 3.0 * 0.8 / std::sqrt(20000.0));
}

TEST_CASE("dimension mismatch") {
  const Measure single = Measure::empirical(ParticleConfig(2, {0.0, 0.0}));
  CHECK_THROWS_AS(kde_density(single, KernelSpec(KernelFamily::kGaussian, 1, 1.0), Vector{0.0}), Error);
  CHECK_THROWS_AS(kde_density(single, KernelSpec(KernelFamily::kGaussian, 2, 1.0), Vector{0.0}), Error);
}

}  // TEST_SUITE
