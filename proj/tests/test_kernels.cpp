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
#include "core/kernels.hpp"
#include "core/numerics.hpp"
#include "generators.hpp"

using namespace driftlab;
using driftlab::testing::Gen;

namespace {

double eval1(const KernelSpec& k, double u) { return k.eval(Vector{u}); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("peak values") {
  CHECK(eval1(KernelSpec(KernelFamily::kGaussian, 1, 1.0), 0.0) == doctest::Approx(0.398942).epsilon(1e-6));
  CHECK(eval1(KernelSpec(KernelFamily::kLaplace, 1, 1.0), 0.0) == doctest::Approx(0.5).epsilon(1e-10));
  const KernelSpec g2(KernelFamily::kGaussian, 2, 2.0);
  CHECK(g2.eval(Vector{0.0, 0.0}) == doctest::Approx(0.039789).epsilon(1e-5));
  CHECK(g2.peak() == doctest::Approx(1.0 / (8.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("laplace normalizer is c_d = Gamma(d/2+1) / (pi^{d/2} Gamma(d+1))") {
  for (std::size_t d = 1; d <= 5; ++d) {
    const double dd = static_cast<double>(d);
    const double expect = std::tgamma(dd / 2.0 + 1.0) / (std::pow(std::numbers::pi, dd / 2.0) * std::tgamma(dd + 1.0));
    CHECK(KernelSpec(KernelFamily::kLaplace, d, 1.0).base_normalizer() == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("kernels integrate to one") {
  for (KernelFamily f : {KernelFamily::kGaussian, KernelFamily::kLaplace, KernelFamily::kSmoothCompact}) {
    for (std::size_t d : {1u, 2u}) {
      const KernelSpec k(f, d, 0.7);
      GridSpec g;
      const double half = f == KernelFamily::kLaplace ? 30.0 * 0.7 : 8.0 * 0.7;
      g.lo = Vector(d, -half);
      g.hi = Vector(d, half);
      g.points_per_dim = d == 1 ? 4097 : 801;
      const double mass = grid_integrate([&](ConstVec u) { return k.eval(u); }, g).value;
      CAPTURE(to_string(f));
      CAPTURE(d);
      CHECK(mass == doctest::Approx(1.0).epsilon(d == 1 ? 1e-6 : 2e-3));
    }
  }
}

TEST_CASE("gradient closed form and oddness") {
  const KernelSpec g(KernelFamily::kGaussian, 1, 1.0);
  CHECK(g.grad(Vector{1.0})[0] == doctest::Approx(-0.241971).epsilon(1e-5));
  Gen gen;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = gen.index(1, 3);
    const KernelSpec k(gen.family(), d, gen.uniform(0.3, 2.0));
    const Vector u = gen.point(d, 0.4 * k.bandwidth());
    Vector neg = u;
    for (double& v : neg) v = -v;
    const Vector a = k.grad(u);
    const Vector b = k.grad(neg);
    for (std::size_t c = 0; c < d; ++c) CHECK(a[c] == doctest::Approx(-b[c]).epsilon(1e-14));
    const Vector fd = fd_gradient([&](ConstVec p) { return k.eval(p); }, u, 1e-5 * k.bandwidth());
    for (std::size_t c = 0; c < d; ++c) CHECK(fd[c] == doctest::Approx(a[c]).epsilon(1e-5).scale(k.peak()));
  }
}

TEST_CASE("laplace gradient matches finite differences") {
  const KernelSpec k(KernelFamily::kLaplace, 2, 0.5);
  const Vector u{0.3, 0.4};
  const Vector g = k.grad(u);
  const Vector fd = fd_gradient([&](ConstVec p) { return k.eval(p); }, u, 1e-6);
  CHECK(fd[0] == doctest::Approx(g[0]).epsilon(1e-6));
  CHECK(fd[1] == doctest::Approx(g[1]).epsilon(1e-6));
  CHECK_THROWS_AS(k.grad(Vector{0.0, 0.0}), Error);
}

TEST_CASE("laplacian at origin") {
  CHECK(KernelSpec(KernelFamily::kGaussian, 2, 1.0).laplacian_at_zero() ==
        doctest::Approx(-1.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(KernelSpec(KernelFamily::kGaussian, 1, 2.0).laplacian_at_zero() == doctest::Approx(-0.049868).epsilon(1e-4));
  CHECK(KernelSpec(KernelFamily::kGaussian, 1, 1.0).laplacian_at_zero() == doctest::Approx(-0.398942).epsilon(1e-6));
  const KernelSpec sc(KernelFamily::kSmoothCompact, 1, 0.8);
  const double step = 1e-4;
  const double fd = (eval1(sc, step) - 2.0 * eval1(sc, 0.0) + eval1(sc, -step)) / (step * step);
  CHECK(sc.laplacian_at_zero() == doctest::Approx(fd).epsilon(1e-5));
  try {
    (void)KernelSpec(KernelFamily::kLaplace, 1, 1.0).laplacian_at_zero();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedFamily);
  }
}

TEST_CASE("moments") {
  CHECK(KernelSpec(KernelFamily::kGaussian, 1, 1.0).moment(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(KernelSpec(KernelFamily::kGaussian, 3, 0.5).moment(2) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(KernelSpec(KernelFamily::kLaplace, 1, 1.0).moment(1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(KernelSpec(KernelFamily::kLaplace, 2, 1.0).moment(1) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(KernelSpec(KernelFamily::kLaplace, 2, 0.5).moment(2) == doctest::Approx(0.25 * 6.0).epsilon(1e-9));
}

TEST_CASE("sharp companion kernel") {
  const KernelSpec l1(KernelFamily::kLaplace, 1, 1.0);
  CHECK(l1.sharp_eval(Vector{0.0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(KernelSpec(KernelFamily::kLaplace, 1, 2.0).sharp_eval(Vector{0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l1.sharp_grad(Vector{1.0})[0] == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(l1.sharp_grad(Vector{0.0})[0] == 0.0);
  CHECK(l1.sharp_normalizer() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(KernelSpec(KernelFamily::kLaplace, 2, 1.0).sharp_normalizer() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(KernelSpec(KernelFamily::kLaplace, 1, 0.5).sharp_normalizer() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(KernelSpec(KernelFamily::kGaussian, 1, 1.0).sharp_eval(Vector{0.0}), Error);

  Gen gen;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = gen.index(1, 3);
    const KernelSpec k(KernelFamily::kLaplace, d, gen.uniform(0.3, 2.0));
    const Vector u = gen.point(d);
    Vector neg = u;
    for (double& v : neg) v = -v;
    CHECK(k.sharp_eval(u) == k.sharp_eval(neg));
  }
}

TEST_CASE("sharp normalizer against Monte Carlo") {
  const KernelSpec k(KernelFamily::kLaplace, 1, 0.5);
  // E_{u ~ K_h}[h (|u| + h)] = h (m_1 + h).
  Rng rng(3);
  double acc = 0.0;
  const int n = 200000;
  Vector u(1);
  for (int i = 0; i < n; ++i) {
    k.sample_noise(rng, u);
    acc += 0.5 * (std::abs(u[0]) + 0.5);
  }
  CHECK(acc / n == doctest::Approx(k.sharp_normalizer()).epsilon(5e-3));
}

TEST_CASE("smooth compact support") {
  const KernelSpec k(KernelFamily::kSmoothCompact, 2, 0.5);
  CHECK(k.eval(Vector{0.5, 0.0}) == 0.0);
  CHECK(k.eval(Vector{0.6, 0.1}) == 0.0);
  CHECK(k.eval(Vector{0.2, 0.1}) > 0.0);
}

TEST_CASE("noise samples follow the kernel") {
  Rng rng(11);
  const KernelSpec lap(KernelFamily::kLaplace, 1, 0.7);
  double m1 = 0.0;
  const int n = 40000;
  Vector u(1);
  for (int i = 0; i < n; ++i) {
    lap.sample_noise(rng, u);
    m1 += std::abs(u[0]);
  }
  m1 /= n;
  // |u| ~ Exp(1/h): mean h, standard deviation h.
  CHECK(std::abs(m1 - 0.7) <= 3.0 * 0.7 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("invalid construction") {
  CHECK_THROWS_AS(KernelSpec(KernelFamily::kGaussian, 0, 1.0), Error);
  CHECK_THROWS_AS(KernelSpec(KernelFamily::kGaussian, 1, 0.0), Error);
  CHECK_THROWS_AS(KernelSpec(KernelFamily::kGaussian, 1, -1.0), Error);
  CHECK_THROWS_AS(kernel_family_from_string("cauchy"), Error);
  CHECK(kernel_family_from_string("smooth_compact") == KernelFamily::kSmoothCompact);
}

}  // TEST_SUITE
