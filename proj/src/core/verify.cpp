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

#include "core/verify.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace driftlab {
namespace {

double unif(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
double log_unif(Rng& rng, double a, double b) { return std::exp(unif(rng, std::log(a), std::log(b))); }
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

ParticleConfig cloud(Rng& rng, std::size_t n, std::size_t d, double sd, double shift = 0.0) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> c(n * d);
  for (double& v : c) v = shift + normal(rng);
  return ParticleConfig(d, std::move(c));
}

Vector random_weights(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  Vector w(n);
  for (double& v : w) v = 0.2 + e(rng);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= s;
  return w;
}

std::shared_ptr<const Measure> random_empirical(Rng& rng, std::size_t n, std::size_t d, double sd,
                                                bool weighted) {
  ParticleConfig pts = cloud(rng, n, d, sd);
  return std::make_shared<Measure>(Measure::empirical(std::move(pts), weighted ? random_weights(rng, n) : Vector{}));
}

std::shared_ptr<const Measure> random_mixture(Rng& rng, std::size_t d) {
  const std::size_t k = pick(rng, 1, 3);
  ParticleConfig means = cloud(rng, k, d, 1.0);
  Vector vars(k);
  for (double& v : vars) v = unif(rng, 0.1, 1.0);
  return std::make_shared<Measure>(Measure::mixture(std::move(means), std::move(vars), random_weights(rng, k)));
}

Vector near_point(Rng& rng, const ParticleConfig& pts, double scale) {
  const ConstVec base = pts.point(pick(rng, 0, pts.size() - 1));
  std::normal_distribution<double> normal(0.0, scale);
  Vector z(base.begin(), base.end());
  for (double& v : z) v += normal(rng);
  return z;
}

std::size_t random_dim(Rng& rng) { return pick(rng, 1, 3); }

Check make_check(std::string name, std::string anchor, double value, double tol, bool pass,
                 std::string detail = {}) {
  return {std::move(name), std::move(anchor), value, tol, pass, std::move(detail)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double rel_err(ConstVec a, ConstVec b) {
  const double scale = std::max(norm(a), norm(b));
  if (scale == 0.0) return 0.0;
  return std::sqrt(squared_distance(a, b)) / scale;
}

GridSpec window_1d(const ParticleConfig& x, const Measure& target, double pad, int points) {
  std::vector<const ParticleConfig*> clouds{&x};
  if (target.is_empirical()) clouds.push_back(&target.atoms());
  return window_grid(clouds, pad, points, QuadratureRule::kSimpson);
}

double rms_distance(const ParticleConfig& a, const ParticleConfig& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += squared_distance(a.point(i), b.point(i));
  return std::sqrt(total / static_cast<double>(a.size()));
}

}  // namespace

Json check_to_json(const Check& c) {
  Json j = {{"name", c.name}, {"anchor", c.anchor}, {"value", c.value},
            {"tolerance", c.tolerance}, {"pass", c.pass}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

void SelfBoundTally::observe(const ParticleConfig& config, const KernelSpec& k) {
  const ReciprocalKde rk = r_n(config, k);
  const double ratio = rk.r_n / rk.self_bound;
  ++configs;
  max_ratio = std::max(max_ratio, ratio);
  // Equality is attained by a single particle; allow rounding there.
  if (ratio > 1.0 + 1e-12) ++violations;
}

Rng VerifyContext::rng(const std::string& tag) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fnv1a64(tag)),
                    static_cast<std::uint32_t>(fnv1a64(tag) >> 32)};
  return Rng(seq);
}

std::vector<Check> check_gaussian_proportionality(VerifyContext& ctx, int draws) {
  Rng rng = ctx.rng("gaussian_proportionality");
  double worst = 0.0;
  for (int t = 0; t < draws; ++t) {
    const std::size_t d = random_dim(rng);
    const double h = unif(rng, 0.3, 2.0);
    const KernelSpec k(KernelFamily::kGaussian, d, h);
    const auto target = unif(rng, 0.0, 1.0) < 0.5
                            ? random_empirical(rng, pick(rng, 1, 20), d, 1.0, unif(rng, 0, 1) < 0.5)
                            : random_mixture(rng, d);
    const ParticleConfig x = cloud(rng, pick(rng, 1, 20), d, 1.2);
    ctx.tally.observe(x, k);
    const FieldSpec cons(FieldKind::kConservative, target, k);
    const FieldSpec disp(FieldKind::kDisplacement, target, k);
    const Vector z = near_point(rng, x, 0.5 * h);
    const Vector b = conservative_field(cons, x, z);
    const Vector u = displacement_field(disp, x, z);
    const Vector us = scaled(u, 1.0 / (h * h));
    worst = std::max(worst, std::sqrt(squared_distance(b, us)) / (1.0 + norm(b)));
  }
  return {make_check("gaussian_proportionality", "Gaussian score and displacement fields coincide up to h^2",
                     worst, 1e-12, worst <= 1e-12, std::to_string(draws) + " draws, max |b - u/h^2| / (1 + |b|)")};
}

std::vector<Check> check_sharp_gradient(VerifyContext& ctx, int draws) {
  Rng rng = ctx.rng("sharp_gradient");
  double worst = 0.0;
  double worst_formula = 0.0;
  bool origin_zero = true;
  for (int t = 0; t < draws; ++t) {
    const std::size_t d = random_dim(rng);
    const double h = unif(rng, 0.2, 2.0);
    const KernelSpec k(KernelFamily::kLaplace, d, h);
    Vector dir = cloud(rng, 1, d, 1.0).coords();
    const double n0 = norm(dir);
    const double r = log_unif(rng, 0.01 * h, 10.0 * h);
    for (double& v : dir) v *= r / n0;
    const Vector g = k.sharp_grad(dir);
    const Vector fd = fd_gradient([&](ConstVec u) { return k.sharp_eval(u); }, dir, 1e-4 * std::min(h, r));
    worst = std::max(worst, rel_err(fd, g));
    const Vector formula = scaled(dir, -k.eval(dir));
    worst_formula =
        std::max(worst_formula, std::sqrt(squared_distance(g, formula)) / (norm(dir) * k.eval(dir)));
    const Vector zero(d, 0.0);
    const Vector g0 = k.sharp_grad(zero);
    origin_zero = origin_zero && std::all_of(g0.begin(), g0.end(), [](double v) { return v == 0.0; });
  }
  return {make_check("sharp_gradient_fd", "sharp companion kernel gradient equals -u K_h(u)", worst, 1e-6,
                     worst <= 1e-6, std::to_string(draws) + " draws, |u| in [0.01h, 10h]"),
          make_check("sharp_gradient_formula", "sharp companion kernel gradient equals -u K_h(u)",
                     worst_formula, 1e-12, worst_formula <= 1e-12),
          make_check("sharp_gradient_origin", "sharp companion kernel gradient vanishes at the origin",
                     origin_zero ? 0.0 : 1.0, 0.0, origin_zero)};
}

std::vector<Check> check_scale_radius(VerifyContext& ctx, int draws) {
  Rng rng = ctx.rng("scale_radius");
  double worst_a = 0.0;
  double worst_m = 0.0;
  for (int t = 0; t < draws; ++t) {
    const std::size_t d = random_dim(rng);
    const double h = unif(rng, 0.2, 2.0);
    const KernelSpec k(KernelFamily::kLaplace, d, h);
    const auto alpha = random_empirical(rng, pick(rng, 1, 30), d, 1.0, unif(rng, 0, 1) < 0.5);
    const Vector z = near_point(rng, alpha->atoms(), h);
    const double a = scale_factor(*alpha, k, z);
    const double rbar = mean_radius(*alpha, k, z);
    worst_a = std::max(worst_a, std::abs(a - h * (rbar + h)) / a);
    const Vector m = mean_shift(*alpha, k, z);
    const Vector as = scaled(sharp_score(*alpha, k, z), a);
    worst_m = std::max(worst_m, rel_err(m, as));
  }
  return {make_check("scale_radius_identity", "Laplace scale factor equals h (mean radius + h)", worst_a,
                     1e-10, worst_a <= 1e-10, std::to_string(draws) + " setups"),
          make_check("sharp_score_representation", "mean shift equals scale factor times sharp score",
                     worst_m, 1e-10, worst_m <= 1e-10, std::to_string(draws) + " setups")};
}

std::vector<Check> check_decomposition(VerifyContext& ctx, int draws) {
  Rng rng = ctx.rng("decomposition");
  double worst = 0.0;
  double worst_e = 0.0;
  for (int t = 0; t < draws; ++t) {
    const std::size_t d = random_dim(rng);
    const double h = unif(rng, 0.2, 2.0);
    const KernelSpec k(KernelFamily::kLaplace, d, h);
    const auto target = random_empirical(rng, pick(rng, 1, 30), d, 1.0, unif(rng, 0, 1) < 0.5);
    const ParticleConfig x = cloud(rng, pick(rng, 1, 30), d, 1.2, unif(rng, -0.5, 0.5));
    ctx.tally.observe(x, k);
    const FieldSpec spec(FieldKind::kDisplacement, target, k);
    const Vector z = near_point(rng, x, h);
    const Vector u = displacement_field(spec, x, z);
    const double a_x = scale_factor(AtomView::of(x), k, z);
    const Vector b = sharp_mismatch_field(spec, x, z);
    const Vector e = scale_residual_field(spec, x, z);
    Vector rebuilt(d);
    for (std::size_t c = 0; c < d; ++c) rebuilt[c] = a_x * b[c] + e[c];
    worst = std::max(worst, std::sqrt(squared_distance(u, rebuilt)) / (1.0 + norm(u)));
    const double rdiff = mean_radius(*target, k, z) - mean_radius(AtomView::of(x), k, z);
    const Vector e2 = scaled(sharp_score(*target, k, z), h * rdiff);
    worst_e = std::max(worst_e, std::sqrt(squared_distance(e, e2)) / (1.0 + norm(e)));
  }
  return {make_check("laplace_decomposition", "Laplace displacement splits into preconditioned sharp mismatch plus residual",
                     worst, 1e-10, worst <= 1e-10, std::to_string(draws) + " setups, |u - (a b# + e)| / (1 + |u|)"),
          make_check("scale_residual_radius_form", "scale residual in mean-radius form", worst_e, 1e-12,
                     worst_e <= 1e-12)};
}

std::vector<Check> check_divergence_pair(VerifyContext& ctx, int draws_per_case) {
  Rng rng = ctx.rng("divergence_pair");
  double worst = 0.0;
  int cases = 0;
  for (std::size_t n : {1, 5, 20}) {
    for (std::size_t d : {1, 2}) {
      for (int t = 0; t < draws_per_case; ++t) {
        const double h = unif(rng, 0.5, 1.5);
        const KernelSpec k(KernelFamily::kGaussian, d, h);
        const auto target = unif(rng, 0, 1) < 0.5 ? random_mixture(rng, d)
                                                  : random_empirical(rng, pick(rng, 3, 15), d, 1.0, false);
        const ParticleConfig x = cloud(rng, n, d, 1.0);
        ctx.tally.observe(x, k);
        const DivergencePair p = particle_divergence_pair(x, target, k, pick(rng, 0, n - 1));
        worst = std::max(worst, std::abs(p.lhs - p.rhs));
        ++cases;
      }
    }
  }
  const KernelSpec k1(KernelFamily::kGaussian, 1, 1.0);
  const auto target = std::make_shared<Measure>(Measure::empirical(ParticleConfig(1, {0.7})));
  const ParticleConfig single(1, {0.2});
  ctx.tally.observe(single, k1);
  const double corr = particle_divergence_pair(single, target, k1, 0).correction;
  return {make_check("divergence_pair", "self-interaction correction of the particle divergence", worst, 1e-4,
                     worst <= 1e-4, std::to_string(cases) + " configurations, N in {1,5,20}, d in {1,2}"),
          make_check("divergence_correction_single", "self-interaction correction for one particle", corr, 1e-6,
                     std::abs(corr + 1.0) <= 1e-6, "expected -1")};
}

std::vector<Check> check_stein_identities(VerifyContext& ctx, int gaussian_setups, int laplace_setups) {
  Rng rng = ctx.rng("stein_identities");
  constexpr double kStep = 1e-4;
  double worst_kde = 0.0;  // max |lhs - rhs| / tolerance
  std::string kde_detail;
  for (int t = 0; t < gaussian_setups; ++t) {
    const double h = unif(rng, 0.3, 1.0);
    const KernelSpec k(KernelFamily::kGaussian, 1, h);
    const auto target = t % 2 == 0 ? random_mixture(rng, 1) : random_empirical(rng, pick(rng, 5, 20), 1, 1.0, true);
    const ParticleConfig x = cloud(rng, pick(rng, 3, 15), 1, 1.0);
    ctx.tally.observe(x, k);
    const FieldSpec spec(FieldKind::kConservative, target, k);
    const GridSpec g = window_1d(x, *target, 6.0 * h, 1025);
    const SteinIdentityCheck a = kde_stein_identity(x, spec, g, kStep);
    const SteinIdentityCheck b = kde_stein_identity(x, spec, g, 0.5 * kStep);
    const double fd_tol = std::abs(a.stein.value - b.stein.value);
    const double tol = std::max(1e-3 * std::abs(a.fisher.value),
                                2.0 * (a.stein.refinement_error + a.fisher.refinement_error + fd_tol));
    const double ratio = std::abs(a.stein.value - a.fisher.value) / tol;
    if (ratio >= worst_kde) {
      worst_kde = ratio;
      kde_detail = "worst setup: stein " + fmt(a.stein.value) + " vs fisher " + fmt(a.fisher.value) +
                   ", tolerance " + fmt(tol);
    }
  }
  double worst_sharp = 0.0;
  std::string sharp_detail;
  for (int t = 0; t < laplace_setups; ++t) {
    const double h = unif(rng, 0.3, 1.0);
    const KernelSpec k(KernelFamily::kLaplace, 1, h);
    const auto target = random_empirical(rng, pick(rng, 5, 20), 1, 1.0, t % 2 == 1);
    const ParticleConfig x = cloud(rng, pick(rng, 3, 15), 1, 1.0);
    ctx.tally.observe(x, k);
    const FieldSpec spec(FieldKind::kDisplacement, target, k);
    const GridSpec g = window_1d(x, *target, 25.0 * h, 1025);
    const LaplacePopulation a = laplace_population_pair(x, spec, g, kStep);
    const LaplacePopulation b = laplace_population_pair(x, spec, g, 0.5 * kStep);
    const double fd_tol = std::abs(a.j.value - b.j.value);
    const double tol = std::max(1e-3 * std::abs(a.j_sharp.value),
                                2.0 * (a.j.refinement_error + a.j_sharp.refinement_error + fd_tol));
    const double ratio = std::abs(a.j.value - a.j_sharp.value) / tol;
    if (ratio >= worst_sharp) {
      worst_sharp = ratio;
      sharp_detail = "worst setup: J " + fmt(a.j.value) + " vs sharp form " + fmt(a.j_sharp.value) +
                     ", tolerance " + fmt(tol);
    }
  }
  return {make_check("kde_stein_identity", "KDE-averaged Stein identity", worst_kde, 1.0, worst_kde <= 1.0,
                     kde_detail + "; value is |difference| / tolerance"),
          make_check("sharp_stein_identity", "sharp-smoothed Stein identity", worst_sharp, 1.0, worst_sharp <= 1.0,
                     sharp_detail + "; value is |difference| / tolerance")};
}

std::vector<Check> check_quadrature_sandwich(VerifyContext& ctx, int setups) {
  Rng rng = ctx.rng("quadrature_sandwich");
  double worst_s = 0.0;
  double worst_v = 0.0;
  for (int t = 0; t < setups; ++t) {
    const double h = unif(rng, 0.3, 0.8);
    const KernelSpec k(KernelFamily::kGaussian, 1, h);
    const auto target = random_mixture(rng, 1);
    const ParticleConfig x = cloud(rng, pick(rng, 5, 30), 1, 1.0);
    ctx.tally.observe(x, k);
    const FieldSpec spec(FieldKind::kConservative, target, k);
    const double sn = s_n(x, spec);
    const double vn = v_n(x, spec);
    const double in = i_n(x, spec, window_1d(x, *target, 6.0 * h, 1025)).value;
    const HessianBounds hb = quadrature_constants(x, spec, window_grid(x, 3.0 * h, 257));
    const double m2 = k.moment(2);
    worst_s = std::max(worst_s, std::abs(sn - in) / (0.5 * hb.b_a * m2));
    worst_v = std::max(worst_v, std::abs(vn - in) / (0.5 * hb.b_v * m2));
  }
  return {make_check("quadrature_sandwich_stein", "point-evaluation quadrature error for S_N", worst_s, 1.0,
                     worst_s <= 1.0, "value is max |S_N - I_N| / (B_A m2(K_h) / 2)"),
          make_check("quadrature_sandwich_velocity", "point-evaluation quadrature error for V_N", worst_v, 1.0,
                     worst_v <= 1.0, "value is max |V_N - I_N| / (B_V m2(K_h) / 2)")};
}

std::vector<Check> check_laplace_coercivity(VerifyContext& ctx, int setups) {
  Rng rng = ctx.rng("laplace_coercivity");
  constexpr double kStep = 1e-4;
  double worst = std::numeric_limits<double>::infinity();
  std::string detail;
  for (int t = 0; t < setups; ++t) {
    const double h = unif(rng, 0.3, 1.0);
    const KernelSpec k(KernelFamily::kLaplace, 1, h);
    const auto target = random_empirical(rng, pick(rng, 5, 20), 1, 1.0, t % 2 == 1);
    const ParticleConfig x = cloud(rng, pick(rng, 3, 15), 1, 1.0, unif(rng, -1.0, 1.0));
    ctx.tally.observe(x, k);
    const FieldSpec spec(FieldKind::kDisplacement, target, k);
    const GridSpec g = window_1d(x, *target, 25.0 * h, 1025);
    const LaplacePopulation a = laplace_population_pair(x, spec, g, kStep);
    const LaplacePopulation b = laplace_population_pair(x, spec, g, 0.5 * kStep);
    const CoercivityConstants cc = coercivity_constants(a.lambda, a.big_l);
    const double tol = a.j.refinement_error + std::abs(a.j.value - b.j.value) +
                       cc.gamma * a.vcal.refinement_error + cc.beta * a.delta_sq.refinement_error;
    const double slack = a.j.value - (cc.gamma * a.vcal.value - cc.beta * a.delta_sq.value) + tol;
    if (slack < worst) {
      worst = slack;
      detail = "tightest setup: J " + fmt(a.j.value) + ", gamma V " + fmt(cc.gamma * a.vcal.value) +
               ", beta Delta^2 " + fmt(cc.beta * a.delta_sq.value) + ", window lambda " + fmt(a.lambda) +
               ", L " + fmt(a.big_l);
    }
  }
  return {make_check("laplace_coercivity", "Laplace coercivity J >= gamma V - beta Delta^2", worst, 0.0,
                     worst >= 0.0, detail + "; value is min slack incl. quadrature tolerance")};
}

std::vector<Check> check_self_bound(const VerifyContext& ctx) {
  const SelfBoundTally& t = ctx.tally;
  return {make_check("reciprocal_kde_self_bound", "reciprocal KDE self-bound R_N <= N h^d / K(0)", t.max_ratio, 1.0,
                     t.violations == 0 && t.configs > 0,
                     std::to_string(t.configs) + " configurations, " + std::to_string(t.violations) +
                         " violations; value is max R_N / bound")};
}

std::vector<Check> check_occupancy(VerifyContext& ctx, int configs, int trials) {
  Rng rng = ctx.rng("occupancy");
  int certificates = 0;
  int false_certificates = 0;
  int loo_certificates = 0;
  int loo_false = 0;
  for (int t = 0; t < configs; ++t) {
    const std::size_t d = pick(rng, 1, 2);
    const double h = unif(rng, 0.3, 1.5);
    const int fam = static_cast<int>(pick(rng, 0, 2));
    const KernelFamily family = fam == 0 ? KernelFamily::kGaussian
                                         : (fam == 1 ? KernelFamily::kLaplace : KernelFamily::kSmoothCompact);
    const KernelSpec k(family, d, h);
    const std::size_t n = pick(rng, 2, 40);
    // Alternate tight clusters (premise usually true) with scattered clouds.
    const double sd = t % 2 == 0 ? unif(rng, 0.01, 0.3) * h : unif(rng, 1.0, 6.0);
    const ParticleConfig x = cloud(rng, n, d, sd);
    ctx.tally.observe(x, k);
    const double r_k = family == KernelFamily::kSmoothCompact ? unif(rng, 0.2, 0.9) : unif(rng, 0.5, 2.0);
    Vector rim(d, 0.0);
    rim[0] = r_k;
    const double kappa = KernelSpec(family, d, 1.0).eval(rim);
    const std::vector<int> counts = occupancy_counts(x, h, r_k);
    const int min_count = *std::min_element(counts.begin(), counts.end());
    const double alpha_edge = min_count / (static_cast<double>(n) * std::pow(h, static_cast<double>(d)));
    const double alpha = alpha_edge * unif(rng, 0.5, 1.5);
    const OccupancyReport rep = occupancy_implication_check(x, k, r_k, kappa, alpha);
    if (rep.holds) {
      ++certificates;
      if (rep.false_certificate() || rep.r_n > rep.r_bound * (1.0 + 1e-12)) ++false_certificates;
    }
    if (family == KernelFamily::kLaplace) {
      const double r0 = unif(rng, 0.5, 2.0);
      const std::vector<int> c0 = occupancy_counts(x, h, r0);
      const int min_minus = *std::min_element(c0.begin(), c0.end()) - 1;
      const double alpha0 = std::max(1e-3, min_minus / (static_cast<double>(n - 1) * std::pow(h, static_cast<double>(d)))) *
                            unif(rng, 0.5, 1.5);
      const OccupancyReport lr = loo_occupancy_check(x, k, r0, alpha0);
      if (lr.holds) {
        ++loo_certificates;
        if (lr.false_certificate()) ++loo_false;
      }
    }
  }

  // Chernoff bound against i.i.d. uniform draws on [0, 1]: every ball of
  // radius r h <= 1 centred in [0, 1] has mass >= r h, so p0 = r.
  struct Regime {
    long long n;
    double h;
    double r;
  };
  const std::vector<Regime> regimes = {{300, 0.5, 1.0}, {200, 0.6, 1.0}, {100, 0.9, 1.0},
                                       {60, 0.3, 0.8},  {40, 0.1, 1.0},  {30, 0.05, 0.5}};
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::string chernoff_detail;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (const Regime& reg : regimes) {
    const double bound = chernoff_occupancy_bound(reg.r, reg.n, reg.h, 1);
    const double need = reg.r / 4.0 * static_cast<double>(reg.n) * reg.h;
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<double> pts(static_cast<std::size_t>(reg.n));
      for (double& v : pts) v = u01(rng);
      const ParticleConfig y(1, pts);
      const std::vector<int> counts = occupancy_counts(y, reg.h, reg.r);
      if (*std::min_element(counts.begin(), counts.end()) < need) ++failures;
    }
    const double freq = static_cast<double>(failures) / trials;
    const double se = std::sqrt(bound * (1.0 - bound) / trials);
    const double excess = freq - (bound + 3.0 * se);
    worst_excess = std::max(worst_excess, excess);
    chernoff_detail += "N=" + std::to_string(reg.n) + " h=" + fmt(reg.h) + " p0=" + fmt(reg.r) +
                       ": freq " + fmt(freq) + " bound " + fmt(bound) + "; ";
  }
  return {make_check("occupancy_false_certificates", "local occupancy implies reciprocal control",
                     false_certificates, 0.0, false_certificates == 0,
                     std::to_string(configs) + " configurations, " + std::to_string(certificates) +
                         " certificates issued"),
          make_check("loo_occupancy_false_certificates", "leave-one-out Laplace denominator control", loo_false, 0.0,
                     loo_false == 0, std::to_string(loo_certificates) + " certificates issued"),
          make_check("chernoff_domination", "i.i.d. occupancy probability bound", worst_excess, 0.0,
                     worst_excess <= 0.0,
                     chernoff_detail + "value is max freq - (bound + 3 stderr), " + std::to_string(trials) + " trials")};
}

std::vector<Check> check_euler_order(VerifyContext& ctx) {
  Rng rng = ctx.rng("euler_order");
  const std::size_t d = 2;
  const KernelSpec k(KernelFamily::kGaussian, d, 0.6);
  const auto target = std::make_shared<Measure>(
      Measure::mixture(ParticleConfig(2, {-1.0, 0.0, 1.0, 0.0}), {0.3, 0.3}, {0.5, 0.5}));
  const FieldSpec spec(FieldKind::kConservative, target, k);
  const ParticleConfig x0 = cloud(rng, 20, d, 0.7);
  const std::vector<double> etas = {0.04, 0.02, 0.01, 0.005};
  std::vector<double> errs;
  std::string detail;
  for (double eta : etas) {
    IntegratorParams p;
    p.eta = eta;
    p.t_end = 1.0;
    p.record_every = 1000000;
    const Trajectory euler = integrate(x0, spec, p);
    IntegratorParams pr = p;
    pr.eta = eta / 100.0;
    const Trajectory ref = integrate_rk4(x0, spec, pr);
    for (const ParticleConfig& s : euler.states) ctx.tally.observe(s, k);
    errs.push_back(rms_distance(euler.states.back(), ref.states.back()));
    detail += "eta " + fmt(eta) + ": " + fmt(errs.back()) + "; ";
  }
  const double slope = loglog_slope(etas, errs);
  return {make_check("euler_order", "explicit Euler first-order error", slope, 0.2,
                     slope >= 0.8 && slope <= 1.2, detail + "value is log-log slope, accepted in [0.8, 1.2]")};
}

std::vector<Check> check_one_step_w2(VerifyContext& ctx, int configs) {
  Rng rng = ctx.rng("one_step_w2");
  double worst = -std::numeric_limits<double>::infinity();
  int strict = 0;
  for (int t = 0; t < configs; ++t) {
    const std::size_t d = random_dim(rng);
    const std::size_t n = pick(rng, 1, 64);
    const double h = unif(rng, 0.3, 1.5);
    const double eta = unif(rng, 0.01, 0.3);
    const ParticleConfig x = cloud(rng, n, d, 1.0);
    const int kind = static_cast<int>(pick(rng, 0, n >= 2 ? 2 : 1));
    std::unique_ptr<FieldSpec> spec;
    if (kind == 0) {
      spec = std::make_unique<FieldSpec>(FieldKind::kConservative, random_mixture(rng, d),
                                         KernelSpec(KernelFamily::kGaussian, d, h));
    } else {
      const auto target = random_empirical(rng, pick(rng, 3, 30), d, 1.0, false);
      spec = std::make_unique<FieldSpec>(kind == 1 ? FieldKind::kDisplacement : FieldKind::kLaplaceLoo, target,
                                         KernelSpec(KernelFamily::kLaplace, d, h));
    }
    ctx.tally.observe(x, spec->kernel());
    const W2Check w = one_step_w2_check(x, *spec, eta);
    worst = std::max(worst, w.exact_w2 - w.coupling_bound);
    if (w.exact_w2 < w.coupling_bound - 1e-12) ++strict;
  }
  return {make_check("one_step_w2", "identity coupling bounds the one-step W2 displacement", worst, 1e-12,
                     worst <= 1e-12,
                     std::to_string(configs) + " configurations, strict in " + std::to_string(strict) +
                         "; value is max exact_w2 - eta sqrt(V_N)")};
}

double numeric_optimal_bandwidth(double a, double c, double beta, int d, double n) {
  const double dd = static_cast<double>(d);
  auto f = [&](double logh) {
    const double h = std::exp(logh);
    return a / (n * std::pow(h, dd + 2.0)) + c * std::pow(h, 2.0 - beta);
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = std::log(1e-8);
  double hi = std::log(1e4);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

std::vector<Check> check_balanced_bandwidth(VerifyContext& ctx, int draws) {
  Rng rng = ctx.rng("balanced_bandwidth");
  double worst_balance = 0.0;
  double worst_numeric = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double a = log_unif(rng, 0.1, 10.0);
    const double c = log_unif(rng, 0.1, 10.0);
    const double beta = unif(rng, 0.0, 1.9);
    const int d = static_cast<int>(pick(rng, 1, 5));
    const double n = std::round(log_unif(rng, 10.0, 1e6));
    const OptimalBandwidth opt = optimal_bandwidth(a, c, beta, d, n);
    const double rhs = (2.0 - beta) / (static_cast<double>(d) + 2.0) * opt.quad_term;
    worst_balance = std::max(worst_balance, std::abs(opt.self_term - rhs) / rhs);
    const double hn = numeric_optimal_bandwidth(a, c, beta, d, n);
    worst_numeric = std::max(worst_numeric, std::abs(hn - opt.h) / opt.h);
  }
  return {make_check("balanced_bandwidth_identity", "balanced terms at the optimal bandwidth", worst_balance, 1e-10,
                     worst_balance <= 1e-10, std::to_string(draws) + " draws"),
          make_check("optimal_bandwidth_numeric", "closed-form optimal bandwidth matches a numeric minimizer",
                     worst_numeric, 1e-6, worst_numeric <= 1e-6)};
}

std::vector<Check> check_residual_trend(VerifyContext& ctx, int seeds) {
  const auto target = std::make_shared<Measure>(
      Measure::mixture(ParticleConfig(1, {-1.5, 1.5}), {0.25, 0.25}, {0.5, 0.5}));
  const Measure mu0 = Measure::mixture(ParticleConfig(1, {0.0}), {1.0});
  auto average_v = [&](std::size_t n, int s) {
    const double h = optimal_bandwidth(1.0, 1.0, 0.0, 1, static_cast<double>(n)).h;
    const KernelSpec k(KernelFamily::kGaussian, 1, h);
    const FieldSpec spec(FieldKind::kConservative, target, k);
    Rng rng = ctx.rng("residual_trend/" + std::to_string(s) + "/" + std::to_string(n));
    const ParticleConfig x0 = mu0.sample(n, rng);
    IntegratorParams p;
    p.eta = 0.02;
    p.t_end = 4.0;
    std::vector<double> vs;
    const Trajectory tr = integrate(x0, spec, p, [&](double t, const ParticleConfig& x) {
      ctx.tally.observe(x, k);
      DiagnosticsRecord r;
      r.t = t;
      r.v_n = v_n(x, spec);
      return r;
    });
    double total = 0.0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
      total += 0.5 * (tr.records[i].v_n + tr.records[i - 1].v_n) * (tr.times[i] - tr.times[i - 1]);
    }
    return total / p.t_end;
  };
  double small = 0.0;
  double large = 0.0;
  for (int s = 0; s < seeds; ++s) {
    small += average_v(50, s) / seeds;
    large += average_v(400, s) / seeds;
  }
  return {make_check("residual_drift_trend", "time-averaged residual velocity decreases with N", large, small,
                     large < small,
                     "mean over " + std::to_string(seeds) + " seeds: N=50 " + fmt(small) + ", N=400 " + fmt(large) +
                         "; value is the N=400 average, tolerance the N=50 average")};
}

std::vector<Check> check_figure1_contrast(VerifyContext& ctx, const std::string& out_dir) {
  Figure1Options opt;
  opt.seed = ctx.seed == 0 ? opt.seed : ctx.seed;
  const Figure1Result r = run_figure1(out_dir, opt);
  const double ratio = r.conservative_curl_max > 0.0 ? r.laplace_curl_max / r.conservative_curl_max
                                                     : std::numeric_limits<double>::infinity();
  return {make_check("figure1_conservative_curl", "conservative field is curl-free", r.conservative_curl_max, 1e-4,
                     r.conservative_curl_max <= 1e-4),
          make_check("figure1_laplace_curl_contrast", "Laplace displacement field is not conservative", ratio, 10.0,
                     ratio >= 10.0,
                     "laplace max |curl| " + fmt(r.laplace_curl_max) + "; value is the ratio to the conservative max"),
          make_check("figure1_tracers", "same starting points, different terminal positions", r.terminal_separation,
                     0.0, r.tracer_starts_equal && r.terminal_separation > 0.0,
                     std::string("starts equal: ") + (r.tracer_starts_equal ? "yes" : "no"))};
}

Json SuiteReport::to_json() const {
  Json j;
  j["suite"] = suite;
  j["seed"] = seed;
  Json arr = Json::array();
  for (const Check& c : checks) arr.push_back(check_to_json(c));
  j["checks"] = arr;
  j["pass"] = pass;
  return j;
}

SuiteReport run_suite(const std::string& suite, std::uint64_t seed) {
  VerifyContext ctx;
  ctx.seed = seed;
  SuiteReport rep;
  rep.suite = suite;
  rep.seed = seed;
  auto add = [&](std::vector<Check> cs) {
    for (Check& c : cs) rep.checks.push_back(std::move(c));
  };
  if (suite == "identities") {
    add(check_gaussian_proportionality(ctx));
    add(check_sharp_gradient(ctx));
    add(check_scale_radius(ctx));
    add(check_decomposition(ctx));
    add(check_divergence_pair(ctx));
    add(check_stein_identities(ctx));
  } else if (suite == "bounds") {
    add(check_quadrature_sandwich(ctx));
    add(check_laplace_coercivity(ctx));
    add(check_one_step_w2(ctx));
    add(check_balanced_bandwidth(ctx));
    add(check_self_bound(ctx));
  } else if (suite == "occupancy") {
    add(check_occupancy(ctx));
    add(check_self_bound(ctx));
  } else if (suite == "euler") {
    add(check_euler_order(ctx));
  } else {
    fail(ErrorCode::kValidation, "unknown suite '" + suite + "' (identities, bounds, occupancy, euler)");
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.pass; });
  return rep;
}

}  // namespace driftlab
