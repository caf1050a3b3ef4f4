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

#include "core/numerics.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace driftlab {
namespace {

std::vector<double> rule_weights(int n, QuadratureRule rule, double spacing) {
  std::vector<double> w(static_cast<std::size_t>(n), spacing);
  if (rule == QuadratureRule::kTrapezoid) {
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }
  for (int i = 0; i < n; ++i) {
    const double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[static_cast<std::size_t>(i)] = c * spacing / 3.0;
  }
  return w;
}

// Integrates sampled values laid out on an n^d tensor grid.
void accumulate_tensor(const GridSpec& g, int n, const std::vector<double>& samples,
                       std::size_t count, std::vector<double>& out) {
  const std::size_t d = g.dim();
  std::vector<std::vector<double>> w(d);
  for (std::size_t a = 0; a < d; ++a) {
    w[a] = rule_weights(n, g.rule, (g.hi[a] - g.lo[a]) / (n - 1));
  }
  out.assign(count, 0.0);
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t total = d == 1 ? nn : nn * nn;
  for (std::size_t flat = 0; flat < total; ++flat) {
    const double weight = d == 1 ? w[0][flat] : w[0][flat / nn] * w[1][flat % nn];
    for (std::size_t c = 0; c < count; ++c) out[c] += weight * samples[flat * count + c];
  }
}

Vector node_at(const GridSpec& g, int n, std::size_t flat) {
  const std::size_t d = g.dim();
  Vector z(d);
  const std::size_t nn = static_cast<std::size_t>(n);
  std::size_t rem = flat;
  for (std::size_t a = d; a-- > 0;) {
    const std::size_t idx = rem % nn;
    rem /= nn;
    z[a] = g.lo[a] + (g.hi[a] - g.lo[a]) * static_cast<double>(idx) / (n - 1);
  }
  return z;
}

std::vector<double> sample_grid(const std::function<void(ConstVec, MutVec)>& f,
                                std::size_t count, const GridSpec& g, int n) {
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t total = g.dim() == 1 ? nn : nn * nn;
  std::vector<double> samples(total * count);
  for (std::size_t flat = 0; flat < total; ++flat) {
    const Vector z = node_at(g, n, flat);
    MutVec out(samples.data() + flat * count, count);
    f(z, out);
    for (double v : out) {
      if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "non-finite integrand sample on grid");
    }
  }
  return samples;
}

}  // namespace

void GridSpec::validate() const {
  if (lo.empty() || lo.size() != hi.size()) {
    fail(ErrorCode::kValidation, "grid bounds must be non-empty and of equal dimension");
  }
  if (lo.size() > 2) fail(ErrorCode::kUnsupportedDimension, "grid quadrature supports d <= 2");
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (!(lo[a] < hi[a])) fail(ErrorCode::kValidation, "grid requires lo < hi componentwise");
  }
  if (points_per_dim < 16) fail(ErrorCode::kValidation, "grid requires points_per_dim >= 16");
  if (rule == QuadratureRule::kSimpson && points_per_dim % 2 == 0) {
    fail(ErrorCode::kValidation, "Simpson rule requires an odd number of points per dimension");
  }
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (std::size_t a = 0; a < dim(); ++a) n *= static_cast<std::size_t>(points_per_dim);
  return n;
}

Vector GridSpec::node(std::size_t flat) const { return node_at(*this, points_per_dim, flat); }

GridSpec window_grid(const std::vector<const ParticleConfig*>& clouds, double pad,
                     int points_per_dim, QuadratureRule rule) {
  GridSpec g;
  g.points_per_dim = points_per_dim;
  g.rule = rule;
  for (const ParticleConfig* c : clouds) {
    if (c == nullptr || c->empty()) continue;
    if (g.lo.empty()) {
      g.lo.assign(c->dim(), std::numeric_limits<double>::infinity());
      g.hi.assign(c->dim(), -std::numeric_limits<double>::infinity());
    }
    for (std::size_t i = 0; i < c->size(); ++i) {
      const ConstVec p = c->point(i);
      for (std::size_t a = 0; a < p.size(); ++a) {
        g.lo[a] = std::min(g.lo[a], p[a]);
        g.hi[a] = std::max(g.hi[a], p[a]);
      }
    }
  }
  if (g.lo.empty()) fail(ErrorCode::kValidation, "window requires at least one point");
  for (std::size_t a = 0; a < g.lo.size(); ++a) {
    g.lo[a] -= pad;
    g.hi[a] += pad;
  }
  return g;
}

GridSpec window_grid(const ParticleConfig& points, double pad, int points_per_dim,
                     QuadratureRule rule) {
  return window_grid(std::vector<const ParticleConfig*>{&points}, pad, points_per_dim, rule);
}

std::vector<QuadratureResult> grid_integrate_many(
    const std::function<void(ConstVec, MutVec)>& f, std::size_t count, const GridSpec& grid) {
  grid.validate();
  const int n = grid.points_per_dim;
  const std::vector<double> fine = sample_grid(f, count, grid, n);
  std::vector<double> fine_sum;
  accumulate_tensor(grid, n, fine, count, fine_sum);

  // Half resolution reuses every other node when the subgrid is admissible for
  // the rule; otherwise it is sampled afresh.
  int nc = (n + 1) / 2;
  std::vector<double> coarse;
  const bool nested = grid.rule == QuadratureRule::kTrapezoid ? (n % 2 == 1) : (nc % 2 == 1);
  if (nested) {
    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t ncc = static_cast<std::size_t>(nc);
    const std::size_t total = grid.dim() == 1 ? ncc : ncc * ncc;
    coarse.resize(total * count);
    for (std::size_t flat = 0; flat < total; ++flat) {
      const std::size_t src = grid.dim() == 1 ? 2 * flat : (2 * (flat / ncc)) * nn + 2 * (flat % ncc);
      for (std::size_t c = 0; c < count; ++c) coarse[flat * count + c] = fine[src * count + c];
    }
  } else {
    if (grid.rule == QuadratureRule::kSimpson && nc % 2 == 0) ++nc;
    coarse = sample_grid(f, count, grid, nc);
  }
  std::vector<double> coarse_sum;
  accumulate_tensor(grid, nc, coarse, count, coarse_sum);

  std::vector<QuadratureResult> out(count);
  for (std::size_t c = 0; c < count; ++c) {
    out[c].value = fine_sum[c];
    out[c].refinement_error = std::abs(fine_sum[c] - coarse_sum[c]);
  }
  return out;
}

QuadratureResult grid_integrate(const ScalarField& f, const GridSpec& grid) {
  return grid_integrate_many([&f](ConstVec z, MutVec out) { out[0] = f(z); }, 1, grid).front();
}

McResult mc_integrate(const ScalarField& f, const std::function<Vector(Rng&)>& sampler,
                      const ScalarField& weight, std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorCode::kValidation, "Monte Carlo budget must be positive");
  Rng rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vector z = sampler(rng);
    const double w = weight(z);
    if (!(w > 0.0)) fail(ErrorCode::kDomain, "sampler density vanishes at a drawn sample");
    const double v = f(z) / w;
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "non-finite Monte Carlo sample");
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  McResult r;
  r.value = mean;
  r.stderr_value = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return r;
}

double default_fd_step(ConstVec z) { return 1e-4 * (1.0 + norm(z)); }
double default_hessian_step(ConstVec z) { return 1e-3 * (1.0 + norm(z)); }

namespace {
void check_finite(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "non-finite value on finite-difference stencil");
}
}  // namespace

Vector fd_gradient(const ScalarField& f, ConstVec z, std::optional<double> step) {
  const double s = step.value_or(default_fd_step(z));
  Vector p(z.begin(), z.end());
  Vector g(z.size());
  for (std::size_t a = 0; a < z.size(); ++a) {
    p[a] = z[a] + s;
    const double fp = f(p);
    p[a] = z[a] - s;
    const double fm = f(p);
    p[a] = z[a];
    check_finite(fp);
    check_finite(fm);
    g[a] = (fp - fm) / (2.0 * s);
  }
  return g;
}

double fd_divergence(const VectorField& f, ConstVec z, std::optional<double> step) {
  const double s = step.value_or(default_fd_step(z));
  Vector p(z.begin(), z.end());
  double div = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    p[a] = z[a] + s;
    const double fp = f(p)[a];
    p[a] = z[a] - s;
    const double fm = f(p)[a];
    p[a] = z[a];
    check_finite(fp);
    check_finite(fm);
    div += (fp - fm) / (2.0 * s);
  }
  return div;
}

std::vector<double> fd_jacobian(const VectorField& f, ConstVec z, std::optional<double> step) {
  const double s = step.value_or(default_fd_step(z));
  const std::size_t d = z.size();
  Vector p(z.begin(), z.end());
  std::vector<double> jac(d * d);
  for (std::size_t c = 0; c < d; ++c) {
    p[c] = z[c] + s;
    const Vector fp = f(p);
    p[c] = z[c] - s;
    const Vector fm = f(p);
    p[c] = z[c];
    for (std::size_t r = 0; r < d; ++r) {
      check_finite(fp[r]);
      check_finite(fm[r]);
      jac[r * d + c] = (fp[r] - fm[r]) / (2.0 * s);
    }
  }
  return jac;
}

std::vector<double> fd_hessian(const ScalarField& f, ConstVec z, std::optional<double> step) {
  const double s = step.value_or(default_hessian_step(z));
  const std::size_t d = z.size();
  Vector p(z.begin(), z.end());
  const double f0 = f(z);
  check_finite(f0);
  std::vector<double> hes(d * d);
  for (std::size_t a = 0; a < d; ++a) {
    p[a] = z[a] + s;
    const double fp = f(p);
    p[a] = z[a] - s;
    const double fm = f(p);
    p[a] = z[a];
    check_finite(fp);
    check_finite(fm);
    hes[a * d + a] = (fp - 2.0 * f0 + fm) / (s * s);
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      double acc = 0.0;
      for (int sa : {1, -1}) {
        for (int sb : {1, -1}) {
          p[a] = z[a] + sa * s;
          p[b] = z[b] + sb * s;
          const double v = f(p);
          check_finite(v);
          acc += sa * sb * v;
        }
      }
      p[a] = z[a];
      p[b] = z[b];
      hes[a * d + b] = hes[b * d + a] = acc / (4.0 * s * s);
    }
  }
  return hes;
}

double symmetric_operator_norm(std::span<const double> m, std::size_t d) {
  if (d == 1) return std::abs(m[0]);
  if (d == 2) {
    const double a = m[0];
    const double b = 0.5 * (m[1] + m[2]);
    const double c = m[3];
    const double mid = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    return std::max(std::abs(mid + rad), std::abs(mid - rad));
  }
  return operator_norm(m, d, 200);
}

double operator_norm(std::span<const double> m, std::size_t d, int iterations) {
  if (d == 1) return std::abs(m[0]);
  Vector v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  Vector jv(d);
  Vector jtjv(d);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += m[r * d + c] * v[c];
      jv[r] = s;
    }
    for (std::size_t c = 0; c < d; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += m[r * d + c] * jv[r];
      jtjv[c] = s;
    }
    const double n = norm(jtjv);
    if (n == 0.0) return 0.0;
    for (std::size_t c = 0; c < d; ++c) v[c] = jtjv[c] / n;
  }
  // Rayleigh quotient of the converged direction.
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += m[r * d + c] * v[c];
    jv[r] = s;
  }
  return norm(jv);
}

double hessian_sup_estimate(const ScalarField& f, const GridSpec& grid,
                            std::optional<double> step) {
  grid.validate();
  const std::size_t d = grid.dim();
  double sup = 0.0;
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
    const Vector z = grid.node(flat);
    const std::vector<double> h = fd_hessian(f, z, step);
    sup = std::max(sup, symmetric_operator_norm(h, d));
  }
  return sup;
}

namespace {
double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  // Seed with a uniform split so that narrow features are not skipped.
  constexpr int kPanels = 64;
  double total = 0.0;
  const double width = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * width;
    const double hi = lo + width;
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = width / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_step(f, lo, hi, fa, fm, fb, whole, tol / kPanels, max_depth);
  }
  return total;
}

}  // namespace driftlab
