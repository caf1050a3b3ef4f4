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

#ifndef DRIFTLAB_CORE_NUMERICS_HPP_
#define DRIFTLAB_CORE_NUMERICS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "core/types.hpp"

namespace driftlab {

using ScalarField = std::function<double(ConstVec)>;
using VectorField = std::function<Vector(ConstVec)>;
using Rng = std::mt19937_64;

enum class QuadratureRule { kTrapezoid, kSimpson };

// Tensor-product grid on the box [lo, hi]. Supported for d <= 2.
struct GridSpec {
  Vector lo;
  Vector hi;
  int points_per_dim = 129;
  QuadratureRule rule = QuadratureRule::kSimpson;

  std::size_t dim() const { return lo.size(); }
  void validate() const;
  std::size_t node_count() const;
  // Coordinates of node `flat`; last axis varies fastest.
  Vector node(std::size_t flat) const;
};

// Bounding box of `points` padded by `pad` on every side.
GridSpec window_grid(const ParticleConfig& points, double pad, int points_per_dim,
                     QuadratureRule rule = QuadratureRule::kSimpson);
GridSpec window_grid(const std::vector<const ParticleConfig*>& clouds, double pad,
                     int points_per_dim, QuadratureRule rule = QuadratureRule::kSimpson);

struct QuadratureResult {
  double value = 0.0;
  // |value - value at half resolution|.
  double refinement_error = 0.0;
};

QuadratureResult grid_integrate(const ScalarField& f, const GridSpec& grid);

// Integrates `count` integrands sharing one node evaluation. `f` writes all
// integrand values at a node into its output span.
std::vector<QuadratureResult> grid_integrate_many(
    const std::function<void(ConstVec, MutVec)>& f, std::size_t count, const GridSpec& grid);

struct McResult {
  double value = 0.0;
  double stderr_value = 0.0;
};

// Importance-sampling estimate of \int f using draws from `sampler` whose
// density is `weight`.
McResult mc_integrate(const ScalarField& f, const std::function<Vector(Rng&)>& sampler,
                      const ScalarField& weight, std::size_t n, std::uint64_t seed);

// Central-difference oracles. When `step` is empty the relative default is
// used: 1e-4 (1 + |z|) for first-order stencils, 1e-3 (1 + |z|) for Hessians.
double default_fd_step(ConstVec z);
double default_hessian_step(ConstVec z);

Vector fd_gradient(const ScalarField& f, ConstVec z, std::optional<double> step = {});
double fd_divergence(const VectorField& f, ConstVec z, std::optional<double> step = {});
// Row-major d x d, symmetrized.
std::vector<double> fd_hessian(const ScalarField& f, ConstVec z, std::optional<double> step = {});
// Row-major d x d, J(r, c) = d f_r / d z_c.
std::vector<double> fd_jacobian(const VectorField& f, ConstVec z, std::optional<double> step = {});

// Largest |eigenvalue| of a symmetric matrix; closed form for d <= 2.
double symmetric_operator_norm(std::span<const double> m, std::size_t d);
// Largest singular value of a general d x d matrix via power iteration on
// J^T J.
double operator_norm(std::span<const double> m, std::size_t d, int iterations = 50);

// Max over grid nodes of the operator norm of the FD Hessian of f.
double hessian_sup_estimate(const ScalarField& f, const GridSpec& grid,
                            std::optional<double> step = {});

// sqrt of the minimal mean squared distance over all matchings of two
// equally weighted clouds of the same size (at most 256 points).
double exact_w2_empirical(const ParticleConfig& a, const ParticleConfig& b);

// Minimal-cost perfect matching on an n x n row-major cost matrix; returns
// the column assigned to each row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_NUMERICS_HPP_
