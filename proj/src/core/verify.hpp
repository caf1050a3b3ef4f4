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

#ifndef DRIFTLAB_CORE_VERIFY_HPP_
#define DRIFTLAB_CORE_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/experiment.hpp"

namespace driftlab {

struct Check {
  std::string name;
  std::string anchor;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

Json check_to_json(const Check& c);

// Counts every configuration evaluated by the suites against the
// reciprocal-KDE self-bound R_N <= N h^d / K(0).
struct SelfBoundTally {
  std::size_t configs = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;

  void observe(const ParticleConfig& config, const KernelSpec& k);
};

struct VerifyContext {
  std::uint64_t seed = 0;
  SelfBoundTally tally;

  // Independent generator per named check.
  Rng rng(const std::string& tag) const;
};

std::vector<Check> check_gaussian_proportionality(VerifyContext& ctx, int draws = 200);
std::vector<Check> check_sharp_gradient(VerifyContext& ctx, int draws = 500);
std::vector<Check> check_scale_radius(VerifyContext& ctx, int draws = 200);
std::vector<Check> check_decomposition(VerifyContext& ctx, int draws = 200);
std::vector<Check> check_divergence_pair(VerifyContext& ctx, int draws_per_case = 5);
std::vector<Check> check_stein_identities(VerifyContext& ctx, int gaussian_setups = 6,
                                          int laplace_setups = 4);
std::vector<Check> check_quadrature_sandwich(VerifyContext& ctx, int setups = 20);
std::vector<Check> check_laplace_coercivity(VerifyContext& ctx, int setups = 50);
std::vector<Check> check_self_bound(const VerifyContext& ctx);
std::vector<Check> check_occupancy(VerifyContext& ctx, int configs = 500, int trials = 2000);
std::vector<Check> check_euler_order(VerifyContext& ctx);
std::vector<Check> check_one_step_w2(VerifyContext& ctx, int configs = 100);
std::vector<Check> check_balanced_bandwidth(VerifyContext& ctx, int draws = 20);
std::vector<Check> check_residual_trend(VerifyContext& ctx, int seeds = 5);
std::vector<Check> check_figure1_contrast(VerifyContext& ctx, const std::string& out_dir);

// Golden-section minimizer of A / (N h^{d+2}) + C h^{2-beta} over log h.
double numeric_optimal_bandwidth(double a, double c, double beta, int d, double n);

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool pass = false;
  Json to_json() const;
};

// suite in {identities, bounds, occupancy, euler}.
SuiteReport run_suite(const std::string& suite, std::uint64_t seed);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_VERIFY_HPP_
