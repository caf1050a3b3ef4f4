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

#ifndef DRIFTLAB_CORE_EXPERIMENT_HPP_
#define DRIFTLAB_CORE_EXPERIMENT_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/diagnostics.hpp"
#include "core/dynamics.hpp"
#include "core/io.hpp"

namespace driftlab {

using Json = nlohmann::json;

struct DiagnosticsToggles {
  bool i_n = false;
  bool curl = false;
  bool laplace = false;
  bool bounds = false;
  int grid_points = 129;
  std::size_t mc_samples = 4000;
  int curl_points = 41;
  double occupancy_radius = 1.0;
  std::optional<double> pad;
};

struct BandwidthModel {
  double a = 1.0;
  double c = 1.0;
  double beta = 0.0;
};

struct OutputPaths {
  std::string trajectory = "trajectory.csv";
  std::string diagnostics = "diagnostics.csv";
  std::string meta = "meta.json";
  std::string tracers = "tracers.csv";
};

// Parsed and validated experiment description. `source` keeps the document
// as given so reports can embed it and its hash.
struct ExperimentConfig {
  FieldKind field = FieldKind::kConservative;
  KernelFamily kernel = KernelFamily::kGaussian;
  ModelSource model_source = ModelSource::kFullConfig;
  std::size_t dim = 1;
  double h = 0.5;
  IntegratorParams integrator;
  std::optional<std::size_t> n;
  std::uint64_t seed = 0;
  Json target;
  Json initial;
  DiagnosticsToggles diagnostics;
  std::vector<std::size_t> tracers;
  OutputPaths output;
  std::optional<double> kappa0;
  std::optional<BandwidthModel> bandwidth_model;
  std::string base_dir;
  Json source;

  static ExperimentConfig from_json(const Json& doc, const std::string& base_dir = ".");
  static ExperimentConfig load(const std::string& path);
  Json to_json() const;
  std::uint64_t hash() const;
};

// Materialized experiment: measures, initial state, field.
struct Experiment {
  ExperimentConfig config;
  std::shared_ptr<const Measure> target;
  std::optional<Measure> initial_mixture;
  ParticleConfig initial;
  std::shared_ptr<const FieldSpec> spec;
  std::string target_kind;
  GridSpec window;

  static Experiment build(const ExperimentConfig& config);
};

// Quadrature pad used for windows around particles and data: 6h, widened to
// 25h under the Laplace kernel whose tails decay only like exp(-r / h).
double default_pad(const KernelSpec& k);

DiagnosticsRecord compute_record(const Experiment& exp, double t, const ParticleConfig& x);

struct SimulationResult {
  Trajectory trajectory;
  Json meta;
};

SimulationResult run_experiment(const Experiment& exp);
// Runs and writes trajectory, diagnostics, meta and tracer files into out_dir.
SimulationResult simulate_to_dir(const ExperimentConfig& config, const std::string& out_dir);

double max_abs_curl(const FieldSpec& spec, const ParticleConfig& config, const GridSpec& grid);

struct Figure1Options {
  double h = 0.55;
  std::size_t n_model = 80;
  std::size_t n_data = 200;
  double eta = 0.01;
  std::size_t steps = 1500;
  int record_every = 10;
  int curl_points = 81;
  double curl_half_width = 2.0;
  std::uint64_t seed = 7;
};

struct Figure1Result {
  double conservative_curl_max = 0.0;
  double laplace_curl_max = 0.0;
  bool tracer_starts_equal = false;
  double terminal_separation = 0.0;
  Json meta;
};

Figure1Result run_figure1(const std::string& out_dir, const Figure1Options& options);

struct SweepPoint {
  double value = 0.0;
  double metric = 0.0;
  bool ok = false;
  std::string status;
};

struct SweepResult {
  std::string param;
  std::vector<SweepPoint> points;
  double slope = 0.0;
  Json summary;
};

// param in {N, h, eta}. N/h sweeps report the time-averaged V_N; eta sweeps
// report the endpoint distance to an RK4 run at eta / 100.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values, const std::string& out_dir);

std::vector<double> parse_value_list(const std::string& csv);

// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_EXPERIMENT_HPP_
