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


#include <filesystem>
#include <sstream>
#include <string>

#include <doctest.h>

#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/io.hpp"
#include "core/verify.hpp"
#include "generators.hpp"

using namespace driftlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("driftlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Json minimal_config() {
  return Json::parse(R"({
    "field": "conservative", "kernel": "gaussian", "dim": 1, "h": 0.5,
    "eta": 0.05, "t_end": 0.5, "N": 1, "seed": 3,
    "target": {"type": "points", "points": [[1.0]]},
    "initial": {"type": "points", "points": [[0.0]]}
  })");
}

Json toy_config() {
  return Json::parse(R"({
    "field": "conservative", "kernel": "gaussian", "dim": 1, "h": 0.4,
    "eta": 0.02, "t_end": 1.0, "N": 30, "seed": 11, "record_every": 5,
    "target": {"type": "mixture", "means": [[-1.5], [1.5]], "variances": [0.25, 0.25]},
    "initial": {"type": "mixture", "means": [[0.0]], "variances": [1.0]},
    "diagnostics": {"i_n": true, "bounds": true},
    "tracers": [0, 5]
  })");
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

std::size_t column_count(const std::string& csv) {
  const std::string header = csv.substr(0, csv.find('\n'));
  return static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round-trip through text") {
  driftlab::testing::Gen gen;
  for (int t = 0; t < 1000; ++t) {
    const double v = gen.uniform(-1.0, 1.0) * std::pow(10.0, gen.uniform(-300, 300));
    CHECK(parse_double(format_double(v), "test") == v);
  }
  CHECK_THROWS_AS(parse_double("1.5x", "test"), Error);
}

TEST_CASE("trajectory CSV round-trips exactly") {
  driftlab::testing::Gen gen;
  const ParticleConfig x0 = gen.cloud(7, 2);
  const FieldSpec spec(FieldKind::kConservative, gen.mixture(2), KernelSpec(KernelFamily::kGaussian, 2, 0.5));
  IntegratorParams p;
  p.eta = 0.013;
  p.t_end = 0.3;
  const Trajectory tr = integrate(x0, spec, p);
  const std::string csv = trajectory_csv(tr);
  CHECK(csv.substr(0, csv.find('\n')) == "t,particle_id,x_0,x_1");
  const Trajectory back = parse_trajectory_csv(csv);
  CHECK(back.times == tr.times);
  CHECK(back.states == tr.states);
}

TEST_CASE("measure CSV with weights") {
  const fs::path dir = scratch("measure_csv");
  write_text_file((dir / "w.csv").string(), "x_0,weight\n0.0,1\n1.0,3\n");
  const Measure m = read_measure_csv((dir / "w.csv").string(), 1);
  CHECK(m.size() == 2);
  CHECK(m.weights()[1] == doctest::Approx(0.75));
  write_text_file((dir / "p.csv").string(), "0.0,1.0\n2.0,3.0\n");
  CHECK(read_measure_csv((dir / "p.csv").string(), 2).uniform());
  CHECK(code_of([&] { (void)read_measure_csv((dir / "missing.csv").string(), 1); }) == ErrorCode::kIo);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(ExperimentConfig::from_json(minimal_config()));
  Json bad = minimal_config();
  bad["colour"] = "blue";
  CHECK(code_of([&] { (void)ExperimentConfig::from_json(bad); }) == ErrorCode::kValidation);
  bad = minimal_config();
  bad["kernel"] = "laplace";
  CHECK(code_of([&] { (void)ExperimentConfig::from_json(bad); }) == ErrorCode::kValidation);
  bad = minimal_config();
  bad["diagnostics"] = {{"curl", true}};
  CHECK(code_of([&] { (void)ExperimentConfig::from_json(bad); }) == ErrorCode::kValidation);
  bad = minimal_config();
  bad.erase("h");
  CHECK(code_of([&] { (void)ExperimentConfig::from_json(bad); }) == ErrorCode::kValidation);
  bad = minimal_config();
  bad["field"] = "laplace_loo";
  CHECK(code_of([&] { (void)ExperimentConfig::from_json(bad); }) == ErrorCode::kValidation);
}

TEST_CASE("config hash tracks content") {
  const ExperimentConfig a = ExperimentConfig::from_json(minimal_config());
  Json other = minimal_config();
  other["seed"] = 4;
  CHECK(a.hash() == ExperimentConfig::from_json(minimal_config()).hash());
  CHECK(a.hash() != ExperimentConfig::from_json(other).hash());
}

TEST_CASE("minimal simulation writes three deterministic files") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(minimal_config());
  const fs::path a = scratch("sim_a");
  const fs::path b = scratch("sim_b");
  simulate_to_dir(cfg, a.string());
  simulate_to_dir(cfg, b.string());
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"diagnostics.csv", "meta.json", "trajectory.csv"});
  for (const std::string& n : names) CHECK(read_text_file((a / n).string()) == read_text_file((b / n).string()));

  // The single particle follows x' = (1 - x) / h^2 under Euler.
  const Trajectory tr = parse_trajectory_csv(read_text_file((a / "trajectory.csv").string()));
  double x = 0.0;
  for (int k = 0; k < 10; ++k) x += 0.05 * (1.0 - x) / 0.25;
  CHECK(tr.states.back().point(0)[0] == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("reports embed hash, seed and window") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(toy_config());
  const fs::path dir = scratch("sim_toy");
  const SimulationResult res = simulate_to_dir(cfg, dir.string());
  const Json meta = Json::parse(read_text_file((dir / "meta.json").string()));
  CHECK(meta.contains("config_hash"));
  CHECK(meta.at("seed") == 11);
  CHECK(meta.contains("quadrature_window"));
  CHECK(meta.contains("bounds"));
  CHECK(meta.at("target_kind") == "gaussian_mixture");
  const std::string diag = read_text_file((dir / "diagnostics.csv").string());
  CHECK(diag.substr(0, diag.find('\n')) == "t,v_n,s_n,r_n,min_q,i_n");
  const std::string tracers = read_text_file((dir / "tracers.csv").string());
  CHECK(column_count(tracers) == 1 + 2);
  // Rebuilding from the embedded config reproduces the trajectory.
  const ExperimentConfig again = ExperimentConfig::from_json(meta.at("config"));
  CHECK(run_experiment(Experiment::build(again)).trajectory.states == res.trajectory.states);
}

TEST_CASE("laplace diagnostics columns") {
  Json doc = toy_config();
  doc["field"] = "laplace_loo";
  doc["kernel"] = "laplace";
  doc["target"] = Json::parse(R"({"type": "mixture", "means": [[-1.5], [1.5]], "variances": [0.25, 0.25], "samples": 40})");
  doc["diagnostics"] = {{"laplace", true}, {"grid_points", 257}};
  doc["t_end"] = 0.1;
  const fs::path dir = scratch("sim_lap");
  simulate_to_dir(ExperimentConfig::from_json(doc), dir.string());
  const std::string diag = read_text_file((dir / "diagnostics.csv").string());
  CHECK(diag.substr(0, diag.find('\n')) == "t,v_n,s_n,r_n,min_q,v_n_lap,j_lap,vcal_lap,delta_sq");
  const Json meta = Json::parse(read_text_file((dir / "meta.json").string()));
  CHECK(meta.at("target_kind") == "empirical (mixture sample)");
}

TEST_CASE("figure 1 outputs") {
  Figure1Options opt;
  opt.steps = 200;
  const fs::path dir = scratch("fig1");
  const Figure1Result r = run_figure1(dir.string(), opt);
  CHECK(r.tracer_starts_equal);
  CHECK(r.conservative_curl_max <= 1e-4);
  CHECK(r.laplace_curl_max >= 10.0 * r.conservative_curl_max);
  CHECK(r.terminal_separation > 0.0);
  for (const char* f : {"figure1_conservative_tracers.csv", "figure1_laplace_tracers.csv"}) {
    CHECK(column_count(read_text_file((dir / f).string())) == 1 + 8);
  }
  CHECK(fs::exists(dir / "figure1_conservative_curl.csv"));
  CHECK(fs::exists(dir / "figure1_laplace_curl.csv"));
  CHECK(r.meta.at("h") == 0.55);
  CHECK(r.meta.at("n_model") == 80);
}

TEST_CASE("sweeps") {
  CHECK(code_of([] { (void)parse_value_list(""); }) == ErrorCode::kValidation);
  CHECK(parse_value_list("50,100, 200") == std::vector<double>{50, 100, 200});
  const ExperimentConfig base = ExperimentConfig::from_json(toy_config());
  const fs::path dir = scratch("sweep");
  CHECK(code_of([&] { (void)run_sweep(base, "N", {50, 100}, dir.string()); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { (void)run_sweep(base, "kappa", {1, 2, 3}, dir.string()); }) == ErrorCode::kValidation);

  // A single seed's sampling noise is larger than the N effect at fixed h,
  // so the trend is asserted on the seed average of the end points.
  Json small_h = toy_config();
  small_h["h"] = 0.15;
  small_h["eta"] = 0.01;
  small_h["t_end"] = 2.0;
  small_h.erase("diagnostics");
  small_h.erase("tracers");
  double first = 0.0;
  double last = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    small_h["seed"] = seed;
    const SweepResult n = run_sweep(ExperimentConfig::from_json(small_h), "N", {50, 100, 200, 400}, dir.string());
    REQUIRE(n.points.size() == 4);
    for (const SweepPoint& pt : n.points) CHECK(pt.ok);
    first += n.points.front().metric / 5.0;
    last += n.points.back().metric / 5.0;
  }
  CHECK(last < first);
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(fs::exists(dir / "sweep.json"));

  const SweepResult hs = run_sweep(base, "h", {0.3, 0.4, 0.5}, dir.string());
  CHECK(hs.summary.contains("optimal_bandwidth"));

  const SweepResult e = run_sweep(base, "eta", {0.04, 0.02, 0.01}, dir.string());
  CHECK(e.slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("verify reports are reproducible") {
  const std::string a = run_suite("euler", 5).to_json().dump();
  const std::string b = run_suite("euler", 5).to_json().dump();
  CHECK(a == b);
  CHECK(code_of([] { (void)run_suite("speed", 1); }) == ErrorCode::kValidation);
}

}  // TEST_SUITE
