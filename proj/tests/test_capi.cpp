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


// Exercises the shared library through its public C header only.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "driftlab/driftlab.h"

namespace fs = std::filesystem;

TEST_SUITE("capi") {

TEST_CASE("kernel handles") {
  dl_kernel* k = nullptr;
  REQUIRE(dl_kernel_create("gaussian", 1, 1.0, &k) == DL_OK);
  double v = 0.0;
  const double u0 = 0.0;
  CHECK(dl_kernel_eval(k, &u0, &v) == DL_OK);
  CHECK(v == doctest::Approx(0.398942).epsilon(1e-6));
  const double u1 = 1.0;
  CHECK(dl_kernel_grad(k, &u1, &v) == DL_OK);
  CHECK(v == doctest::Approx(-0.241971).epsilon(1e-5));
  CHECK(dl_kernel_sharp_eval(k, &u0, &v) == DL_ERR_UNSUPPORTED_FAMILY);
  CHECK(std::strlen(dl_last_error()) > 0);
  dl_kernel_free(k);

  CHECK(dl_kernel_create("cauchy", 1, 1.0, &k) != DL_OK);
  CHECK(dl_kernel_create("gaussian", 1, -1.0, &k) != DL_OK);
  CHECK(dl_kernel_create(nullptr, 1, 1.0, &k) == DL_ERR_NULL_POINTER);
  CHECK(std::string(dl_status_name(DL_ERR_COLLISION_GUARD)) == "collision_guard");
}

TEST_CASE("measures, fields and dynamics") {
  dl_kernel* k = nullptr;
  REQUIRE(dl_kernel_create("laplace", 1, 1.0, &k) == DL_OK);
  const double atoms[] = {-1.0, 1.0};
  dl_measure* m = nullptr;
  REQUIRE(dl_measure_empirical(1, 2, atoms, nullptr, &m) == DL_OK);
  const double z = 0.0;
  double q = 0.0;
  CHECK(dl_kde_density(m, k, &z, &q) == DL_OK);
  CHECK(q == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
  double a = 0.0;
  CHECK(dl_scale_factor(m, k, &z, &a) == DL_OK);
  CHECK(a == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dl_kde_score(m, k, &atoms[0], &q) == DL_ERR_DOMAIN);

  dl_field* f = nullptr;
  CHECK(dl_field_create("conservative", m, k, 0, &f) != DL_OK);
  REQUIRE(dl_field_create("laplace_loo", m, k, 1, &f) == DL_OK);
  const double x0[] = {-0.2, 0.3};
  dl_config* c = nullptr;
  REQUIRE(dl_config_create(1, 2, x0, &c) == DL_OK);
  double vel[2];
  CHECK(dl_field_velocities(f, c, vel) == DL_OK);
  double vn = 0.0;
  CHECK(dl_diagnostics(f, c, &vn, nullptr, nullptr, nullptr) == DL_OK);
  CHECK(vn == doctest::Approx(0.5 * (vel[0] * vel[0] + vel[1] * vel[1])).epsilon(1e-12));

  dl_trajectory* t = nullptr;
  REQUIRE(dl_integrate(f, c, 0.05, 0.5, "frozen_euler", 0.0, &t) == DL_OK);
  size_t len = 0;
  CHECK(dl_trajectory_length(t, &len) == DL_OK);
  CHECK(len == 11);
  double tend = 0.0;
  CHECK(dl_trajectory_time(t, len - 1, &tend) == DL_OK);
  CHECK(tend == doctest::Approx(0.5));
  dl_config* last = nullptr;
  CHECK(dl_trajectory_state(t, len - 1, &last) == DL_OK);
  size_t n = 0, d = 0;
  CHECK(dl_config_shape(last, &n, &d) == DL_OK);
  CHECK(n == 2);
  CHECK(d == 1);
  CHECK(dl_trajectory_state(t, len, &last) == DL_ERR_INVALID_ARGUMENT);

  const double clash[] = {0.3, 0.3};
  dl_config* cc = nullptr;
  REQUIRE(dl_config_create(1, 2, clash, &cc) == DL_OK);
  dl_trajectory* bad = nullptr;
  CHECK(dl_integrate(f, cc, 0.05, 0.5, "frozen_euler", 0.0, &bad) == DL_ERR_COLLISION_GUARD);
  CHECK(std::string(dl_last_error()).find("particles 0 and 1") != std::string::npos);

  dl_config_free(cc);
  dl_config_free(last);
  dl_trajectory_free(t);
  dl_config_free(c);
  dl_field_free(f);
  dl_measure_free(m);
  dl_kernel_free(k);
}

TEST_CASE("mixtures and curl") {
  dl_kernel* k = nullptr;
  REQUIRE(dl_kernel_create("gaussian", 2, 0.6, &k) == DL_OK);
  const double means[] = {-1.0, 0.0, 1.0, 0.0};
  const double vars[] = {0.3, 0.3};
  dl_measure* m = nullptr;
  REQUIRE(dl_measure_mixture(2, 2, means, vars, nullptr, &m) == DL_OK);
  dl_field* f = nullptr;
  REQUIRE(dl_field_create("conservative", m, k, 0, &f) == DL_OK);
  const double x[] = {0.1, 0.2, -0.3, 0.5};
  dl_config* c = nullptr;
  REQUIRE(dl_config_create(2, 2, x, &c) == DL_OK);
  const double z[] = {0.2, -0.1};
  double curl = 1.0;
  CHECK(dl_field_curl2d(f, c, z, &curl) == DL_OK);
  CHECK(std::abs(curl) <= 1e-5);
  dl_config_free(c);
  dl_field_free(f);
  dl_measure_free(m);
  dl_kernel_free(k);
}

TEST_CASE("scalar helpers") {
  double h = 0.0;
  CHECK(dl_optimal_bandwidth(1, 1, 0, 2, 1000, &h) == DL_OK);
  CHECK(h == doctest::Approx(0.3549).epsilon(1e-3));
  CHECK(dl_optimal_bandwidth(1, 1, 2.5, 2, 1000, &h) == DL_ERR_OUT_OF_REGIME);
  double b = 0.0;
  CHECK(dl_chernoff_bound(1.0, 10000, 0.1, 1, &b) == DL_OK);
  CHECK(b == doctest::Approx(7.3e-24).epsilon(0.01));
}

TEST_CASE("commands") {
  const fs::path dir = fs::temp_directory_path() / "driftlab_capi_cmd";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  {
    FILE* fp = std::fopen(cfg.string().c_str(), "w");
    REQUIRE(fp != nullptr);
    std::fputs(R"({"field": "conservative", "kernel": "gaussian", "dim": 1, "h": 0.5, "eta": 0.05,
      "t_end": 0.5, "N": 1, "target": {"type": "points", "points": [[1.0]]},
      "initial": {"type": "points", "points": [[0.0]]}})",
               fp);
    std::fclose(fp);
  }
  char* meta = nullptr;
  CHECK(dl_cmd_simulate(cfg.string().c_str(), (dir / "out").string().c_str(), 1, 9, &meta) == DL_OK);
  REQUIRE(meta != nullptr);
  CHECK(std::string(meta).find("\"seed\": 9") != std::string::npos);
  dl_string_free(meta);
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));

  char* report = nullptr;
  CHECK(dl_cmd_verify("euler", 1, &report) == DL_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("\"anchor\"") != std::string::npos);
  dl_string_free(report);
  CHECK(dl_cmd_verify("nope", 1, &report) == DL_ERR_VALIDATION);
  CHECK(dl_cmd_simulate((dir / "missing.json").string().c_str(), dir.string().c_str(), 0, 0, &meta) == DL_ERR_IO);
}

}  // TEST_SUITE
