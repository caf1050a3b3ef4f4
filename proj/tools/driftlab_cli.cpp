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


// driftlab command-line front end. Talks to the library only through the
// C API in driftlab/driftlab.h.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "driftlab/driftlab.h"

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  f << text;
}

// Takes ownership of a library-allocated string.
std::string take(char* s) {
  if (s == nullptr) return {};
  std::string out(s);
  dl_string_free(s);
  return out;
}

int report_error(const std::string& command, dl_status st, const std::string& out_dir) {
  const std::string msg = dl_last_error();
  const std::string doc = "{\n  \"command\": \"" + command + "\",\n  \"status\": \"" + dl_status_name(st) +
                          "\",\n  \"code\": " + std::to_string(static_cast<int>(st)) + ",\n  \"message\": \"" +
                          json_escape(msg) + "\"\n}\n";
  write_file(std::filesystem::path(out_dir.empty() ? "." : out_dir) / "error.json", doc);
  std::cerr << "driftlab " << command << ": " << dl_status_name(st) << ": " << msg << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftlab: finite-particle drifting dynamics"};
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::string suite;
  std::string param;
  std::string values;

  auto* simulate = app.add_subcommand("simulate", "Run one experiment from a JSON config");
  simulate->add_option("--config", config, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out, "Output directory");
  auto* sim_seed = simulate->add_option("--seed", seed, "Override the config seed");

  auto* figure1 = app.add_subcommand("figure1", "Two-cluster tracer and curl-map comparison");
  figure1->add_option("--out", out, "Output directory");
  auto* fig_seed = figure1->add_option("--seed", seed, "Cluster sampling seed");

  auto* verify = app.add_subcommand("verify", "Run a property suite and print its JSON report");
  verify->add_option("--suite", suite, "identities | bounds | occupancy | euler")
      ->required()
      ->check(CLI::IsMember({"identities", "bounds", "occupancy", "euler"}));
  verify->add_option("--seed", seed, "Suite seed");
  auto* verify_out = verify->add_option("--out", out, "Also write verify_<suite>.json here");

  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over one parameter");
  sweep->add_option("--config", config, "Base experiment config (JSON)")->required();
  sweep->add_option("--param", param, "N | h | eta")->required()->check(CLI::IsMember({"N", "h", "eta"}));
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", out, "Output directory");
  auto* sweep_seed = sweep->add_option("--seed", seed, "Override the config seed");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    char* meta = nullptr;
    const dl_status st = dl_cmd_simulate(config.c_str(), out.c_str(), sim_seed->count() > 0, seed, &meta);
    const std::string text = take(meta);
    if (st != DL_OK) return report_error("simulate", st, out);
    std::cout << "wrote " << out << "\n";
    return 0;
  }
  if (figure1->parsed()) {
    char* meta = nullptr;
    const dl_status st = dl_cmd_figure1(out.c_str(), fig_seed->count() > 0, seed, &meta);
    const std::string text = take(meta);
    if (st != DL_OK) return report_error("figure1", st, out);
    std::cout << text;
    return 0;
  }
  if (verify->parsed()) {
    char* report = nullptr;
    const dl_status st = dl_cmd_verify(suite.c_str(), seed, &report);
    const std::string text = take(report);
    if (!text.empty()) {
      std::cout << text;
      if (verify_out->count() > 0) write_file(std::filesystem::path(out) / ("verify_" + suite + ".json"), text);
    }
    if (st == DL_ERR_CHECK_FAILED) return 1;
    if (st != DL_OK) return report_error("verify", st, out);
    return 0;
  }
  if (sweep->parsed()) {
    char* summary = nullptr;
    const dl_status st =
        dl_cmd_sweep(config.c_str(), param.c_str(), values.c_str(), out.c_str(), sweep_seed->count() > 0, seed, &summary);
    const std::string text = take(summary);
    if (!text.empty()) std::cout << text;
    if (st == DL_ERR_CHECK_FAILED) {
      report_error("sweep", st, out);
      return 1;
    }
    if (st != DL_OK) return report_error("sweep", st, out);
    return 0;
  }
  return 0;
}
