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

#include "core/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace driftlab {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_number(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  return r.ec == std::errc() && r.ptr == t.data() + t.size() && !t.empty();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

void append_opt(std::ostringstream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << format_double(*v);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty()) {
    fail(ErrorCode::kIo, context + ": cannot parse number '" + t + "'");
  }
  return v;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const std::size_t d = traj.states.empty() ? 0 : traj.states.front().dim();
  os << "t,particle_id";
  for (std::size_t c = 0; c < d; ++c) os << ",x_" << c;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const ParticleConfig& x = traj.states[k];
    const std::string t = format_double(traj.times[k]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      os << t << ',' << i;
      for (double v : x.point(i)) os << ',' << format_double(v);
      os << '\n';
    }
  }
  return os.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  write_text_file(path, trajectory_csv(traj));
}

Trajectory parse_trajectory_csv(const std::string& text) {
  const auto rows = csv_rows(text);
  if (rows.empty() || rows.front().size() < 3 || trim(rows.front()[0]) != "t") {
    fail(ErrorCode::kIo, "trajectory CSV: missing header");
  }
  const std::size_t d = rows.front().size() - 2;
  Trajectory traj;
  std::vector<double> coords;
  std::string current_t;
  auto flush = [&]() {
    if (current_t.empty()) return;
    traj.times.push_back(parse_double(current_t, "trajectory CSV"));
    traj.states.emplace_back(d, std::move(coords));
    coords.clear();
  };
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != d + 2) fail(ErrorCode::kIo, "trajectory CSV: ragged row " + std::to_string(r));
    const std::string t = trim(row[0]);
    if (t != current_t) {
      flush();
      current_t = t;
    }
    const std::size_t id = static_cast<std::size_t>(parse_double(row[1], "particle_id"));
    if (id * d != coords.size()) fail(ErrorCode::kIo, "trajectory CSV: particle ids out of order");
    for (std::size_t c = 0; c < d; ++c) coords.push_back(parse_double(row[2 + c], "trajectory CSV"));
  }
  flush();
  return traj;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                            const DiagnosticsColumns& columns) {
  std::ostringstream os;
  os << "t,v_n,s_n,r_n,min_q";
  if (columns.i_n) os << ",i_n";
  if (columns.curl) os << ",curl_max_abs";
  if (columns.laplace) os << ",v_n_lap,j_lap,vcal_lap,delta_sq";
  os << '\n';
  for (const DiagnosticsRecord& r : records) {
    os << format_double(r.t) << ',' << format_double(r.v_n) << ',' << format_double(r.s_n) << ','
       << format_double(r.r_n) << ',' << format_double(r.min_q);
    if (columns.i_n) append_opt(os, r.i_n);
    if (columns.curl) append_opt(os, r.curl_max_abs);
    if (columns.laplace) {
      append_opt(os, r.v_n_lap);
      append_opt(os, r.j_lap);
      append_opt(os, r.vcal_lap);
      append_opt(os, r.delta_sq);
    }
    os << '\n';
  }
  return os.str();
}

Measure read_measure_csv(const std::string& path, std::size_t dim) {
  const auto rows = csv_rows(read_text_file(path));
  if (rows.empty()) fail(ErrorCode::kIo, "'" + path + "' holds no points");
  std::size_t first = 0;
  std::size_t weight_col = std::string::npos;
  std::size_t width = rows.front().size();
  const bool header = !std::all_of(rows.front().begin(), rows.front().end(), is_number);
  if (header) {
    first = 1;
    for (std::size_t c = 0; c < width; ++c) {
      if (trim(rows.front()[c]) == "weight") weight_col = c;
    }
  } else if (width == dim + 1) {
    weight_col = dim;
  }
  if (width != dim + (weight_col == std::string::npos ? 0 : 1)) {
    fail(ErrorCode::kIo, "'" + path + "': expected " + std::to_string(dim) + " coordinate columns");
  }
  std::vector<double> coords;
  Vector weights;
  for (std::size_t r = first; r < rows.size(); ++r) {
    if (rows[r].size() != width) fail(ErrorCode::kIo, "'" + path + "': ragged row " + std::to_string(r));
    for (std::size_t c = 0; c < width; ++c) {
      const double v = parse_double(rows[r][c], path);
      if (c == weight_col) {
        weights.push_back(v);
      } else {
        coords.push_back(v);
      }
    }
  }
  if (coords.empty()) fail(ErrorCode::kIo, "'" + path + "' holds no points");
  if (!weights.empty()) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) fail(ErrorCode::kValidation, "'" + path + "': weights must be positive");
    for (double& w : weights) w /= total;
  }
  return Measure::empirical(ParticleConfig(dim, std::move(coords)), std::move(weights));
}

ParticleConfig read_points_csv(const std::string& path, std::size_t dim) {
  const Measure m = read_measure_csv(path, dim);
  if (!m.uniform()) fail(ErrorCode::kIo, "'" + path + "': particle files carry no weights");
  return m.atoms();
}

}  // namespace driftlab
