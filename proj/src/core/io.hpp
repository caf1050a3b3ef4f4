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

#ifndef DRIFTLAB_CORE_IO_HPP_
#define DRIFTLAB_CORE_IO_HPP_

#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/measures.hpp"

namespace driftlab {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// t, particle_id, x_0 .. x_{d-1}; one row per particle per recorded time.
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
// Recovers times and states from trajectory CSV text.
Trajectory parse_trajectory_csv(const std::string& text);

struct DiagnosticsColumns {
  bool i_n = false;
  bool curl = false;
  bool laplace = false;
};

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                            const DiagnosticsColumns& columns);

// One point per row. An optional header names the columns; a column called
// "weight" holds weights. Without a header, a row with dim + 1 values carries
// a trailing weight. Weights are normalized to sum to one.
Measure read_measure_csv(const std::string& path, std::size_t dim);
ParticleConfig read_points_csv(const std::string& path, std::size_t dim);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_IO_HPP_
