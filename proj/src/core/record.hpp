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

#ifndef DRIFTLAB_CORE_RECORD_HPP_
#define DRIFTLAB_CORE_RECORD_HPP_

#include <optional>

namespace driftlab {

// Scalar diagnostics of one configuration at time t.
struct DiagnosticsRecord {
  double t = 0.0;
  double v_n = 0.0;
  double s_n = 0.0;
  double r_n = 0.0;
  double min_q = 0.0;
  int occupancy_min = 0;
  std::optional<double> i_n;
  std::optional<double> curl_max_abs;
  std::optional<double> v_n_lap;
  std::optional<double> s_n_lap;
  std::optional<double> j_lap;
  std::optional<double> vcal_lap;
  std::optional<double> delta_sq;
};

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_RECORD_HPP_
