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

#ifndef DRIFTLAB_CORE_TYPES_HPP_
#define DRIFTLAB_CORE_TYPES_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "core/error.hpp"

namespace driftlab {

using Vector = std::vector<double>;
using ConstVec = std::span<const double>;
using MutVec = std::span<double>;

inline double dot(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double squared_norm(ConstVec a) { return dot(a, a); }
inline double norm(ConstVec a) { return std::sqrt(squared_norm(a)); }

inline double squared_distance(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline Vector operator-(ConstVec a, ConstVec b) {
  Vector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

inline Vector scaled(ConstVec a, double c) {
  Vector out(a.begin(), a.end());
  for (double& v : out) v *= c;
  return out;
}

// Ordered cloud of points in R^d stored row-major. Used both for particle
// configurations (order = particle identity) and for measure atoms.
class ParticleConfig {
 public:
  ParticleConfig() = default;
  ParticleConfig(std::size_t dim, std::vector<double> coords);

  static ParticleConfig from_points(const std::vector<Vector>& points);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  ConstVec point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  MutVec point(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  const std::vector<double>& coords() const noexcept { return coords_; }
  std::vector<double>& coords() noexcept { return coords_; }

  bool operator==(const ParticleConfig& other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Throws kDimensionMismatch unless v has the expected length.
void require_dim(ConstVec v, std::size_t dim, const char* what);

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_TYPES_HPP_
