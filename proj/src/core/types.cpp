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

#include "core/types.hpp"

#include <string>

namespace driftlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kUnsupportedFamily: return "unsupported-family";
    case ErrorCode::kUnsupportedCombination: return "unsupported-combination";
    case ErrorCode::kUnsupportedDimension: return "unsupported-dimension";
    case ErrorCode::kSingularDenominator: return "singular-denominator";
    case ErrorCode::kDegenerateConfig: return "degenerate-config";
    case ErrorCode::kCollisionGuard: return "collision-guard";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kOutOfRegime: return "out-of-regime";
    case ErrorCode::kDegenerateCoercivity: return "degenerate-coercivity";
    case ErrorCode::kSizeMismatch: return "size-mismatch";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

ParticleConfig::ParticleConfig(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) fail(ErrorCode::kValidation, "point cloud dimension must be >= 1");
  if (coords_.size() % dim_ != 0) {
    fail(ErrorCode::kDimensionMismatch,
         "coordinate count " + std::to_string(coords_.size()) +
             " is not a multiple of dimension " + std::to_string(dim_));
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) fail(ErrorCode::kNonFinite, "non-finite coordinate in point cloud");
  }
}

ParticleConfig ParticleConfig::from_points(const std::vector<Vector>& points) {
  if (points.empty()) fail(ErrorCode::kValidation, "empty point list");
  const std::size_t d = points.front().size();
  std::vector<double> flat;
  flat.reserve(points.size() * d);
  for (const auto& p : points) {
    if (p.size() != d) fail(ErrorCode::kDimensionMismatch, "points have inconsistent dimension");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return ParticleConfig(d, std::move(flat));
}

void require_dim(ConstVec v, std::size_t dim, const char* what) {
  if (v.size() != dim) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + ": expected dimension " +
                                            std::to_string(dim) + ", got " +
                                            std::to_string(v.size()));
  }
}

}  // namespace driftlab
