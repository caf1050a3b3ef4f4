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

#ifndef DRIFTLAB_CORE_ERROR_HPP_
#define DRIFTLAB_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace driftlab {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kDomain,
  kUnsupportedFamily,
  kUnsupportedCombination,
  kUnsupportedDimension,
  kSingularDenominator,
  kDegenerateConfig,
  kCollisionGuard,
  kNonFinite,
  kOutOfRegime,
  kDegenerateCoercivity,
  kSizeMismatch,
  kValidation,
  kIo,
};

const char* to_string(ErrorCode code);

// All recoverable failures in the library surface as driftlab::Error. The C
// API maps the code onto a dl_status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace driftlab

#endif  // DRIFTLAB_CORE_ERROR_HPP_
