// Copyright 2026 The caoed Authors
//
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

#ifndef CAOED_ERROR_H_
#define CAOED_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace caoed {

enum class ErrorCode {
  kInvalidArgument,
  kNonpositiveShape,
  kDivergedRollout,
  kInvalidInformation,
  kPlanningFailed,
  kUnknownScenario,
  kIo,
  kSchema,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kNonpositiveShape:
      return "nonpositive_shape_parameter";
    case ErrorCode::kDivergedRollout:
      return "diverged_rollout";
    case ErrorCode::kInvalidInformation:
      return "invalid_information_matrix";
    case ErrorCode::kPlanningFailed:
      return "planning_failed";
    case ErrorCode::kUnknownScenario:
      return "unknown_scenario";
    case ErrorCode::kIo:
      return "io_error";
    case ErrorCode::kSchema:
      return "schema_error";
  }
  return "unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace caoed

#endif  // CAOED_ERROR_H_
