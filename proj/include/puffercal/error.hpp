//
// Copyright 2026 The puffercal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PUFFERCAL_ERROR_HPP_
#define PUFFERCAL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace puffercal {

enum class ErrorCode {
  kInvalidArgument,
  kEmptySample,
  kInvalidValue,
  kNonNormalizable,
  kFunctionalOverflow,
  kNoRoot,
  kNotMonotone,
  kNonInvertibleRate,
  kInfeasibleEvenAtInfinity,
  kIntegrationFailure,
  kIoError,
  kParseError,
  kUnknownCategory,
  kEmptyConditional,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kNonNormalizable: return "NonNormalizable";
    case ErrorCode::kFunctionalOverflow: return "FunctionalOverflow";
    case ErrorCode::kNoRoot: return "NoRoot";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kNonInvertibleRate: return "NonInvertibleRate";
    case ErrorCode::kInfeasibleEvenAtInfinity: return "InfeasibleEvenAtInfinity";
    case ErrorCode::kIntegrationFailure: return "IntegrationFailure";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kEmptyConditional: return "EmptyConditional";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above; the
// message is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace puffercal

#endif  // PUFFERCAL_ERROR_HPP_
