// Copyright 2026 The Dynogram Authors
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

#ifndef DYNOGRAM_ERROR_H_
#define DYNOGRAM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynogram {

enum class ErrorCode {
  // tensor-core
  kShapeMismatch,
  kAttributeInvalid,
  kNotScalar,
  // frontend
  kSyntaxError,
  kUndefinedIdentifier,
  kDuplicateDefinition,
  kValidationFailed,
  // rewriter
  kUnrollBudgetExceeded,
  kNonConstWeightKey,
  kNonConstScalar,
  kNonConstLoopBound,
  kDivisionByZero,
  // graph / driver
  kUnknownWeightKey,
  kShapeJoinMismatch,
  kShapeInferenceError,
  kSignatureMismatch,
  // host / runtime
  kRuntimeShapeMismatch,
  kInvalidBundle,
  kInputShapeMismatch,
  kIoError,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported as Error. Source positions are set for
// frontend errors only (line/column are 1-based, 0 means unknown).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0, int column = 0);

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }
  // The message without the code and position prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  int line_;
  int column_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace dynogram

#endif  // DYNOGRAM_ERROR_H_
