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

#ifndef DYNOGRAM_FRONTEND_H_
#define DYNOGRAM_FRONTEND_H_

#include <string>
#include <string_view>
#include <vector>

#include "dynogram/ast.h"

namespace dynogram {

// Parses DTPL source. Nested operator calls are flattened into fresh
// `_tN` temporaries so every tensor statement applies a single operator.
// Throws Error with kSyntaxError, kUndefinedIdentifier or
// kDuplicateDefinition, carrying the offending line/column.
ProgramAst parse(std::string_view source);

enum class DiagnosticKind {
  kDefiniteAssignment,
  kInputDependentLoop,
  kArity,
  kMissingReturn,
  kUnreachableCode,
  kReturnArity,
};

std::string_view diagnostic_kind_name(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  SourceLoc loc;
  std::string message;

  std::string to_string() const;
};

// Semantic checks: definite assignment on every path, operator arity and
// attributes, loop-bound constancy, return placement and arity.
std::vector<Diagnostic> validate(const ProgramAst& ast);

// parse + validate; throws kValidationFailed listing every diagnostic.
ProgramAst parse_and_validate(std::string_view source);

ProgramAst load_program(const std::string& path);

}  // namespace dynogram

#endif  // DYNOGRAM_FRONTEND_H_
