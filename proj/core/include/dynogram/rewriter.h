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

#ifndef DYNOGRAM_REWRITER_H_
#define DYNOGRAM_REWRITER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dynogram/ast.h"

namespace dynogram {

inline constexpr int64_t kDefaultUnrollBudget = 100000;

// Loop-free program with concrete weight keys and attributes, no int
// variables and no static conditionals.
struct RewrittenProgram {
  ProgramAst ast;
  // Source location of every statement, in preorder over ast.body.
  std::vector<SourceLoc> provenance;
};

// Replaces every `for` by hi-lo copies of its body with the loop variable
// substituted. Bounds may use int variables whose value is known at that
// point. Throws kNonConstLoopBound or kUnrollBudgetExceeded.
ProgramAst unroll_loops(const ProgramAst& ast, int64_t budget = kDefaultUnrollBudget);

// Folds int variables, static conditions, weight keys and attributes on a
// loop-free program until nothing changes. Throws kNonConstScalar,
// kNonConstWeightKey or kDivisionByZero.
RewrittenProgram propagate_constants(const ProgramAst& ast);

RewrittenProgram rewrite(const ProgramAst& ast, int64_t budget = kDefaultUnrollBudget);

// Substitutes known variables and folds literal subtrees.
ScalarExpr fold_scalar(const ScalarExpr& e,
                       const std::function<std::optional<ScalarValue>(const std::string&)>& lookup);

// Statement counts used by tests and reports.
int64_t count_statements(const std::vector<Stmt>& body);
int64_t count_loops(const std::vector<Stmt>& body);
int64_t count_ifs(const std::vector<Stmt>& body);

}  // namespace dynogram

#endif  // DYNOGRAM_REWRITER_H_
