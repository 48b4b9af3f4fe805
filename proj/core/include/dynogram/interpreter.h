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

#ifndef DYNOGRAM_INTERPRETER_H_
#define DYNOGRAM_INTERPRETER_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/bundle.h"
#include "dynogram/graph.h"
#include "dynogram/hcfg.h"
#include "dynogram/weights.h"

namespace dynogram {

struct Decision {
  Cond cond;  // with int and loop variables substituted
  SourceLoc loc;
  bool outcome = false;
  bool dynamic = false;  // reads a tensor value
};

struct ExecTrace {
  // Executed tensor statements with weight keys and attributes resolved.
  std::vector<Stmt> stmts;
  std::vector<Decision> decisions;
  std::vector<std::string> returns;  // names returned by the executed return

  // Outcomes of the dynamic decisions only.
  std::vector<bool> dynamic_outcomes() const;
};

struct InterpResult {
  std::vector<Tensor> outputs;
  ExecTrace trace;
};

// Direct AST walk. Throws kInputShapeMismatch when inputs do not match the
// parameters; kernel errors propagate.
InterpResult interpret(const ProgramAst& p, std::span<const Tensor> inputs,
                       const WeightStore& weights);

// Runs already-concrete tensor statements over `env`.
void execute_statements(const std::vector<Stmt>& stmts, TensorEnv& env,
                        const WeightStore& weights);

struct HcfgWalk {
  std::vector<Tensor> outputs;
  std::vector<std::pair<int, bool>> branches;  // (logic node, outcome)
  std::vector<int> visited;
  // Types of each visited node's live-in variables on entry.
  std::vector<std::pair<int, std::map<std::string, TensorType>>> entry_types;
};

// Executes the HCFG node by node with the reference kernels.
HcfgWalk walk_hcfg(const Hcfg& h, const std::vector<Param>& params,
                   std::span<const Tensor> inputs, const WeightStore& weights);

// The tracing baseline: one graph built from the statements the example
// input executed, branches discarded, wrapped in [Call g0, Return].
Bundle trace_compile(const ProgramAst& p, std::span<const Tensor> example,
                     const WeightStore& weights);

}  // namespace dynogram

#endif  // DYNOGRAM_INTERPRETER_H_
