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

#ifndef DYNOGRAM_PIPELINE_H_
#define DYNOGRAM_PIPELINE_H_

#include <map>
#include <optional>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/bundle.h"
#include "dynogram/driver.h"
#include "dynogram/graph.h"
#include "dynogram/hcfg.h"
#include "dynogram/rewriter.h"
#include "dynogram/weights.h"

namespace dynogram {

struct CompileOptions {
  bool graph_opt = true;
  int64_t unroll_budget = kDefaultUnrollBudget;
  // Example input types; defaults to the declared parameter types.
  std::optional<std::vector<TensorType>> example_types;
};

// Wall-clock seconds per compiler stage.
struct StageTimings {
  double rewrite = 0;
  double hcfg = 0;
  double graph_opt = 0;
  double backend = 0;

  double total() const { return rewrite + hcfg + graph_opt + backend; }
};

struct Compilation {
  RewrittenProgram rewritten;
  Hcfg hcfg;
  std::map<int, OptimizedGraph> graphs;
  CompiledProgram compiled;
  Bundle bundle;
  StageTimings timings;
};

// Rewrite, build the HCFG, build and optimize sub-graphs, compile them
// along the HCFG and synthesize the host program.
Compilation compile_program(const ProgramAst& ast, const WeightStore& weights,
                            const CompileOptions& options = {});

}  // namespace dynogram

#endif  // DYNOGRAM_PIPELINE_H_
