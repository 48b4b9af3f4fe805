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

#include "dynogram/pipeline.h"

#include <chrono>

#include "dynogram/host.h"

namespace dynogram {

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

Compilation compile_program(const ProgramAst& ast, const WeightStore& weights,
                            const CompileOptions& options) {
  Compilation c;
  Stopwatch clock;
  c.rewritten = rewrite(ast, options.unroll_budget);
  c.timings.rewrite = clock.lap();
  c.hcfg = make_hcfg(c.rewritten);
  c.timings.hcfg = clock.lap();
  c.graphs = prepare_graphs(c.hcfg, weights, options.graph_opt);
  c.timings.graph_opt = clock.lap();
  std::vector<TensorType> example;
  if (options.example_types) {
    example = *options.example_types;
  } else {
    for (const auto& p : ast.params) example.push_back(p.type);
  }
  c.compiled = compile_all(c.hcfg, c.graphs, ast.params, example, weights);
  Bundle& b = c.bundle;
  b.info.model = ast.name;
  b.info.variant = options.graph_opt ? "dynogram" : "dynogram-no-opt";
  b.info.decision_kind = ast.decision_kind;
  b.info.eos_token = ast.eos_token;
  b.info.inputs = ast.params;
  b.info.num_outputs = ast.num_outputs;
  b.host = synthesize_host(c.hcfg, c.compiled);
  b.graphs = c.compiled.graphs;
  b.weights = weights;
  b.manifest = make_manifest(b.info, &c.hcfg, c.compiled.residuals, b.graphs, b.host);
  c.timings.backend = clock.lap();
  return c;
}

}  // namespace dynogram
