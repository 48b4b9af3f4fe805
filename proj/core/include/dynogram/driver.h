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

#ifndef DYNOGRAM_DRIVER_H_
#define DYNOGRAM_DRIVER_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynogram/graph.h"
#include "dynogram/hcfg.h"
#include "dynogram/tensor.h"
#include "dynogram/weights.h"

namespace dynogram {

// Variable -> concrete type at one program point.
using ShapeEnv = std::map<std::string, TensorType>;

// Static types of the tensor statements of a block, applied to `env`.
// Weight operands take their type from `weights`.
ShapeEnv propagate_block_shapes(const std::vector<Stmt>& stmts, ShapeEnv env,
                                const WeightStore& weights);

// A ComputeGraph frozen against concrete input types, with a kernel
// schedule and a buffer arena plan. Constant nodes carry their literal
// (weights are baked at compile time).
struct CompiledSubGraph {
  int graph_id = 0;
  // Canonical node order: inputs, constants, kernels (schedule order),
  // outputs.
  ComputeGraph graph;
  std::vector<TensorType> input_types;
  std::vector<TensorType> output_types;
  std::vector<TensorType> node_types;   // per node
  std::vector<int> schedule;            // kernel node ids in execution order
  std::vector<int64_t> offsets;         // per node byte offset in the arena, -1 if none
  size_t arena_bytes = 0;

  std::vector<std::string> input_names() const { return graph.input_names(); }
  std::vector<std::string> output_names() const { return graph.output_names(); }
  size_t num_buffers() const;
};

// Reorders nodes into the canonical order (inputs, consts, ops, outputs),
// preserving relative order within each class.
ComputeGraph canonicalize(const ComputeGraph& g);

// Resolves node types, orders kernels topologically (stable by id) and
// assigns arena offsets: a buffer is released once its last consumer has
// run, and new values take the smallest free block that fits. Weight
// constants are resolved from `weights`; without it, they must already
// carry literals.
CompiledSubGraph plan_schedule(int graph_id, const ComputeGraph& g,
                               std::span<const TensorType> input_types,
                               const WeightStore* weights);

// Runs the schedule; inputs follow the frozen signature. Throws
// kSignatureMismatch on a type mismatch.
std::vector<Tensor> execute_subgraph(const CompiledSubGraph& c, std::span<const Tensor> inputs);

// Builds every tensor node's graph and, with `graph_opt`, applies the
// constant-hoisting and identity-elimination passes. Without it the graph
// is kept whole and the residual is empty.
std::map<int, OptimizedGraph> prepare_graphs(const Hcfg& h, const WeightStore& weights,
                                             bool graph_opt);

// Result of the shape-propagating traversal over the HCFG.
struct CompiledProgram {
  std::map<int, CompiledSubGraph> graphs;          // HCFG node id -> compiled graph
  std::map<int, HostResidual> residuals;           // HCFG node id -> host work
  std::vector<std::optional<ShapeEnv>> entry_env;  // per HCFG node
  std::vector<std::optional<ShapeEnv>> exit_env;   // per HCFG node
  std::vector<int> visit_order;
  std::vector<int> unreachable;
  int compile_invocations = 0;
};

// Worklist traversal from the entry: a node is taken once all its
// predecessors are done (lowest id first). The entry starts from the
// parameter types; logic nodes pass their environment through; tensor
// nodes compile their graph against the incoming types. Graphs without
// outputs compile to nothing. Throws kShapeJoinMismatch when predecessors
// disagree on a live variable and kInputShapeMismatch when the example
// types differ from the declared parameters.
CompiledProgram compile_all(const Hcfg& h, const std::map<int, OptimizedGraph>& graphs,
                            const std::vector<Param>& params,
                            const std::vector<TensorType>& example_types,
                            const WeightStore& weights);

}  // namespace dynogram

#endif  // DYNOGRAM_DRIVER_H_
