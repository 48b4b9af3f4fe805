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

#ifndef DYNOGRAM_GRAPH_H_
#define DYNOGRAM_GRAPH_H_

#include <map>
#include <string>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/hcfg.h"
#include "dynogram/tensor.h"
#include "dynogram/weights.h"

namespace dynogram {

struct GraphNode {
  enum class Kind : uint8_t { kInput, kConst, kOp, kOutput };

  int id = 0;
  Kind kind = Kind::kOp;
  std::string name;        // kInput / kOutput: variable name
  Operator op;             // kOp
  std::string weight_key;  // kConst: non-empty for weight references
  Tensor literal;          // kConst: inline literal when weight_key is empty
  std::vector<int> inputs;  // kOp: operands; kOutput: its single source

  bool is_weight() const { return kind == Kind::kConst && !weight_key.empty(); }

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

// Static dataflow graph of one tensor block. Nodes are stored in a
// topological order with id == index.
struct ComputeGraph {
  std::vector<GraphNode> nodes;
  std::vector<int> input_ids;   // Input nodes in signature order
  std::vector<int> output_ids;  // Output nodes in signature order

  std::vector<std::string> input_names() const;
  std::vector<std::string> output_names() const;
  int num_ops() const;
  // Output with no remaining outputs is compiled to nothing.
  bool empty() const { return output_ids.empty(); }

  friend bool operator==(const ComputeGraph&, const ComputeGraph&) = default;
};

// SSA conversion of straight-line tensor statements. Inputs follow
// `live_in`, outputs follow `live_out`; a live-out variable the block does
// not assign becomes a direct Input->Output edge. With `weights`, unknown
// keys throw kUnknownWeightKey.
ComputeGraph build_graph(const std::vector<Stmt>& stmts, const std::vector<std::string>& live_in,
                         const std::vector<std::string>& live_out,
                         const WeightStore* weights = nullptr);
ComputeGraph build_graph(const HcfgNode& node, const WeightStore* weights = nullptr);

using TensorEnv = std::map<std::string, Tensor>;

// Reference evaluation by input/output name.
TensorEnv evaluate(const ComputeGraph& g, const TensorEnv& inputs, const WeightStore& weights);

// Host-side work left behind by the optimizer.
struct ResidualInstr {
  enum class Kind : uint8_t { kCopy, kAssignConst };

  Kind kind = Kind::kCopy;
  std::string dst;
  std::string src;  // kCopy
  Tensor literal;   // kAssignConst

  friend bool operator==(const ResidualInstr&, const ResidualInstr&) = default;
};
using HostResidual = std::vector<ResidualInstr>;

// Applies residuals as a parallel assignment: every Copy reads the value
// its source had when the block was entered.
void apply_residual(const HostResidual& r, const TensorEnv& entry, TensorEnv& env);

// Removes nodes that reach no Output; Inputs survive unless
// `drop_unused_inputs`. Renumbers ids.
void prune_dead(ComputeGraph& g, bool drop_unused_inputs);

// Outputs reached from an Input only through identity nodes become Copy.
HostResidual eliminate_identity_paths(ComputeGraph& g);
// Outputs with only Const ancestors are evaluated and become AssignConst.
HostResidual hoist_constant_outputs(ComputeGraph& g, const WeightStore& weights);

struct OptimizedGraph {
  ComputeGraph graph;
  HostResidual residual;
};

// Constant hoisting then identity elimination, each to a fixed point,
// followed by pruning of dead nodes and unused inputs.
OptimizedGraph optimize(ComputeGraph g, const WeightStore& weights);

}  // namespace dynogram

#endif  // DYNOGRAM_GRAPH_H_
