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

#include <functional>

#include "dynogram/error.h"
#include "dynogram/graph.h"

namespace dynogram {

namespace {

void remove_outputs(ComputeGraph& g, const std::vector<bool>& drop) {
  std::vector<int> kept;
  for (int id : g.output_ids) {
    if (!drop[id]) kept.push_back(id);
  }
  g.output_ids = std::move(kept);
  prune_dead(g, /*drop_unused_inputs=*/false);
}

bool is_identity(const GraphNode& n) {
  return n.kind == GraphNode::Kind::kOp && n.op.kind == OpKind::kIdentity;
}

}  // namespace

HostResidual eliminate_identity_paths(ComputeGraph& g) {
  HostResidual residual;
  for (;;) {
    std::vector<bool> drop(g.nodes.size(), false);
    bool changed = false;
    for (int id : g.output_ids) {
      int src = g.nodes[id].inputs[0];
      bool copies = false;
      while (is_identity(g.nodes[src])) {
        src = g.nodes[src].inputs[0];
        copies = true;
      }
      if (g.nodes[src].kind != GraphNode::Kind::kInput) continue;
      drop[id] = true;
      changed = true;
      const std::string& dst = g.nodes[id].name;
      const std::string& from = g.nodes[src].name;
      // A bare pass-through needs no host work: the host env keeps it.
      if (copies || dst != from) {
        residual.push_back({ResidualInstr::Kind::kCopy, dst, from, Tensor()});
      }
    }
    if (!changed) break;
    remove_outputs(g, drop);
  }
  return residual;
}

HostResidual hoist_constant_outputs(ComputeGraph& g, const WeightStore& weights) {
  HostResidual residual;
  for (;;) {
    const size_t n = g.nodes.size();
    // Nodes whose value does not depend on any graph input.
    std::vector<bool> constant(n, false);
    for (size_t k = 0; k < n; ++k) {
      const GraphNode& node = g.nodes[k];
      if (node.kind == GraphNode::Kind::kConst) {
        constant[k] = true;
      } else if (node.kind != GraphNode::Kind::kInput) {
        bool all = true;
        for (int i : node.inputs) all = all && constant[i];
        constant[k] = all;
      }
    }
    std::vector<std::optional<Tensor>> cache(n);
    std::function<Tensor(int)> value = [&](int id) -> Tensor {
      if (cache[id]) return *cache[id];
      const GraphNode& node = g.nodes[id];
      Tensor t;
      if (node.kind == GraphNode::Kind::kConst) {
        t = node.is_weight() ? weights.at(node.weight_key) : node.literal;
      } else if (node.kind == GraphNode::Kind::kOutput) {
        t = value(node.inputs[0]);
      } else {
        std::vector<Tensor> args;
        for (int i : node.inputs) args.push_back(value(i));
        t = apply_kernel(node.op, args);
      }
      cache[id] = t;
      return t;
    };
    std::vector<bool> drop(n, false);
    bool changed = false;
    for (int id : g.output_ids) {
      if (!constant[id]) continue;
      drop[id] = true;
      changed = true;
      residual.push_back({ResidualInstr::Kind::kAssignConst, g.nodes[id].name, "", value(id)});
    }
    if (!changed) break;
    remove_outputs(g, drop);
  }
  return residual;
}

OptimizedGraph optimize(ComputeGraph g, const WeightStore& weights) {
  OptimizedGraph out;
  out.residual = hoist_constant_outputs(g, weights);
  HostResidual copies = eliminate_identity_paths(g);
  out.residual.insert(out.residual.end(), copies.begin(), copies.end());
  prune_dead(g, /*drop_unused_inputs=*/true);
  out.graph = std::move(g);
  return out;
}

}  // namespace dynogram
