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

#include "dynogram/graph.h"

#include <functional>

#include "dynogram/error.h"

namespace dynogram {

std::vector<std::string> ComputeGraph::input_names() const {
  std::vector<std::string> out;
  for (int id : input_ids) out.push_back(nodes[id].name);
  return out;
}

std::vector<std::string> ComputeGraph::output_names() const {
  std::vector<std::string> out;
  for (int id : output_ids) out.push_back(nodes[id].name);
  return out;
}

int ComputeGraph::num_ops() const {
  int n = 0;
  for (const auto& node : nodes) n += node.kind == GraphNode::Kind::kOp;
  return n;
}

namespace {

int add_node(ComputeGraph& g, GraphNode node) {
  node.id = static_cast<int>(g.nodes.size());
  g.nodes.push_back(std::move(node));
  return g.nodes.back().id;
}

}  // namespace

ComputeGraph build_graph(const std::vector<Stmt>& stmts, const std::vector<std::string>& live_in,
                         const std::vector<std::string>& live_out, const WeightStore* weights) {
  ComputeGraph g;
  std::map<std::string, int> current;
  std::map<std::string, int> weight_nodes;
  for (const auto& name : live_in) {
    GraphNode in;
    in.kind = GraphNode::Kind::kInput;
    in.name = name;
    const int id = add_node(g, std::move(in));
    g.input_ids.push_back(id);
    current[name] = id;
  }
  auto read_var = [&](const std::string& name) {
    auto it = current.find(name);
    if (it == current.end()) {
      fail(ErrorCode::kInvalidArgument, "block reads '" + name + "' which is not live on entry");
    }
    return it->second;
  };
  for (const auto& s : stmts) {
    if (s.kind != Stmt::Kind::kTensorAssign) {
      fail(ErrorCode::kInvalidArgument, "graph blocks hold tensor assignments only");
    }
    if (s.expr.op == OpKind::kConst) {
      GraphNode c;
      c.kind = GraphNode::Kind::kConst;
      c.literal = *concrete_attrs(s.expr).value;
      current[s.target] = add_node(g, std::move(c));
      continue;
    }
    GraphNode op;
    op.kind = GraphNode::Kind::kOp;
    op.op = concrete_operator(s.expr);
    for (const auto& o : s.expr.operands) {
      switch (o.kind) {
        case Operand::Kind::kVar:
          op.inputs.push_back(read_var(o.name));
          break;
        case Operand::Kind::kWeight: {
          if (!o.weight.is_concrete()) {
            fail(ErrorCode::kNonConstWeightKey, "weight key is not concrete");
          }
          const std::string key = o.weight.key();
          if (weights && !weights->contains(key)) {
            fail(ErrorCode::kUnknownWeightKey, "no weight named '" + key + "'");
          }
          auto it = weight_nodes.find(key);
          if (it == weight_nodes.end()) {
            GraphNode c;
            c.kind = GraphNode::Kind::kConst;
            c.weight_key = key;
            it = weight_nodes.emplace(key, add_node(g, std::move(c))).first;
          }
          op.inputs.push_back(it->second);
          break;
        }
        case Operand::Kind::kLiteral: {
          GraphNode c;
          c.kind = GraphNode::Kind::kConst;
          c.literal = o.literal;
          op.inputs.push_back(add_node(g, std::move(c)));
          break;
        }
      }
    }
    current[s.target] = add_node(g, std::move(op));
  }
  for (const auto& name : live_out) {
    GraphNode out;
    out.kind = GraphNode::Kind::kOutput;
    out.name = name;
    out.inputs.push_back(read_var(name));
    g.output_ids.push_back(add_node(g, std::move(out)));
  }
  prune_dead(g, /*drop_unused_inputs=*/false);
  return g;
}

ComputeGraph build_graph(const HcfgNode& node, const WeightStore* weights) {
  return build_graph(node.stmts, node.live_in, node.live_out, weights);
}

TensorEnv evaluate(const ComputeGraph& g, const TensorEnv& inputs, const WeightStore& weights) {
  std::vector<Tensor> values(g.nodes.size());
  TensorEnv out;
  for (const auto& n : g.nodes) {
    switch (n.kind) {
      case GraphNode::Kind::kInput: {
        auto it = inputs.find(n.name);
        if (it == inputs.end()) {
          fail(ErrorCode::kSignatureMismatch, "missing graph input '" + n.name + "'");
        }
        values[n.id] = it->second;
        break;
      }
      case GraphNode::Kind::kConst:
        values[n.id] = n.is_weight() ? weights.at(n.weight_key) : n.literal;
        break;
      case GraphNode::Kind::kOp: {
        std::vector<Tensor> args;
        args.reserve(n.inputs.size());
        for (int i : n.inputs) args.push_back(values[i]);
        values[n.id] = apply_kernel(n.op, args);
        break;
      }
      case GraphNode::Kind::kOutput:
        values[n.id] = values[n.inputs[0]];
        out[n.name] = values[n.id];
        break;
    }
  }
  return out;
}

void apply_residual(const HostResidual& r, const TensorEnv& entry, TensorEnv& env) {
  for (const auto& ins : r) {
    if (ins.kind == ResidualInstr::Kind::kAssignConst) {
      env[ins.dst] = ins.literal;
      continue;
    }
    auto it = entry.find(ins.src);
    if (it == entry.end()) {
      fail(ErrorCode::kInvalidArgument, "residual copy reads unknown '" + ins.src + "'");
    }
    env[ins.dst] = it->second;
  }
}

void prune_dead(ComputeGraph& g, bool drop_unused_inputs) {
  const size_t n = g.nodes.size();
  std::vector<bool> live(n, false);
  for (int id : g.output_ids) live[id] = true;
  for (size_t k = n; k-- > 0;) {
    if (!live[k]) continue;
    for (int i : g.nodes[k].inputs) live[i] = true;
  }
  if (!drop_unused_inputs) {
    for (int id : g.input_ids) live[id] = true;
  }
  std::vector<int> remap(n, -1);
  ComputeGraph out;
  for (size_t k = 0; k < n; ++k) {
    if (!live[k]) continue;
    GraphNode node = g.nodes[k];
    for (int& i : node.inputs) i = remap[i];
    remap[k] = add_node(out, std::move(node));
  }
  for (int id : g.input_ids) {
    if (remap[id] >= 0) out.input_ids.push_back(remap[id]);
  }
  for (int id : g.output_ids) out.output_ids.push_back(remap[id]);
  g = std::move(out);
}

}  // namespace dynogram
