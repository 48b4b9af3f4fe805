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

#include "dynogram/driver.h"

#include <algorithm>
#include <cstring>
#include <set>

#include "dynogram/error.h"

namespace dynogram {

namespace {

constexpr size_t kAlignment = 8;

size_t align_up(size_t n) { return (n + kAlignment - 1) / kAlignment * kAlignment; }

TensorType operand_type(const Operand& o, const ShapeEnv& env, const WeightStore& weights) {
  switch (o.kind) {
    case Operand::Kind::kVar: {
      auto it = env.find(o.name);
      if (it == env.end()) {
        fail(ErrorCode::kShapeInferenceError, "no shape known for '" + o.name + "'");
      }
      return it->second;
    }
    case Operand::Kind::kWeight:
      return weights.at(o.weight.key()).type();
    case Operand::Kind::kLiteral:
      return o.literal.type();
  }
  return {};
}

}  // namespace

ShapeEnv propagate_block_shapes(const std::vector<Stmt>& stmts, ShapeEnv env,
                                const WeightStore& weights) {
  for (const auto& s : stmts) {
    const Operator op = concrete_operator(s.expr);
    std::vector<TensorType> in;
    if (s.expr.op != OpKind::kConst) {
      for (const auto& o : s.expr.operands) in.push_back(operand_type(o, env, weights));
    }
    env[s.target] = infer_shape(op, in);
  }
  return env;
}

size_t CompiledSubGraph::num_buffers() const {
  std::set<int64_t> distinct;
  for (int id : schedule) distinct.insert(offsets[id]);
  return distinct.size();
}

ComputeGraph canonicalize(const ComputeGraph& g) {
  std::vector<int> order;
  for (auto kind : {GraphNode::Kind::kInput, GraphNode::Kind::kConst, GraphNode::Kind::kOp}) {
    for (const auto& n : g.nodes) {
      if (n.kind == kind) order.push_back(n.id);
    }
  }
  // Inputs in signature order, outputs in signature order.
  std::vector<int> inputs(g.input_ids);
  std::copy_if(order.begin(), order.end(), std::back_inserter(inputs), [&](int id) {
    return g.nodes[id].kind == GraphNode::Kind::kInput &&
           std::find(g.input_ids.begin(), g.input_ids.end(), id) == g.input_ids.end();
  });
  std::vector<int> rest;
  for (int id : order) {
    if (g.nodes[id].kind != GraphNode::Kind::kInput) rest.push_back(id);
  }
  order = inputs;
  order.insert(order.end(), rest.begin(), rest.end());
  order.insert(order.end(), g.output_ids.begin(), g.output_ids.end());

  std::vector<int> remap(g.nodes.size(), -1);
  ComputeGraph out;
  for (int old : order) {
    GraphNode n = g.nodes[old];
    n.id = static_cast<int>(out.nodes.size());
    remap[old] = n.id;
    out.nodes.push_back(std::move(n));
  }
  for (auto& n : out.nodes) {
    for (int& i : n.inputs) i = remap[i];
  }
  for (int id : g.input_ids) out.input_ids.push_back(remap[id]);
  for (int id : g.output_ids) out.output_ids.push_back(remap[id]);
  // The op block must stay topological: ops were topological by id before.
  return out;
}

CompiledSubGraph plan_schedule(int graph_id, const ComputeGraph& graph,
                               std::span<const TensorType> input_types,
                               const WeightStore* weights) {
  CompiledSubGraph c;
  c.graph_id = graph_id;
  c.graph = canonicalize(graph);
  ComputeGraph& g = c.graph;
  if (input_types.size() != g.input_ids.size()) {
    fail(ErrorCode::kSignatureMismatch, "graph g" + std::to_string(graph_id) + " expects " +
                                            std::to_string(g.input_ids.size()) +
                                            " inputs, got " + std::to_string(input_types.size()));
  }
  c.input_types.assign(input_types.begin(), input_types.end());
  const size_t n = g.nodes.size();
  c.node_types.resize(n);
  for (size_t k = 0; k < g.input_ids.size(); ++k) c.node_types[g.input_ids[k]] = input_types[k];
  for (auto& node : g.nodes) {
    switch (node.kind) {
      case GraphNode::Kind::kInput:
        break;
      case GraphNode::Kind::kConst:
        if (node.is_weight() && weights) node.literal = weights->at(node.weight_key);
        c.node_types[node.id] = node.literal.type();
        break;
      case GraphNode::Kind::kOp: {
        std::vector<TensorType> in;
        for (int i : node.inputs) in.push_back(c.node_types[i]);
        c.node_types[node.id] = infer_shape(node.op, in);
        c.schedule.push_back(node.id);
        break;
      }
      case GraphNode::Kind::kOutput:
        c.node_types[node.id] = c.node_types[node.inputs[0]];
        c.output_types.push_back(c.node_types[node.id]);
        break;
    }
  }

  // Last schedule step reading each kernel value; values feeding an Output
  // stay live to the end.
  const int steps = static_cast<int>(c.schedule.size());
  std::vector<int> step_of(n, -1);
  for (int t = 0; t < steps; ++t) step_of[c.schedule[t]] = t;
  std::vector<int> last_use(n, -1);
  for (const auto& node : g.nodes) {
    for (int i : node.inputs) {
      if (g.nodes[i].kind != GraphNode::Kind::kOp) continue;
      const int use = node.kind == GraphNode::Kind::kOutput ? steps : step_of[node.id];
      last_use[i] = std::max(last_use[i], use);
    }
  }

  struct Block {
    size_t offset;
    size_t size;
  };
  std::vector<Block> free_blocks;  // sorted by offset
  size_t top = 0;
  c.offsets.assign(n, -1);
  std::vector<std::vector<int>> release_at(steps + 1);
  for (int t = 0; t < steps; ++t) {
    const int id = c.schedule[t];
    // Release values whose last consumer ran before this step.
    for (int v : release_at[t]) {
      Block b{static_cast<size_t>(c.offsets[v]), align_up(c.node_types[v].byte_size())};
      auto it = std::lower_bound(free_blocks.begin(), free_blocks.end(), b.offset,
                                 [](const Block& x, size_t off) { return x.offset < off; });
      it = free_blocks.insert(it, b);
      if (it + 1 != free_blocks.end() && it->offset + it->size == (it + 1)->offset) {
        it->size += (it + 1)->size;
        free_blocks.erase(it + 1);
      }
      if (it != free_blocks.begin() && (it - 1)->offset + (it - 1)->size == it->offset) {
        (it - 1)->size += it->size;
        free_blocks.erase(it);
      }
    }
    const size_t need = align_up(c.node_types[id].byte_size());
    int best = -1;
    for (int k = 0; k < static_cast<int>(free_blocks.size()); ++k) {
      if (free_blocks[k].size >= need &&
          (best < 0 || free_blocks[k].size < free_blocks[best].size)) {
        best = k;
      }
    }
    if (best >= 0 && need > 0) {
      c.offsets[id] = static_cast<int64_t>(free_blocks[best].offset);
      free_blocks[best].offset += need;
      free_blocks[best].size -= need;
      if (free_blocks[best].size == 0) free_blocks.erase(free_blocks.begin() + best);
    } else {
      c.offsets[id] = static_cast<int64_t>(top);
      top += need;
    }
    const int release = last_use[id] < 0 ? t + 1 : last_use[id] + 1;
    if (release <= steps) release_at[std::min(release, steps)].push_back(id);
  }
  c.arena_bytes = top;
  return c;
}

std::vector<Tensor> execute_subgraph(const CompiledSubGraph& c, std::span<const Tensor> inputs) {
  const ComputeGraph& g = c.graph;
  if (inputs.size() != g.input_ids.size()) {
    fail(ErrorCode::kSignatureMismatch, "g" + std::to_string(c.graph_id) + " takes " +
                                            std::to_string(g.input_ids.size()) +
                                            " inputs, got " + std::to_string(inputs.size()));
  }
  for (size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].type() != c.input_types[k]) {
      fail(ErrorCode::kSignatureMismatch,
           "g" + std::to_string(c.graph_id) + " input '" + g.nodes[g.input_ids[k]].name +
               "' expects " + c.input_types[k].to_string() + ", got " +
               inputs[k].type().to_string());
    }
  }
  std::vector<uint64_t> arena((c.arena_bytes + 7) / 8);
  auto* base = reinterpret_cast<std::byte*>(arena.data());
  std::vector<TensorView> views(g.nodes.size());
  for (size_t k = 0; k < g.input_ids.size(); ++k) views[g.input_ids[k]] = inputs[k].view();
  for (const auto& node : g.nodes) {
    if (node.kind == GraphNode::Kind::kConst) views[node.id] = node.literal.view();
  }
  for (int id : c.schedule) {
    const GraphNode& node = g.nodes[id];
    std::vector<TensorView> args;
    args.reserve(node.inputs.size());
    for (int i : node.inputs) args.push_back(views[i]);
    const TensorType& type = c.node_types[id];
    MutableTensorView out{type.shape, type.kind, base + c.offsets[id]};
    run_kernel(node.op, args, out);
    views[id] = TensorView{type.shape, type.kind, out.data};
  }
  std::vector<Tensor> outputs;
  for (int id : g.output_ids) {
    const TensorView& v = views[g.nodes[id].inputs[0]];
    const TensorType& type = c.node_types[id];
    const int64_t count = type.num_elements();
    if (type.kind == ElementKind::kReal) {
      std::vector<float> data(static_cast<size_t>(count));
      if (count > 0) std::memcpy(data.data(), v.data, count * sizeof(float));
      outputs.push_back(Tensor::real(type.shape, std::move(data)));
    } else {
      std::vector<int64_t> data(static_cast<size_t>(count));
      if (count > 0) std::memcpy(data.data(), v.data, count * sizeof(int64_t));
      outputs.push_back(Tensor::integer(type.shape, std::move(data)));
    }
  }
  return outputs;
}

std::map<int, OptimizedGraph> prepare_graphs(const Hcfg& h, const WeightStore& weights,
                                             bool graph_opt) {
  std::map<int, OptimizedGraph> out;
  for (const auto& node : h.nodes) {
    if (node.is_logic()) continue;
    ComputeGraph g = build_graph(node, &weights);
    if (graph_opt) {
      out.emplace(node.id, optimize(std::move(g), weights));
    } else {
      out.emplace(node.id, OptimizedGraph{std::move(g), {}});
    }
  }
  return out;
}

CompiledProgram compile_all(const Hcfg& h, const std::map<int, OptimizedGraph>& graphs,
                            const std::vector<Param>& params,
                            const std::vector<TensorType>& example_types,
                            const WeightStore& weights) {
  if (example_types.size() != params.size()) {
    fail(ErrorCode::kInputShapeMismatch, "model takes " + std::to_string(params.size()) +
                                             " inputs, example has " +
                                             std::to_string(example_types.size()));
  }
  ShapeEnv initial;
  for (size_t k = 0; k < params.size(); ++k) {
    if (example_types[k] != params[k].type) {
      fail(ErrorCode::kInputShapeMismatch, "input '" + params[k].name + "' is declared " +
                                               params[k].type.to_string() + ", example is " +
                                               example_types[k].to_string());
    }
    initial[params[k].name] = example_types[k];
  }

  const int n = static_cast<int>(h.nodes.size());
  CompiledProgram out;
  out.entry_env.resize(n);
  out.exit_env.resize(n);
  std::vector<bool> done(n, false);
  std::vector<bool> queued(n, false);
  std::set<int> worklist = {h.entry};
  queued[h.entry] = true;
  while (!worklist.empty()) {
    // Lowest-id node whose predecessors are all done.
    int pick = -1;
    for (int id : worklist) {
      const auto preds = h.predecessors(id);
      bool ready = true;
      for (int p : preds) ready = ready && done[p];
      if (ready) {
        pick = id;
        break;
      }
    }
    if (pick < 0) {
      // A remaining predecessor is unreachable from the entry: process the
      // lowest id with whatever has been computed so far.
      pick = *worklist.begin();
    }
    worklist.erase(pick);
    const HcfgNode& node = h.nodes[pick];

    ShapeEnv env;
    if (pick == h.entry) {
      env = initial;
    } else {
      bool first = true;
      for (int p : h.predecessors(pick)) {
        if (!out.exit_env[p]) continue;
        const ShapeEnv& pe = *out.exit_env[p];
        if (first) {
          env = pe;
          first = false;
          continue;
        }
        for (auto it = env.begin(); it != env.end();) {
          auto other = pe.find(it->first);
          if (other != pe.end() && other->second == it->second) {
            ++it;
            continue;
          }
          const bool live = std::binary_search(node.live_in.begin(), node.live_in.end(), it->first);
          if (live) {
            fail(ErrorCode::kShapeJoinMismatch,
                 "predecessors of node " + std::to_string(pick) + " disagree on '" + it->first +
                     "': " + it->second.to_string() + " vs " +
                     (other == pe.end() ? std::string("undefined") : other->second.to_string()));
          }
          it = env.erase(it);
        }
      }
    }
    out.entry_env[pick] = env;

    if (node.is_logic()) {
      std::vector<std::string> reads;
      node.cond.lhs.collect_tensor_reads(reads);
      node.cond.rhs.collect_tensor_reads(reads);
      for (const auto& r : reads) {
        auto it = env.find(r);
        if (it == env.end() || it->second.num_elements() != 1) {
          fail(ErrorCode::kNotScalar,
               "condition reads '" + r + "' which is " +
                   (it == env.end() ? std::string("undefined") : it->second.to_string()));
        }
      }
      out.exit_env[pick] = env;
    } else {
      ShapeEnv exit = propagate_block_shapes(node.stmts, env, weights);
      auto g = graphs.find(pick);
      if (g != graphs.end()) {
        if (!g->second.graph.empty()) {
          std::vector<TensorType> in;
          for (const auto& name : g->second.graph.input_names()) {
            auto it = env.find(name);
            if (it == env.end()) {
              fail(ErrorCode::kShapeInferenceError, "no shape for graph input '" + name + "'");
            }
            in.push_back(it->second);
          }
          out.graphs.emplace(pick, plan_schedule(pick, g->second.graph, in, &weights));
          ++out.compile_invocations;
        }
        if (!g->second.residual.empty()) out.residuals.emplace(pick, g->second.residual);
      }
      out.exit_env[pick] = std::move(exit);
    }
    done[pick] = true;
    out.visit_order.push_back(pick);
    for (int s : h.successors(pick)) {
      if (!queued[s]) {
        queued[s] = true;
        worklist.insert(s);
      }
    }
  }
  for (int id = 0; id < n; ++id) {
    if (!done[id]) out.unreachable.push_back(id);
  }
  return out;
}

}  // namespace dynogram
