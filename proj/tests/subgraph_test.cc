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

#include <gtest/gtest.h>

#include "dynogram/error.h"
#include "dynogram/graph.h"
#include "dynogram/pipeline.h"
#include "test_support.h"

namespace dynogram {
namespace {

// Tensor statements of a single-block program (the return is dropped).
std::vector<Stmt> block_of(const std::string& body) {
  auto p = rewrite(parse("model m(x: tensor<1,4>, b: tensor<1,4>) -> 1 { " + body + " }")).ast;
  p.body.pop_back();
  return p.body;
}

TensorEnv random_env(const std::vector<std::string>& names, uint64_t seed) {
  TensorEnv env;
  for (size_t k = 0; k < names.size(); ++k) {
    env[names[k]] = uniform_tensor({{1, 4}, ElementKind::kReal}, mix_seed(seed, k), -1, 1);
  }
  return env;
}

// What the host holds after a block: its entry values, overwritten by the
// graph outputs, then the residual.
TensorEnv host_env(const ComputeGraph& g, const TensorEnv& in, const HostResidual& r,
                   const WeightStore& w) {
  TensorEnv env = in;
  for (auto& [k, v] : evaluate(g, in, w)) env[k] = v;
  apply_residual(r, in, env);
  return env;
}

// evaluate(before) versus evaluate(after) followed by the residual.
void expect_equivalent(const ComputeGraph& before, const ComputeGraph& after,
                       const HostResidual& residual, const WeightStore& w, int trials = 20) {
  for (int t = 0; t < trials; ++t) {
    const TensorEnv in = random_env(before.input_names(), t);
    const TensorEnv ref = evaluate(before, in, w);
    TensorEnv got = host_env(after, in, residual, w);
    for (const auto& [name, value] : ref) {
      ASSERT_TRUE(got.count(name)) << name;
      EXPECT_EQ(got.at(name), value) << name;
    }
  }
}

TEST(BuildGraph, ReassignmentIsSsa) {
  const ComputeGraph g = build_graph(block_of("let y = relu(x); y = add(y, b); return y;"),
                                     {"b", "x"}, {"y"});
  EXPECT_EQ(g.num_ops(), 2);
  EXPECT_EQ(g.output_names(), std::vector<std::string>{"y"});
  EXPECT_EQ(g.input_names(), (std::vector<std::string>{"b", "x"}));
}

TEST(BuildGraph, WeightBecomesKeyedConst) {
  WeightStore w;
  w.set("blk.0", Tensor::real({4, 4}, std::vector<float>(16, 0.5f)));
  const auto stmts = rewrite(parse("model m(x: tensor<1,4>) -> 1 { weight \"blk.*\" : real<4,4>;"
                                   " let y = matmul(x, w[\"blk\", 0]); return y; }"))
                         .ast.body;
  const ComputeGraph g = build_graph({stmts[0]}, {"x"}, {"y"}, &w);
  int keyed = 0;
  for (const auto& n : g.nodes) keyed += n.is_weight() && n.weight_key == "blk.0";
  EXPECT_EQ(keyed, 1);
  WeightStore empty;
  EXPECT_THROW(
      {
        try {
          build_graph({stmts[0]}, {"x"}, {"y"}, &empty);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kUnknownWeightKey);
          throw;
        }
      },
      Error);
}

TEST(BuildGraph, SkipPath) {
  const ComputeGraph g = build_graph(block_of("let x2 = identity(x); return x2;"), {"x"}, {"x2"});
  ASSERT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(g.nodes[0].kind, GraphNode::Kind::kInput);
  EXPECT_EQ(g.nodes[1].op.kind, OpKind::kIdentity);
  EXPECT_EQ(g.nodes[2].kind, GraphNode::Kind::kOutput);
}

TEST(IdentityElimination, BarePassThroughNeedsNoCopy) {
  ComputeGraph g = build_graph(block_of("let y = relu(x); return y;"), {"x"}, {"x", "y"});
  const HostResidual r = eliminate_identity_paths(g);
  EXPECT_TRUE(r.empty());
  EXPECT_EQ(g.output_names(), std::vector<std::string>{"y"});
}

TEST(IdentityElimination, PureCopyLeavesGraph) {
  const ComputeGraph before =
      build_graph(block_of("let y = identity(x); return y;"), {"x"}, {"y"});
  ComputeGraph g = before;
  const HostResidual r = eliminate_identity_paths(g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, ResidualInstr::Kind::kCopy);
  EXPECT_EQ(r[0].dst, "y");
  EXPECT_EQ(r[0].src, "x");
  EXPECT_TRUE(g.empty());
  expect_equivalent(before, g, r, {});
}

TEST(IdentityElimination, ComputedOutputUntouched) {
  ComputeGraph g = build_graph(block_of("let y = relu(x); return y;"), {"x"}, {"y"});
  const ComputeGraph before = g;
  EXPECT_TRUE(eliminate_identity_paths(g).empty());
  EXPECT_EQ(g, before);
}

TEST(IdentityElimination, SharedIdentityKeptForInternalConsumer) {
  // x -> identity -> {Output y, relu -> Output z}
  const ComputeGraph before = build_graph(
      block_of("let y = identity(x); let z = relu(y); return y;"), {"x"}, {"y", "z"});
  ComputeGraph g = before;
  const HostResidual r = eliminate_identity_paths(g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].dst, "y");
  EXPECT_EQ(g.output_names(), std::vector<std::string>{"z"});
  int identities = 0;
  for (const auto& n : g.nodes) identities += n.kind == GraphNode::Kind::kOp && n.op.kind == OpKind::kIdentity;
  EXPECT_EQ(identities, 1);
  expect_equivalent(before, g, r, {});
}

TEST(ConstHoisting, FoldsConstantSum) {
  const ComputeGraph before = build_graph(
      block_of("let y = add(real<1,2>[1.0, 2.0], real<1,2>[3.0, 4.0]); return y;"), {}, {"y"});
  ComputeGraph g = before;
  const HostResidual r = hoist_constant_outputs(g, {});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, ResidualInstr::Kind::kAssignConst);
  EXPECT_EQ(r[0].literal, Tensor::real({1, 2}, {4, 6}));
  EXPECT_TRUE(g.empty());
}

TEST(ConstHoisting, InputDependentOutputUntouched) {
  ComputeGraph g =
      build_graph(block_of("let y = add(x, real<1,4>[1.0]); return y;"), {"x"}, {"y"});
  const ComputeGraph before = g;
  EXPECT_TRUE(hoist_constant_outputs(g, {}).empty());
  EXPECT_EQ(g, before);
}

TEST(ConstHoisting, TakesPrecedenceOverCopy) {
  const ComputeGraph before =
      build_graph(block_of("let y = identity(real<1,3>[1.0, 2.0, 3.0]); return y;"), {}, {"y"});
  const OptimizedGraph o = optimize(before, {});
  ASSERT_EQ(o.residual.size(), 1u);
  EXPECT_EQ(o.residual[0].kind, ResidualInstr::Kind::kAssignConst);
  EXPECT_EQ(o.residual[0].literal, Tensor::real({1, 3}, {1, 2, 3}));
  EXPECT_TRUE(o.graph.empty());
  expect_equivalent(before, o.graph, o.residual, {});
}

// Both passes on every zoo block: bitwise semantics, idempotence and no
// growth.
TEST(Optimizer, ZooSoundness) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    CompileOptions opts;
    opts.graph_opt = false;
    const Compilation c = compile_program(m.ast, m.weights, opts);
    for (const auto& node : c.hcfg.nodes) {
      if (node.is_logic() || !c.compiled.entry_env[node.id]) continue;
      const ShapeEnv& types = *c.compiled.entry_env[node.id];
      const ComputeGraph before = build_graph(node, &m.weights);
      const OptimizedGraph o = optimize(before, m.weights);
      EXPECT_LE(o.graph.nodes.size(), before.nodes.size());
      const OptimizedGraph again = optimize(o.graph, m.weights);
      EXPECT_TRUE(again.residual.empty());
      EXPECT_EQ(again.graph, o.graph);
      for (uint64_t t = 0; t < 100; ++t) {
        TensorEnv in;
        uint64_t salt = 0;
        for (const auto& v : before.input_names()) {
          in[v] = uniform_tensor(types.at(v), mix_seed(t, ++salt), -1, 1);
          if (in[v].kind() == ElementKind::kInt) in[v] = Tensor::zeros(types.at(v));
        }
        const TensorEnv ref = evaluate(before, in, m.weights);
        const TensorEnv got = host_env(o.graph, in, o.residual, m.weights);
        for (const auto& [v, value] : ref) {
          ASSERT_TRUE(got.count(v)) << "node " << node.id << " " << v;
          EXPECT_EQ(got.at(v), value) << v;
        }
      }
    }
  }
}

TEST(Optimizer, SkipBlocksDegenerateToHost) {
  const auto m = testing::load_zoo("skipnet");
  const Compilation c = compile_program(m.ast, m.weights);
  int host_only = 0;
  for (const auto& n : c.hcfg.nodes) {
    if (n.is_logic()) continue;
    const auto g = c.graphs.find(n.id);
    if (g != c.graphs.end() && g->second.graph.empty() && !g->second.residual.empty()) {
      EXPECT_EQ(c.compiled.graphs.count(n.id), 0u);
      ++host_only;
    }
  }
  EXPECT_EQ(host_only, 6);
}

}  // namespace
}  // namespace dynogram
