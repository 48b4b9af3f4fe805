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

#include <set>

#include <gtest/gtest.h>

#include "dynogram/bundle.h"
#include "dynogram/driver.h"
#include "dynogram/error.h"
#include "dynogram/interpreter.h"
#include "dynogram/pipeline.h"
#include "test_support.h"

namespace dynogram {
namespace {

const TensorType kVec{{1, 4}, ElementKind::kReal};

ComputeGraph graph_of(const std::string& body, const std::vector<std::string>& outs) {
  auto p = rewrite(parse("model m(x: tensor<1,4>) -> 1 { " + body + " }")).ast;
  p.body.pop_back();
  return build_graph(p.body, {"x"}, outs);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Plan, ChainPingPongs) {
  const ComputeGraph g =
      graph_of("let a = relu(x); let b = sigmoid(a); let c = relu(b); return c;", {"c"});
  const CompiledSubGraph c = plan_schedule(0, g, std::vector{kVec}, nullptr);
  EXPECT_EQ(c.schedule.size(), 3u);
  EXPECT_EQ(c.num_buffers(), 2u);
  EXPECT_EQ(c.arena_bytes, 2 * kVec.byte_size());
}

TEST(Plan, SingleNode) {
  const CompiledSubGraph c =
      plan_schedule(0, graph_of("let y = relu(x); return y;", {"y"}), std::vector{kVec}, nullptr);
  EXPECT_EQ(c.num_buffers(), 1u);
  EXPECT_EQ(c.arena_bytes, kVec.byte_size());
}

TEST(Plan, SharedProducerOutlivesBothConsumers) {
  const ComputeGraph g = graph_of(
      "let p = relu(x); let a = sigmoid(p); let b = relu(p); let c = add(a, b); return c;",
      {"c"});
  const CompiledSubGraph c = plan_schedule(0, g, std::vector{kVec}, nullptr);
  ASSERT_EQ(c.schedule.size(), 4u);
  const int p = c.schedule[0], a = c.schedule[1], b = c.schedule[2], out = c.schedule[3];
  EXPECT_NE(c.offsets[a], c.offsets[p]);
  EXPECT_NE(c.offsets[b], c.offsets[p]);
  EXPECT_NE(c.offsets[b], c.offsets[a]);
  // p is free once b has run.
  EXPECT_EQ(c.offsets[out], c.offsets[p]);
}

TEST(Execute, MatchesEvaluateAndChecksSignature) {
  const ComputeGraph g = graph_of("let a = relu(x); let b = relu(a); return b;", {"b"});
  const CompiledSubGraph c = plan_schedule(0, g, std::vector{kVec}, nullptr);
  const auto zeros = execute_subgraph(c, std::vector{Tensor::zeros(kVec)});
  EXPECT_EQ(zeros.at(0), Tensor::zeros(kVec));
  const Tensor x = uniform_tensor(kVec, 9, -1, 1);
  EXPECT_EQ(execute_subgraph(c, std::vector{x}).at(0), evaluate(g, {{"x", x}}, {}).at("b"));
  EXPECT_EQ(code_of([&] { execute_subgraph(c, std::vector{Tensor::real({4}, {1, 2, 3, 4})}); }),
            ErrorCode::kSignatureMismatch);
}

TEST(CompileAll, StaticNetIsOneGraph) {
  const auto m = testing::load_zoo("static_net");
  const Compilation c = compile_program(m.ast, m.weights);
  EXPECT_EQ(c.compiled.graphs.size(), 1u);
  EXPECT_EQ(c.compiled.compile_invocations, 1);
}

TEST(CompileAll, SkipnetGraphCount) {
  const auto m = testing::load_zoo("skipnet");
  const Compilation c = compile_program(m.ast, m.weights);
  // 19 tensor blocks, 6 of them pure identity skips.
  EXPECT_EQ(c.compiled.graphs.size(), 19u - 6u);
}

TEST(CompileAll, ZooInvariants) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    for (bool opt : {true, false}) {
      CompileOptions o;
      o.graph_opt = opt;
      const Compilation c = compile_program(m.ast, m.weights, o);
      const Hcfg& h = c.hcfg;

      // Reachable surviving tensor blocks, counted by a separate walk.
      std::vector<bool> seen(h.nodes.size(), false);
      std::vector<int> stack = {h.entry};
      while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = true;
        for (int s : h.successors(id)) stack.push_back(s);
      }
      int surviving = 0;
      for (const auto& n : h.nodes) {
        surviving += seen[n.id] && !n.is_logic() && c.graphs.count(n.id) &&
                     !c.graphs.at(n.id).graph.empty();
      }
      EXPECT_EQ(c.compiled.compile_invocations, surviving);
      EXPECT_EQ(static_cast<int>(c.compiled.graphs.size()), surviving);
      EXPECT_EQ(c.compiled.visit_order.size(), static_cast<size_t>(std::count(seen.begin(), seen.end(), true)));

      for (const auto& n : h.nodes) {
        if (!n.is_logic()) continue;
        const auto preds = h.predecessors(n.id);
        ASSERT_TRUE(c.compiled.entry_env[n.id].has_value());
        const ShapeEnv& env = *c.compiled.entry_env[n.id];
        EXPECT_EQ(*c.compiled.exit_env[n.id], env);
        for (int p : preds) {
          const ShapeEnv& pe = *c.compiled.exit_env[p];
          if (preds.size() == 1) {
            EXPECT_EQ(env, pe);
          } else {
            for (const auto& v : n.live_in) EXPECT_EQ(env.at(v), pe.at(v)) << v;
          }
        }
      }
    }
  }
}

TEST(CompileAll, ShapeTraceFidelity) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    const Compilation c = compile_program(m.ast, m.weights);
    for (uint64_t i = 0; i < 200; ++i) {
      const auto walk = walk_hcfg(c.hcfg, m.ast.params, random_inputs(m.ast.params, 1, i), m.weights);
      for (const auto& [id, types] : walk.entry_types) {
        const ShapeEnv& env = *c.compiled.entry_env[id];
        for (const auto& [v, t] : types) EXPECT_EQ(env.at(v), t) << "node " << id << " " << v;
      }
    }
  }
}

TEST(CompileAll, Deterministic) {
  for (const auto& name : testing::zoo_names()) {
    const auto m = testing::load_zoo(name);
    EXPECT_EQ(bundle_files(compile_program(m.ast, m.weights).bundle),
              bundle_files(compile_program(m.ast, m.weights).bundle))
        << name;
  }
}

TEST(CompileAll, Errors) {
  const ProgramAst join = parse(
      "model m(x: tensor<1,4>) -> 1 { let s = reduce_sum(x);"
      "  if scalar(s) > 0.0 { let y = relu(x); } else { let y = concat(x, x, axis=0); }"
      "  return y; }");
  EXPECT_EQ(code_of([&] { compile_program(join, {}); }), ErrorCode::kShapeJoinMismatch);

  const ProgramAst vec = parse(
      "model m(x: tensor<1,4>) -> 1 { if scalar(x) > 0.0 { x = relu(x); } return x; }");
  EXPECT_EQ(code_of([&] { compile_program(vec, {}); }), ErrorCode::kNotScalar);

  const auto m = testing::load_zoo("static_net");
  CompileOptions o;
  o.example_types = std::vector<TensorType>{{{2, 16}, ElementKind::kReal}};
  EXPECT_EQ(code_of([&] { compile_program(m.ast, m.weights, o); }),
            ErrorCode::kInputShapeMismatch);
}

}  // namespace
}  // namespace dynogram
