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
#include "dynogram/harness.h"
#include "dynogram/host.h"
#include "dynogram/interpreter.h"
#include "dynogram/pipeline.h"
#include "test_support.h"

namespace dynogram {
namespace {

TEST(Interpret, StaticNetMakesNoDecisions) {
  const auto m = testing::load_zoo("static_net");
  const auto r = interpret(m.ast, random_inputs(m.ast.params, 0, 0), m.weights);
  EXPECT_TRUE(r.trace.decisions.empty());
  EXPECT_EQ(r.outputs.at(0).shape(), (Shape{1, 10}));
}

TEST(Interpret, SaturatedGatesAllTaken) {
  auto m = testing::load_zoo("skipnet");
  for (int i = 0; i < 6; ++i) {
    const std::string k = "gate." + std::to_string(i);
    m.weights.set(k + ".w", Tensor::zeros({{16, 1}, ElementKind::kReal}));
    m.weights.set(k + ".b", Tensor::real({1, 1}, {10.0f}));
  }
  for (uint64_t i = 0; i < 10; ++i) {
    const auto r = interpret(m.ast, random_inputs(m.ast.params, 0, i), m.weights);
    EXPECT_EQ(r.trace.dynamic_outcomes(), std::vector<bool>(6, true));
  }
}

TEST(Interpret, RejectsWrongInputShape) {
  const auto m = testing::load_zoo("static_net");
  try {
    interpret(m.ast, std::vector{Tensor::zeros({{1, 15}, ElementKind::kReal})}, m.weights);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInputShapeMismatch);
  }
}

TEST(TraceCompile, StaticNetBehavesLikeDynogram) {
  const auto m = testing::load_zoo("static_net");
  const Bundle trace = trace_compile(m.ast, example_inputs(m.ast.params, 0), m.weights);
  const Bundle dyn = compile_program(m.ast, m.weights).bundle;
  EXPECT_EQ(trace.host.code.size(), 2u);
  for (uint64_t i = 0; i < 50; ++i) {
    const auto in = random_inputs(m.ast.params, 0, i);
    EXPECT_TRUE(testing::bitwise_equal(run_host(trace, in).outputs, run_host(dyn, in).outputs));
  }
}

TEST(TraceCompile, ReplaysTheExamplePath) {
  for (const std::string name : {"skipnet", "early_exit", "decoder"}) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    const auto example = example_inputs(m.ast.params, 0);
    const InterpResult ex = interpret(m.ast, example, m.weights);
    const Bundle trace = trace_compile(m.ast, example, m.weights);
    EXPECT_EQ(trace.host.count(HostInstr::Op::kBranch), 0);
    int diverged = 0, same_path = 0;
    for (uint64_t i = 0; i < 200; ++i) {
      const auto in = random_inputs(m.ast.params, 0, i);
      // The example's statement list, replayed on this input.
      TensorEnv env;
      env[m.ast.params[0].name] = in[0];
      execute_statements(ex.trace.stmts, env, m.weights);
      std::vector<Tensor> replay;
      for (const auto& r : ex.trace.returns) replay.push_back(env.at(r));
      const auto got = run_host(trace, in).outputs;
      EXPECT_TRUE(testing::bitwise_equal(got, replay));

      const InterpResult ref = interpret(m.ast, in, m.weights);
      if (ref.trace.dynamic_outcomes() == ex.trace.dynamic_outcomes()) {
        ++same_path;
        EXPECT_LT(max_abs_error(got, ref.outputs), 1e-6);
      } else if (max_abs_error(got, ref.outputs) > 0) {
        ++diverged;
      }
    }
    EXPECT_GT(diverged, 0);
    EXPECT_GT(same_path, 0);
  }
}

}  // namespace
}  // namespace dynogram
