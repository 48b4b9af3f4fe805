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

#include <cmath>

#include <gtest/gtest.h>

#include "dynogram/error.h"
#include "dynogram/harness.h"
#include "dynogram/host.h"
#include "dynogram/interpreter.h"
#include "test_support.h"

namespace dynogram {
namespace {

TEST(Delta, Floor) {
  const Tensor a = Tensor::real({3}, {1, 2, 3});
  EXPECT_DOUBLE_EQ(compute_delta({{{a}, {a}}, {{a}, {a}}}), -10.0);
}

TEST(Delta, SingleDifference) {
  // 0.25 and 0.25 + 2^-17 are exact in float, so the gap is exact too.
  const double gap = std::ldexp(1.0, -17);
  const Tensor a = Tensor::real({2}, {0.25f, 1.0f});
  const Tensor b = Tensor::real({2}, {static_cast<float>(0.25 + gap), 1.0f});
  EXPECT_NEAR(compute_delta({{{a}, {a}}, {{a}, {b}}}), std::log10(gap + 1e-10), 1e-12);
  const Tensor c = Tensor::real({2}, {0.5f, 1.0f});
  const Tensor d = Tensor::real({2}, {0.5f + 1e-5f, 1.0f});
  EXPECT_NEAR(compute_delta({{{c}, {d}}}), -5.0, 1e-3);
}

TEST(Delta, ShapeMismatch) {
  EXPECT_THROW(compute_delta({{{Tensor::real({2}, {1, 2})}, {Tensor::real({3}, {1, 2, 3})}}}),
               Error);
}

TEST(Eta, Fractions) {
  std::vector<DecisionPair> same(10, {{1}, {1}});
  EXPECT_EQ(compute_eta(same), 0.0);
  std::vector<DecisionPair> mixed;
  for (int i = 0; i < 1000; ++i) mixed.push_back({{i < 830 ? 1 : 2}, {2}});
  EXPECT_DOUBLE_EQ(compute_eta(mixed), 0.83);
}

TEST(PostProcess, ClassifierAndGenerator) {
  EXPECT_EQ(post_process(DecisionKind::kClassifier, 0, {Tensor::real({1, 3}, {0.1f, 0.9f, 0.0f})}),
            std::vector<int64_t>{1});
  const Tensor seq = Tensor::real({4, 3}, {0, 1, 0,  //
                                           0, 0, 1,  //
                                           1, 0, 0,  //
                                           0, 1, 0});
  EXPECT_EQ(post_process(DecisionKind::kGenerator, 0, {seq}), (std::vector<int64_t>{1, 2}));
  EXPECT_EQ(post_process(DecisionKind::kGenerator, 7, {seq}), (std::vector<int64_t>{1, 2, 0, 1}));
  // Sequences of different length never match.
  EXPECT_EQ(compute_eta({{{1, 2}, {1, 2, 0}}}), 1.0);
}

TEST(Inputs, SeededAndUniform) {
  const std::vector<Param> params = {{"x", {{1, 16}, ElementKind::kReal}}};
  EXPECT_EQ(random_inputs(params, 3, 4), random_inputs(params, 3, 4));
  EXPECT_FALSE(random_inputs(params, 3, 4) == random_inputs(params, 3, 5));
  EXPECT_FALSE(random_inputs(params, 3, 4) == random_inputs(params, 4, 4));
  EXPECT_FALSE(example_inputs(params, 0) == random_inputs(params, 0, 0));
  for (uint64_t i = 0; i < 100; ++i) {
    const Tensor t = random_inputs(params, 0, i)[0];
    for (float v : t.reals()) {
      EXPECT_GE(v, -1.0f);
      EXPECT_LT(v, 1.0f);
    }
  }
}

TEST(Experiment, StudyExamples) {
  const auto stat = testing::load_zoo("static_net");
  EXPECT_EQ(run_experiment(stat.ast, stat.weights, Variant::kTrace, 200, 0).report.eta, 0.0);
  const auto skip = testing::load_zoo("skipnet");
  const auto opt = run_experiment(skip.ast, skip.weights, Variant::kDynogram, 200, 0).report;
  const auto no_opt = run_experiment(skip.ast, skip.weights, Variant::kNoOpt, 200, 0).report;
  EXPECT_EQ(opt.eta, 0.0);
  EXPECT_EQ(opt.delta, -10.0);
  EXPECT_LT(opt.transfer_bytes, no_opt.transfer_bytes);
  EXPECT_EQ(opt.variant, "dynogram");
  EXPECT_EQ(no_opt.variant, "dynogram-no-opt");
}

TEST(Experiment, ReportsAreReproducible) {
  const auto m = testing::load_zoo("early_exit");
  for (Variant v : {Variant::kDynogram, Variant::kTrace}) {
    const auto a = run_experiment(m.ast, m.weights, v, 100, 5).report;
    const auto b = run_experiment(m.ast, m.weights, v, 100, 5).report;
    EXPECT_EQ(a.to_json(false), b.to_json(false));
    EXPECT_GE(a.delta, std::log10(kDeltaEpsilon));
  }
}

// The skipnet tracing golden, recomputed here by comparing argmaxes of the
// trace bundle and the interpreter directly.
TEST(Experiment, SkipnetTraceGolden) {
  const auto m = testing::load_zoo("skipnet");
  const Bundle trace = trace_compile(m.ast, example_inputs(m.ast.params, 0), m.weights);
  auto argmax = [](const Tensor& t) {
    int64_t best = 0;
    for (int64_t i = 1; i < t.num_elements(); ++i) {
      if (t.reals()[i] > t.reals()[best]) best = i;
    }
    return best;
  };
  int differ = 0;
  for (uint64_t i = 0; i < 1000; ++i) {
    const auto in = random_inputs(m.ast.params, 0, i);
    differ += argmax(run_host(trace, in).outputs[0]) !=
              argmax(interpret(m.ast, in, m.weights).outputs[0]);
  }
  const auto rep = run_experiment(m.ast, m.weights, Variant::kTrace, 1000, 0).report;
  EXPECT_DOUBLE_EQ(rep.eta, differ / 1000.0);
  EXPECT_EQ(differ, 700);
  EXPECT_EQ(rep.variant, "trace-baseline");
}

TEST(Report, Tables) {
  MetricsReport r;
  r.model = "m";
  r.variant = "dynogram";
  r.delta = -10;
  const std::string t = format_report_table({r});
  EXPECT_NE(t.find("-10.00"), std::string::npos);
  EXPECT_NE(format_timing_table({r}).find("rewrite"), std::string::npos);
  EXPECT_EQ(r.to_json(false).find("compile_seconds"), std::string::npos);
  EXPECT_NE(r.to_json(true).find("compile_seconds"), std::string::npos);
}

}  // namespace
}  // namespace dynogram
