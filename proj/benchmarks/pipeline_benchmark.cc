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

// Per-stage compile cost and per-inference cost over the model zoo.
// Argument 0..3 selects the model.

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dynogram/binary_io.h"
#include "dynogram/frontend.h"
#include "dynogram/hcfg.h"
#include "dynogram/host.h"
#include "dynogram/interpreter.h"
#include "dynogram/pipeline.h"
#include "dynogram/random.h"
#include "dynogram/rewriter.h"

namespace dynogram {
namespace {

const std::vector<std::string> kModels = {"static_net", "skipnet", "early_exit", "decoder"};

struct Loaded {
  std::string source;
  ProgramAst ast;
  RewrittenProgram rewritten;
  WeightStore weights;
};

const Loaded& model(int64_t index) {
  static std::vector<Loaded> cache = [] {
    std::vector<Loaded> out;
    for (const auto& name : kModels) {
      Loaded l;
      l.source = read_file(std::string(DYNOGRAM_ZOO_DIR) + "/" + name + ".dtpl");
      l.ast = parse_and_validate(l.source);
      l.rewritten = rewrite(l.ast);
      l.weights = init_weights(l.ast, l.rewritten, 0);
      out.push_back(std::move(l));
    }
    return out;
  }();
  return cache.at(static_cast<size_t>(index));
}

void BM_Parse(benchmark::State& state) {
  const Loaded& m = model(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parse_and_validate(m.source));
  state.SetLabel(kModels[state.range(0)]);
}

void BM_Rewrite(benchmark::State& state) {
  const Loaded& m = model(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rewrite(m.ast));
  state.SetLabel(kModels[state.range(0)]);
}

void BM_Hcfg(benchmark::State& state) {
  const Loaded& m = model(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_hcfg(m.rewritten));
  state.SetLabel(kModels[state.range(0)]);
}

void BM_Compile(benchmark::State& state) {
  const Loaded& m = model(state.range(0));
  CompileOptions opts;
  opts.graph_opt = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(compile_program(m.ast, m.weights, opts));
  state.SetLabel(kModels[state.range(0)] + (opts.graph_opt ? "" : " no-opt"));
}

void BM_Interpret(benchmark::State& state) {
  const Loaded& m = model(state.range(0));
  const auto in = random_inputs(m.ast.params, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(interpret(m.ast, in, m.weights));
  state.SetLabel(kModels[state.range(0)]);
}

void BM_RunHost(benchmark::State& state) {
  const Loaded& m = model(state.range(0));
  CompileOptions opts;
  opts.graph_opt = state.range(1) != 0;
  const Bundle b = compile_program(m.ast, m.weights, opts).bundle;
  uint64_t i = 0;
  uint64_t bytes = 0;
  for (auto _ : state) {
    const HostRun r = run_host(b, random_inputs(m.ast.params, 0, i++ % 64));
    bytes += r.meter.total();
    benchmark::DoNotOptimize(r);
  }
  state.counters["transfer_bytes"] =
      benchmark::Counter(static_cast<double>(bytes), benchmark::Counter::kAvgIterations);
  state.SetLabel(kModels[state.range(0)] + (opts.graph_opt ? "" : " no-opt"));
}

void BM_Dense(benchmark::State& state) {
  const int64_t n = state.range(0);
  const Tensor x = uniform_tensor({{1, n}, ElementKind::kReal}, 1, -1, 1);
  const Tensor w = uniform_tensor({{n, n}, ElementKind::kReal}, 2, -1, 1);
  const Tensor b = uniform_tensor({{1, n}, ElementKind::kReal}, 3, -1, 1);
  const Operator op{OpKind::kDense, {}};
  const std::vector<Tensor> args = {x, w, b};
  for (auto _ : state) benchmark::DoNotOptimize(apply_kernel(op, args));
  state.SetItemsProcessed(state.iterations() * n * n);
}

BENCHMARK(BM_Parse)->DenseRange(0, 3);
BENCHMARK(BM_Rewrite)->DenseRange(0, 3);
BENCHMARK(BM_Hcfg)->DenseRange(0, 3);
BENCHMARK(BM_Compile)->ArgsProduct({{0, 1, 2, 3}, {0, 1}});
BENCHMARK(BM_Interpret)->DenseRange(0, 3);
BENCHMARK(BM_RunHost)->ArgsProduct({{0, 1, 2, 3}, {0, 1}});
BENCHMARK(BM_Dense)->RangeMultiplier(4)->Range(16, 256);

}  // namespace
}  // namespace dynogram

BENCHMARK_MAIN();
