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

#ifndef DYNOGRAM_HARNESS_H_
#define DYNOGRAM_HARNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/pipeline.h"
#include "dynogram/tensor.h"
#include "dynogram/weights.h"

namespace dynogram {

inline constexpr double kDeltaEpsilon = 1e-10;
inline constexpr int kDifftestInputs = 100;
inline constexpr int kStudyInputs = 1000;

enum class Variant : uint8_t { kDynogram, kNoOpt, kTrace };

std::string_view variant_name(Variant v);
// Accepts "dynogram", "no-opt"/"dynogram-no-opt", "trace"/"trace-baseline".
std::optional<Variant> parse_variant(std::string_view name);

using OutputPair = std::pair<std::vector<Tensor>, std::vector<Tensor>>;

// Largest absolute element difference across all outputs (infinite for
// NaN). Throws kShapeMismatch when the tuples are not comparable.
double max_abs_error(const std::vector<Tensor>& a, const std::vector<Tensor>& b);

// log10(max over pairs of the L-infinity error + 1e-10).
double compute_delta(const std::vector<OutputPair>& pairs);

// Classifier: {argmax of the first output}. Generator: per-row argmax
// tokens of the first output, cut before the first end-of-sequence token.
std::vector<int64_t> post_process(DecisionKind kind, int64_t eos,
                                  const std::vector<Tensor>& outputs);

using DecisionPair = std::pair<std::vector<int64_t>, std::vector<int64_t>>;
double compute_eta(const std::vector<DecisionPair>& pairs);

// Input the trace baseline compiles against; disjoint from the test stream.
std::vector<Tensor> example_inputs(const std::vector<Param>& params, uint64_t seed);

struct MetricsReport {
  std::string model;
  std::string variant;
  double delta = 0;
  double eta = 0;
  int n_inputs = 0;
  uint64_t seed = 0;
  uint64_t transfer_bytes = 0;
  StageTimings timings;

  // Everything except the timings is reproducible.
  std::string to_json(bool include_timings) const;
};

struct InputRecord {
  double error = 0;        // max absolute error against the vendor
  bool consistent = true;  // post-processed decisions equal
  std::vector<bool> vendor_path;  // dynamic decisions taken by the vendor
};

struct Experiment {
  MetricsReport report;
  std::vector<InputRecord> records;
  std::vector<bool> example_path;  // trace variant only
};

// Runs `n` seeded inputs through the reference interpreter and the chosen
// compiled variant.
Experiment run_experiment(const ProgramAst& ast, const WeightStore& weights, Variant variant,
                          int n, uint64_t seed);

std::string format_report_table(const std::vector<MetricsReport>& reports);
std::string format_timing_table(const std::vector<MetricsReport>& reports);
std::string format_ablation_table(const std::vector<std::pair<MetricsReport, MetricsReport>>& rows);

}  // namespace dynogram

#endif  // DYNOGRAM_HARNESS_H_
