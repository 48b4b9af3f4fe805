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

#include "dynogram/harness.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dynogram/error.h"
#include "dynogram/host.h"
#include "dynogram/interpreter.h"
#include "dynogram/random.h"
#include "json.hpp"

namespace dynogram {

namespace {

constexpr uint64_t kExampleSalt = 0x6578616d706c65ULL;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, size_t width, bool left) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

// Aligned table: first column left-aligned, the rest right-aligned.
std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()));
    for (size_t k = 0; k < r.size(); ++k) widths[k] = std::max(widths[k], r[k].size());
  }
  std::string out;
  for (size_t i = 0; i < rows.size(); ++i) {
    std::string line;
    for (size_t k = 0; k < rows[i].size(); ++k) {
      if (k) line += "  ";
      line += pad(rows[i][k], widths[k], k == 0);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (i == 0) {
      size_t total = 0;
      for (size_t w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

int64_t argmax_flat(const Tensor& t, int64_t begin, int64_t end) {
  int64_t best = begin;
  for (int64_t i = begin + 1; i < end; ++i) {
    if (t.element_as_double(i) > t.element_as_double(best)) best = i;
  }
  return best - begin;
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kDynogram:
      return "dynogram";
    case Variant::kNoOpt:
      return "dynogram-no-opt";
    case Variant::kTrace:
      return "trace-baseline";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "dynogram") return Variant::kDynogram;
  if (name == "no-opt" || name == "dynogram-no-opt") return Variant::kNoOpt;
  if (name == "trace" || name == "trace-baseline") return Variant::kTrace;
  return std::nullopt;
}

double max_abs_error(const std::vector<Tensor>& a, const std::vector<Tensor>& b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kShapeMismatch, "output counts differ: " + std::to_string(a.size()) +
                                        " vs " + std::to_string(b.size()));
  }
  double worst = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k].shape() != b[k].shape()) {
      fail(ErrorCode::kShapeMismatch, "output " + std::to_string(k) + " shapes differ: " +
                                          a[k].type().to_string() + " vs " +
                                          b[k].type().to_string());
    }
    for (int64_t i = 0; i < a[k].num_elements(); ++i) {
      const double d = std::fabs(a[k].element_as_double(i) - b[k].element_as_double(i));
      worst = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(worst, d);
    }
  }
  return worst;
}

double compute_delta(const std::vector<OutputPair>& pairs) {
  double worst = 0;
  for (const auto& [a, b] : pairs) worst = std::max(worst, max_abs_error(a, b));
  return std::log10(worst + kDeltaEpsilon);
}

std::vector<int64_t> post_process(DecisionKind kind, int64_t eos,
                                  const std::vector<Tensor>& outputs) {
  if (outputs.empty()) fail(ErrorCode::kInvalidArgument, "no outputs to post-process");
  const Tensor& t = outputs[0];
  if (t.num_elements() == 0) return {};
  if (kind == DecisionKind::kClassifier) return {argmax_flat(t, 0, t.num_elements())};
  const int64_t cols = t.rank() == 0 ? 1 : t.shape().back();
  const int64_t rows = cols == 0 ? 0 : t.num_elements() / cols;
  std::vector<int64_t> tokens;
  for (int64_t r = 0; r < rows; ++r) {
    const int64_t tok = argmax_flat(t, r * cols, (r + 1) * cols);
    if (tok == eos) break;
    tokens.push_back(tok);
  }
  return tokens;
}

double compute_eta(const std::vector<DecisionPair>& pairs) {
  if (pairs.empty()) return 0;
  size_t differ = 0;
  for (const auto& [a, b] : pairs) differ += a != b;
  return static_cast<double>(differ) / static_cast<double>(pairs.size());
}

std::vector<Tensor> example_inputs(const std::vector<Param>& params, uint64_t seed) {
  return random_inputs(params, mix_seed(seed, kExampleSalt), 0);
}

std::string MetricsReport::to_json(bool include_timings) const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["variant"] = variant;
  j["n_inputs"] = n_inputs;
  j["seed"] = seed;
  j["delta"] = std::round(delta * 1e6) / 1e6;
  j["eta"] = eta;
  j["transfer_bytes"] = transfer_bytes;
  if (include_timings) {
    j["compile_seconds"] = {{"rewrite", timings.rewrite},
                            {"hcfg", timings.hcfg},
                            {"graph_opt", timings.graph_opt},
                            {"backend", timings.backend}};
  }
  return j.dump(2);
}

Experiment run_experiment(const ProgramAst& ast, const WeightStore& weights, Variant variant,
                          int n, uint64_t seed) {
  Experiment ex;
  MetricsReport& rep = ex.report;
  rep.model = ast.name;
  rep.variant = std::string(variant_name(variant));
  rep.n_inputs = n;
  rep.seed = seed;
  Bundle bundle;
  if (variant == Variant::kTrace) {
    const auto example = example_inputs(ast.params, seed);
    const auto start = std::chrono::steady_clock::now();
    bundle = trace_compile(ast, example, weights);
    rep.timings.backend =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ex.example_path = interpret(ast, example, weights).trace.dynamic_outcomes();
  } else {
    CompileOptions opts;
    opts.graph_opt = variant == Variant::kDynogram;
    Compilation c = compile_program(ast, weights, opts);
    rep.timings = c.timings;
    bundle = std::move(c.bundle);
  }
  std::vector<OutputPair> outputs;
  std::vector<DecisionPair> decisions;
  for (int i = 0; i < n; ++i) {
    const auto inputs = random_inputs(ast.params, seed, static_cast<uint64_t>(i));
    InterpResult vendor = interpret(ast, inputs, weights);
    HostRun compiled = run_host(bundle, inputs);
    rep.transfer_bytes += compiled.meter.total();
    InputRecord rec;
    rec.error = max_abs_error(compiled.outputs, vendor.outputs);
    const auto dc = post_process(ast.decision_kind, ast.eos_token, compiled.outputs);
    const auto dv = post_process(ast.decision_kind, ast.eos_token, vendor.outputs);
    rec.consistent = dc == dv;
    rec.vendor_path = vendor.trace.dynamic_outcomes();
    ex.records.push_back(std::move(rec));
    decisions.emplace_back(dc, dv);
    outputs.emplace_back(std::move(compiled.outputs), std::move(vendor.outputs));
  }
  rep.delta = compute_delta(outputs);
  rep.eta = compute_eta(decisions);
  return ex;
}

std::string format_report_table(const std::vector<MetricsReport>& reports) {
  std::vector<std::vector<std::string>> rows = {
      {"model", "variant", "n", "delta", "eta", "transfer bytes"}};
  for (const auto& r : reports) {
    rows.push_back({r.model, r.variant, std::to_string(r.n_inputs), fixed(r.delta, 2),
                    fixed(r.eta, 3), std::to_string(r.transfer_bytes)});
  }
  return render(rows);
}

std::string format_timing_table(const std::vector<MetricsReport>& reports) {
  std::vector<std::vector<std::string>> rows = {
      {"model", "variant", "rewrite ms", "hcfg ms", "graph-opt ms", "backend ms", "total ms"}};
  for (const auto& r : reports) {
    const auto& t = r.timings;
    rows.push_back({r.model, r.variant, fixed(t.rewrite * 1e3, 3), fixed(t.hcfg * 1e3, 3),
                    fixed(t.graph_opt * 1e3, 3), fixed(t.backend * 1e3, 3),
                    fixed(t.total() * 1e3, 3)});
  }
  return render(rows);
}

std::string format_ablation_table(
    const std::vector<std::pair<MetricsReport, MetricsReport>>& rows_in) {
  std::vector<std::vector<std::string>> rows = {
      {"model", "no-opt bytes", "opt bytes", "reduction %"}};
  for (const auto& [no_opt, opt] : rows_in) {
    const double base = static_cast<double>(no_opt.transfer_bytes);
    const double reduction =
        base > 0 ? 100.0 * (base - static_cast<double>(opt.transfer_bytes)) / base : 0.0;
    rows.push_back({opt.model, std::to_string(no_opt.transfer_bytes),
                    std::to_string(opt.transfer_bytes), fixed(reduction, 2)});
  }
  return render(rows);
}

}  // namespace dynogram
