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

// Command line front end: compile, run and differentially test DTPL
// models.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynogram/binary_io.h"
#include "dynogram/bundle.h"
#include "dynogram/error.h"
#include "dynogram/frontend.h"
#include "dynogram/harness.h"
#include "dynogram/hcfg.h"
#include "dynogram/host.h"
#include "dynogram/interpreter.h"
#include "dynogram/pipeline.h"
#include "dynogram/random.h"
#include "dynogram/rewriter.h"
#include "dynogram/weights.h"

namespace fs = std::filesystem;
using namespace dynogram;

namespace {

struct WeightArgs {
  std::string path;
  uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--weights", path, "weights.bin (default: drawn from the declarations)")
        ->check(CLI::ExistingFile);
    app->add_option("--weight-seed", seed, "seed for drawn weights");
  }

  WeightStore resolve(const ProgramAst& ast) const {
    if (!path.empty()) return load_weights(path);
    return init_weights(ast, rewrite(ast), seed);
  }
};

Shape parse_shape(const std::string& text) {
  Shape shape;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      shape.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "bad shape '" + text + "'");
    }
  }
  return shape;
}

void print_tensor(const std::string& label, const Tensor& t) {
  std::printf("%s %s\n", label.c_str(), t.debug_string(1 << 20).c_str());
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_file(path, text);
  }
}

std::vector<std::string> zoo_models(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".dtpl") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynogram: compiler for dynamic tensor programs"};
  app.require_subcommand(1);

  // check
  std::string check_in;
  auto* check = app.add_subcommand("check", "parse and validate a model");
  check->add_option("model", check_in)->required()->check(CLI::ExistingFile);

  // rewrite
  std::string rw_in, rw_out;
  int64_t rw_budget = kDefaultUnrollBudget;
  auto* rw = app.add_subcommand("rewrite", "unroll loops and fold constants");
  rw->add_option("model", rw_in)->required()->check(CLI::ExistingFile);
  rw->add_option("-o,--output", rw_out, "output .dtpl (default: stdout)");
  rw->add_option("--unroll-budget", rw_budget);

  // hcfg
  std::string hc_in, hc_dot;
  auto* hc = app.add_subcommand("hcfg", "build the heterogeneous control flow graph");
  hc->add_option("model", hc_in)->required()->check(CLI::ExistingFile);
  hc->add_option("--dot", hc_dot, "Graphviz output (default: stdout)");

  // init-weights
  std::string iw_in, iw_out;
  uint64_t iw_seed = 0;
  auto* iw = app.add_subcommand("init-weights", "draw weights from the model's declarations");
  iw->add_option("model", iw_in)->required()->check(CLI::ExistingFile);
  iw->add_option("--seed", iw_seed);
  iw->add_option("-o,--output", iw_out)->required();

  // gen-input
  std::string gi_in, gi_out;
  uint64_t gi_seed = 0, gi_index = 0;
  auto* gi = app.add_subcommand("gen-input", "write the seeded random input used by difftest");
  gi->add_option("model", gi_in)->required()->check(CLI::ExistingFile);
  gi->add_option("--seed", gi_seed);
  gi->add_option("--index", gi_index);
  gi->add_option("-o,--output", gi_out)->required();

  // compile
  std::string co_in, co_out, co_shape;
  bool co_no_opt = false, co_pseudo = false;
  WeightArgs co_w;
  auto* co = app.add_subcommand("compile", "compile a model into a bundle directory");
  co->add_option("model", co_in)->required()->check(CLI::ExistingFile);
  co->add_option("-o,--output", co_out)->required();
  co->add_option("--input-shape", co_shape, "example input shape, e.g. 1,16");
  co->add_flag("--no-graph-opt", co_no_opt, "keep sub-graphs whole");
  co->add_flag("--emit-pseudo", co_pseudo, "print the host program");
  co_w.add(co);

  // trace-compile
  std::string tc_in, tc_out, tc_example;
  WeightArgs tc_w;
  auto* tc = app.add_subcommand("trace-compile", "tracing baseline: one graph from one input");
  tc->add_option("model", tc_in)->required()->check(CLI::ExistingFile);
  tc->add_option("-o,--output", tc_out)->required();
  tc->add_option("--example", tc_example, "example input tensor file")->check(CLI::ExistingFile);
  tc_w.add(tc);

  // run
  std::string run_dir, run_input;
  auto* run = app.add_subcommand("run", "execute a bundle on one input");
  run->add_option("bundle", run_dir)->required()->check(CLI::ExistingDirectory);
  run->add_option("--input", run_input, "input tensor file")->required()->check(CLI::ExistingFile);

  // difftest
  std::string dt_in, dt_variant = "dynogram", dt_json;
  int dt_n = kDifftestInputs;
  uint64_t dt_seed = 0;
  WeightArgs dt_w;
  auto* dt = app.add_subcommand("difftest", "compare a compiled variant against the interpreter");
  dt->add_option("model", dt_in)->required()->check(CLI::ExistingFile);
  dt->add_option("--variant", dt_variant, "dynogram | no-opt | trace");
  dt->add_option("--n", dt_n)->check(CLI::PositiveNumber);
  dt->add_option("--seed", dt_seed);
  dt->add_option("--json", dt_json, "write the report as JSON");
  dt_w.add(dt);

  // ablate
  std::string ab_in;
  int ab_n = kDifftestInputs;
  uint64_t ab_seed = 0;
  WeightArgs ab_w;
  auto* ab = app.add_subcommand("ablate", "transfer bytes with and without graph optimization");
  ab->add_option("model", ab_in)->required()->check(CLI::ExistingFile);
  ab->add_option("--n", ab_n)->check(CLI::PositiveNumber);
  ab->add_option("--seed", ab_seed);
  ab_w.add(ab);

  // study
  std::string st_zoo = DYNOGRAM_DEFAULT_ZOO, st_json;
  int st_n = kStudyInputs;
  uint64_t st_seed = 0, st_wseed = 0;
  auto* st = app.add_subcommand("study", "run every variant over the model zoo");
  st->add_option("--zoo", st_zoo)->check(CLI::ExistingDirectory);
  st->add_option("--n", st_n)->check(CLI::PositiveNumber);
  st->add_option("--seed", st_seed);
  st->add_option("--weight-seed", st_wseed);
  st->add_option("--json", st_json, "write all reports as a JSON array");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      const ProgramAst ast = parse(read_file(check_in));
      const auto diags = validate(ast);
      for (const auto& d : diags) std::printf("%s\n", d.to_string().c_str());
      if (!diags.empty()) return 1;
      std::printf("%s: ok\n", ast.name.c_str());
    } else if (*rw) {
      const RewrittenProgram r = rewrite(load_program(rw_in), rw_budget);
      write_or_print(rw_out, print_program(r.ast));
    } else if (*hc) {
      const ProgramAst ast = load_program(hc_in);
      const Hcfg h = make_hcfg(rewrite(ast));
      write_or_print(hc_dot, to_dot(h, ast.name));
      std::fprintf(stderr, "%zu nodes (%d logic, %d tensor), %zu edges\n", h.nodes.size(),
                   h.num_logic(), h.num_tensor(), h.edges.size());
    } else if (*iw) {
      const ProgramAst ast = load_program(iw_in);
      save_weights(init_weights(ast, rewrite(ast), iw_seed), iw_out);
    } else if (*gi) {
      const ProgramAst ast = load_program(gi_in);
      const auto inputs = random_inputs(ast.params, gi_seed, gi_index);
      save_tensor_file({ast.params.at(0).name, inputs.at(0)}, gi_out);
    } else if (*co) {
      const ProgramAst ast = load_program(co_in);
      CompileOptions opts;
      opts.graph_opt = !co_no_opt;
      if (!co_shape.empty()) {
        if (ast.params.size() != 1) {
          fail(ErrorCode::kInvalidArgument, "--input-shape needs a single-input model");
        }
        opts.example_types = std::vector<TensorType>{{parse_shape(co_shape), ast.params[0].type.kind}};
      }
      const Compilation c = compile_program(ast, co_w.resolve(ast), opts);
      save_bundle(c.bundle, co_out);
      std::printf("%s: %zu graphs, %zu host instructions -> %s\n", ast.name.c_str(),
                  c.bundle.graphs.size(), c.bundle.host.code.size(), co_out.c_str());
      if (co_pseudo) std::printf("%s", emit_pseudo(c.bundle.host).c_str());
    } else if (*tc) {
      const ProgramAst ast = load_program(tc_in);
      std::vector<Tensor> example;
      if (tc_example.empty()) {
        example = example_inputs(ast.params, 0);
      } else {
        example.push_back(load_tensor_file(tc_example).value);
      }
      save_bundle(trace_compile(ast, example, tc_w.resolve(ast)), tc_out);
      std::printf("%s: traced bundle -> %s\n", ast.name.c_str(), tc_out.c_str());
    } else if (*run) {
      const Bundle b = load_bundle(run_dir);
      const std::vector<Tensor> inputs = {load_tensor_file(run_input).value};
      const HostRun r = run_host(b, inputs);
      for (size_t k = 0; k < r.outputs.size(); ++k) {
        print_tensor("output[" + std::to_string(k) + "]", r.outputs[k]);
      }
      std::printf("transfer_bytes host_to_device=%llu device_to_host=%llu total=%llu\n",
                  static_cast<unsigned long long>(r.meter.host_to_device),
                  static_cast<unsigned long long>(r.meter.device_to_host),
                  static_cast<unsigned long long>(r.meter.total()));
    } else if (*dt) {
      const auto variant = parse_variant(dt_variant);
      if (!variant) fail(ErrorCode::kInvalidArgument, "unknown variant '" + dt_variant + "'");
      const ProgramAst ast = load_program(dt_in);
      const Experiment ex = run_experiment(ast, dt_w.resolve(ast), *variant, dt_n, dt_seed);
      std::printf("%s", format_report_table({ex.report}).c_str());
      if (!dt_json.empty()) write_file(dt_json, ex.report.to_json(false) + "\n");
    } else if (*ab) {
      const ProgramAst ast = load_program(ab_in);
      const WeightStore w = ab_w.resolve(ast);
      const auto no_opt = run_experiment(ast, w, Variant::kNoOpt, ab_n, ab_seed);
      const auto opt = run_experiment(ast, w, Variant::kDynogram, ab_n, ab_seed);
      std::printf("%s", format_ablation_table({{no_opt.report, opt.report}}).c_str());
    } else if (*st) {
      std::vector<MetricsReport> reports;
      std::vector<std::pair<MetricsReport, MetricsReport>> ablation;
      for (const auto& path : zoo_models(st_zoo)) {
        const ProgramAst ast = load_program(path);
        const WeightStore w = init_weights(ast, rewrite(ast), st_wseed);
        MetricsReport opt;
        for (Variant v : {Variant::kDynogram, Variant::kNoOpt, Variant::kTrace}) {
          const auto ex = run_experiment(ast, w, v, st_n, st_seed);
          reports.push_back(ex.report);
          if (v == Variant::kDynogram) opt = ex.report;
          if (v == Variant::kNoOpt) ablation.emplace_back(ex.report, opt);
        }
      }
      std::printf("Correctness (n=%d, seed=%llu)\n%s\n", st_n,
                  static_cast<unsigned long long>(st_seed), format_report_table(reports).c_str());
      std::printf("Transfer bytes, graph optimization ablation\n%s\n",
                  format_ablation_table(ablation).c_str());
      std::printf("Compile time by stage\n%s", format_timing_table(reports).c_str());
      if (!st_json.empty()) {
        std::string out = "[\n";
        for (size_t k = 0; k < reports.size(); ++k) {
          out += reports[k].to_json(true) + (k + 1 < reports.size() ? ",\n" : "\n");
        }
        write_file(st_json, out + "]\n");
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
