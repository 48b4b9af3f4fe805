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

#include "dynogram/host.h"

#include <algorithm>
#include <map>
#include <set>

#include "dynogram/error.h"

namespace dynogram {

HostProgram synthesize_host(const Hcfg& h, const CompiledProgram& compiled) {
  HostProgram p;
  std::vector<int> label(h.nodes.size(), -1);
  // (instruction index, field) pairs to patch with node labels.
  struct Patch {
    int pc;
    int node;
    int which;  // 0 target, 1 on_true, 2 on_false
  };
  std::vector<Patch> patches;
  int saves = 0;
  for (const auto& node : h.nodes) {
    label[node.id] = static_cast<int>(p.code.size());
    p.labels.emplace_back(node.id, label[node.id]);
    if (node.is_logic()) {
      HostInstr br;
      br.op = HostInstr::Op::kBranch;
      br.cond = node.cond;
      const int pc = static_cast<int>(p.code.size());
      patches.push_back({pc, h.successor(node.id, EdgeLabel::kTrue), 1});
      patches.push_back({pc, h.successor(node.id, EdgeLabel::kFalse), 2});
      p.code.push_back(std::move(br));
      continue;
    }
    const auto graph = compiled.graphs.find(node.id);
    const auto res = compiled.residuals.find(node.id);
    std::set<std::string> clobbered;
    if (graph != compiled.graphs.end()) {
      const auto outs = graph->second.output_names();
      clobbered.insert(outs.begin(), outs.end());
    }
    std::vector<HostInstr> after;
    if (res != compiled.residuals.end()) {
      std::map<std::string, std::string> saved;
      for (const auto& r : res->second) {
        HostInstr ins;
        ins.dst = r.dst;
        if (r.kind == ResidualInstr::Kind::kAssignConst) {
          ins.op = HostInstr::Op::kAssignConst;
          ins.literal = static_cast<int>(p.literals.size());
          p.literals.push_back(r.literal);
        } else {
          ins.op = HostInstr::Op::kCopy;
          ins.src = r.src;
          if (clobbered.count(r.src)) {
            auto it = saved.find(r.src);
            if (it == saved.end()) {
              HostInstr save;
              save.op = HostInstr::Op::kCopy;
              save.dst = "%save_" + std::to_string(saves++);
              save.src = r.src;
              it = saved.emplace(r.src, save.dst).first;
              p.code.push_back(std::move(save));
            }
            ins.src = it->second;
          }
        }
        clobbered.insert(r.dst);
        after.push_back(std::move(ins));
      }
    }
    if (graph != compiled.graphs.end()) {
      HostInstr call;
      call.op = HostInstr::Op::kCall;
      call.graph = node.id;
      call.ins = graph->second.input_names();
      call.outs = graph->second.output_names();
      p.code.push_back(std::move(call));
    }
    for (auto& ins : after) p.code.push_back(std::move(ins));
    if (node.is_exit) {
      HostInstr ret;
      ret.op = HostInstr::Op::kReturn;
      ret.ins = node.returns;
      p.code.push_back(std::move(ret));
      continue;
    }
    const int next = h.successor(node.id, EdgeLabel::kUncond);
    if (next != node.id + 1) {
      HostInstr jump;
      jump.op = HostInstr::Op::kJump;
      patches.push_back({static_cast<int>(p.code.size()), next, 0});
      p.code.push_back(std::move(jump));
    }
  }
  for (const auto& patch : patches) {
    HostInstr& ins = p.code[patch.pc];
    const int target = label[patch.node];
    (patch.which == 0 ? ins.target : patch.which == 1 ? ins.on_true : ins.on_false) = target;
  }
  return p;
}

HostRun run_host(const Bundle& b, std::span<const Tensor> inputs) {
  if (inputs.size() != b.info.inputs.size()) {
    fail(ErrorCode::kRuntimeShapeMismatch, "model takes " + std::to_string(b.info.inputs.size()) +
                                             " inputs, got " + std::to_string(inputs.size()));
  }
  std::map<std::string, Tensor> env;
  for (size_t k = 0; k < inputs.size(); ++k) {
    const Param& p = b.info.inputs[k];
    if (inputs[k].type() != p.type) {
      fail(ErrorCode::kRuntimeShapeMismatch, "input '" + p.name + "' must be " +
                                               p.type.to_string() + ", got " +
                                               inputs[k].type().to_string());
    }
    env[p.name] = inputs[k];
  }
  auto get = [&](const std::string& name) -> const Tensor& {
    auto it = env.find(name);
    if (it == env.end()) {
      fail(ErrorCode::kInvalidBundle, "host program reads unassigned '" + name + "'");
    }
    return it->second;
  };
  const HostProgram& p = b.host;
  const int n = static_cast<int>(p.code.size());
  HostRun run;
  int pc = 0;
  while (true) {
    if (pc < 0 || pc >= n) fail(ErrorCode::kInvalidBundle, "host program ran off its end");
    if (++run.steps > n) fail(ErrorCode::kInvalidBundle, "host program does not terminate");
    const HostInstr& ins = p.code[pc];
    switch (ins.op) {
      case HostInstr::Op::kCall: {
        auto g = b.graphs.find(ins.graph);
        if (g == b.graphs.end()) {
          fail(ErrorCode::kInvalidBundle, "missing graph g" + std::to_string(ins.graph));
        }
        const CompiledSubGraph& c = g->second;
        std::vector<Tensor> args;
        for (size_t k = 0; k < ins.ins.size(); ++k) {
          const Tensor& t = get(ins.ins[k]);
          if (k >= c.input_types.size() || t.type() != c.input_types[k]) {
            fail(ErrorCode::kRuntimeShapeMismatch,
                 "g" + std::to_string(ins.graph) + " argument '" + ins.ins[k] + "' has type " +
                     t.type().to_string() +
                     (k < c.input_types.size() ? ", compiled for " + c.input_types[k].to_string()
                                               : ", beyond the signature"));
          }
          run.meter.host_to_device += t.byte_size();
          args.push_back(t);
        }
        std::vector<Tensor> results = execute_subgraph(c, args);
        if (results.size() != ins.outs.size()) {
          fail(ErrorCode::kInvalidBundle, "g" + std::to_string(ins.graph) + " result count differs");
        }
        for (size_t k = 0; k < results.size(); ++k) {
          run.meter.device_to_host += results[k].byte_size();
          env[ins.outs[k]] = std::move(results[k]);
        }
        ++run.calls;
        ++pc;
        break;
      }
      case HostInstr::Op::kCopy:
        env[ins.dst] = get(ins.src);
        ++pc;
        break;
      case HostInstr::Op::kAssignConst:
        env[ins.dst] = p.literals.at(ins.literal);
        ++pc;
        break;
      case HostInstr::Op::kBranch: {
        auto no_vars = [](const std::string& v) -> ScalarValue {
          fail(ErrorCode::kInvalidBundle, "host condition reads variable '" + v + "'");
        };
        auto read = [&](const std::string& v) { return scalar_value_of(get(v)); };
        const ScalarValue lhs = eval_scalar(ins.cond.lhs, no_vars, read);
        const ScalarValue rhs = eval_scalar(ins.cond.rhs, no_vars, read);
        const bool taken = compare_scalars(ins.cond.cmp, lhs, rhs);
        run.branches.emplace_back(p.node_at(pc), taken);
        pc = taken ? ins.on_true : ins.on_false;
        break;
      }
      case HostInstr::Op::kJump:
        pc = ins.target;
        break;
      case HostInstr::Op::kReturn:
        for (const auto& name : ins.ins) run.outputs.push_back(get(name));
        return run;
    }
  }
}

}  // namespace dynogram
