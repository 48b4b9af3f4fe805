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

#include "dynogram/interpreter.h"

#include <algorithm>
#include <set>

#include "dynogram/driver.h"
#include "dynogram/error.h"
#include "dynogram/host.h"
#include "dynogram/rewriter.h"

namespace dynogram {

std::vector<bool> ExecTrace::dynamic_outcomes() const {
  std::vector<bool> out;
  for (const auto& d : decisions) {
    if (d.dynamic) out.push_back(d.outcome);
  }
  return out;
}

namespace {

Tensor operand_value(const Operand& o, const TensorEnv& env, const WeightStore& weights) {
  switch (o.kind) {
    case Operand::Kind::kVar: {
      auto it = env.find(o.name);
      if (it == env.end()) fail(ErrorCode::kInvalidArgument, "'" + o.name + "' is unassigned");
      return it->second;
    }
    case Operand::Kind::kWeight:
      return weights.at(o.weight.key());
    case Operand::Kind::kLiteral:
      return o.literal;
  }
  return {};
}

Tensor apply_statement(const Stmt& s, const TensorEnv& env, const WeightStore& weights) {
  const Operator op = concrete_operator(s.expr);
  std::vector<Tensor> args;
  if (s.expr.op != OpKind::kConst) {
    for (const auto& o : s.expr.operands) args.push_back(operand_value(o, env, weights));
  }
  return apply_kernel(op, args);
}

class Interpreter {
 public:
  Interpreter(const WeightStore& weights, ExecTrace& trace) : weights_(weights), trace_(trace) {}

  TensorEnv env;

  // Returns true once a return statement ran.
  bool block(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (statement(s)) return true;
    }
    return false;
  }

 private:
  ScalarValue eval(const ScalarExpr& e) {
    return eval_scalar(
        e,
        [&](const std::string& n) {
          auto it = scalars_.find(n);
          if (it == scalars_.end()) fail(ErrorCode::kInvalidArgument, "'" + n + "' is unassigned");
          return it->second;
        },
        [&](const std::string& n) {
          auto it = env.find(n);
          if (it == env.end()) fail(ErrorCode::kInvalidArgument, "'" + n + "' is unassigned");
          return scalar_value_of(it->second);
        });
  }

  ScalarExpr resolve(const ScalarExpr& e) {
    return fold_scalar(e, [&](const std::string& n) -> std::optional<ScalarValue> {
      auto it = scalars_.find(n);
      if (it == scalars_.end()) return std::nullopt;
      return it->second;
    });
  }

  bool statement(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::kTensorAssign: {
        Stmt c = s;
        for (auto& o : c.expr.operands) {
          if (o.kind != Operand::Kind::kWeight) continue;
          for (auto& seg : o.weight.segments) {
            if (!seg.is_text) seg.expr = ScalarExpr::literal(eval(seg.expr));
          }
          if (!o.weight.is_concrete()) {
            fail(ErrorCode::kNonConstWeightKey, "weight key segment is not an integer");
          }
        }
        for (auto& a : c.expr.attrs) {
          for (auto& v : a.values) v = ScalarExpr::literal(eval(v));
        }
        Tensor value = apply_statement(c, env, weights_);
        env[c.target] = std::move(value);
        trace_.stmts.push_back(std::move(c));
        return false;
      }
      case Stmt::Kind::kIntAssign:
        scalars_[s.target] = eval(s.value);
        return false;
      case Stmt::Kind::kIf: {
        Decision d;
        d.cond = Cond{resolve(s.cond.lhs), s.cond.cmp, resolve(s.cond.rhs)};
        d.dynamic = d.cond.is_dynamic();
        d.loc = s.loc;
        d.outcome = compare_scalars(s.cond.cmp, eval(s.cond.lhs), eval(s.cond.rhs));
        trace_.decisions.push_back(d);
        return block(d.outcome ? s.then_body : s.else_body);
      }
      case Stmt::Kind::kFor: {
        const ScalarValue lo = eval(s.lo);
        const ScalarValue hi = eval(s.hi);
        if (!lo.is_int || !hi.is_int) {
          fail(ErrorCode::kNonConstLoopBound, "loop bounds must be integers");
        }
        for (int64_t i = lo.i; i < hi.i; ++i) {
          scalars_[s.loop_var] = ScalarValue::of_int(i);
          if (block(s.body)) return true;
        }
        scalars_.erase(s.loop_var);
        return false;
      }
      case Stmt::Kind::kReturn:
        trace_.returns = s.returns;
        return true;
    }
    return false;
  }

  const WeightStore& weights_;
  ExecTrace& trace_;
  std::map<std::string, ScalarValue> scalars_;
};

void bind_inputs(const std::vector<Param>& params, std::span<const Tensor> inputs,
                 TensorEnv& env) {
  if (inputs.size() != params.size()) {
    fail(ErrorCode::kInputShapeMismatch, "model takes " + std::to_string(params.size()) +
                                             " inputs, got " + std::to_string(inputs.size()));
  }
  for (size_t k = 0; k < params.size(); ++k) {
    if (inputs[k].type() != params[k].type) {
      fail(ErrorCode::kInputShapeMismatch, "input '" + params[k].name + "' must be " +
                                               params[k].type.to_string() + ", got " +
                                               inputs[k].type().to_string());
    }
    env[params[k].name] = inputs[k];
  }
}

}  // namespace

InterpResult interpret(const ProgramAst& p, std::span<const Tensor> inputs,
                       const WeightStore& weights) {
  InterpResult r;
  Interpreter interp(weights, r.trace);
  bind_inputs(p.params, inputs, interp.env);
  if (!interp.block(p.body)) {
    fail(ErrorCode::kInvalidArgument, "model '" + p.name + "' finished without returning");
  }
  for (const auto& name : r.trace.returns) r.outputs.push_back(interp.env.at(name));
  return r;
}

void execute_statements(const std::vector<Stmt>& stmts, TensorEnv& env,
                        const WeightStore& weights) {
  for (const auto& s : stmts) {
    Tensor value = apply_statement(s, env, weights);
    env[s.target] = std::move(value);
  }
}

HcfgWalk walk_hcfg(const Hcfg& h, const std::vector<Param>& params,
                   std::span<const Tensor> inputs, const WeightStore& weights) {
  HcfgWalk walk;
  TensorEnv env;
  bind_inputs(params, inputs, env);
  int id = h.entry;
  for (size_t steps = 0; steps <= h.nodes.size(); ++steps) {
    const HcfgNode& node = h.nodes[id];
    walk.visited.push_back(id);
    std::map<std::string, TensorType> types;
    for (const auto& v : node.live_in) types[v] = env.at(v).type();
    walk.entry_types.emplace_back(id, std::move(types));
    if (node.is_logic()) {
      auto no_vars = [](const std::string& v) -> ScalarValue {
        fail(ErrorCode::kInvalidArgument, "logic node reads variable '" + v + "'");
      };
      auto read = [&](const std::string& v) { return scalar_value_of(env.at(v)); };
      const bool taken = compare_scalars(node.cond.cmp, eval_scalar(node.cond.lhs, no_vars, read),
                                         eval_scalar(node.cond.rhs, no_vars, read));
      walk.branches.emplace_back(id, taken);
      id = h.successor(id, taken ? EdgeLabel::kTrue : EdgeLabel::kFalse);
      continue;
    }
    execute_statements(node.stmts, env, weights);
    if (node.is_exit) {
      for (const auto& r : node.returns) walk.outputs.push_back(env.at(r));
      return walk;
    }
    id = h.successor(id, EdgeLabel::kUncond);
  }
  fail(ErrorCode::kInvalidArgument, "HCFG walk did not reach an exit");
}

Bundle trace_compile(const ProgramAst& p, std::span<const Tensor> example,
                     const WeightStore& weights) {
  const InterpResult r = interpret(p, example, weights);
  std::vector<std::string> live_in;
  std::vector<TensorType> types;
  for (size_t k = 0; k < p.params.size(); ++k) {
    live_in.push_back(p.params[k].name);
    types.push_back(example[k].type());
  }
  std::vector<std::string> live_out;
  for (const auto& name : r.trace.returns) {
    if (std::find(live_out.begin(), live_out.end(), name) == live_out.end()) {
      live_out.push_back(name);
    }
  }
  const ComputeGraph g = build_graph(r.trace.stmts, live_in, live_out, &weights);
  Bundle b;
  b.info.model = p.name;
  b.info.variant = "trace";
  b.info.decision_kind = p.decision_kind;
  b.info.eos_token = p.eos_token;
  b.info.inputs = p.params;
  b.info.num_outputs = p.num_outputs;
  b.graphs.emplace(0, plan_schedule(0, g, types, &weights));
  HostInstr call;
  call.op = HostInstr::Op::kCall;
  call.graph = 0;
  call.ins = b.graphs.at(0).input_names();
  call.outs = b.graphs.at(0).output_names();
  HostInstr ret;
  ret.op = HostInstr::Op::kReturn;
  ret.ins = r.trace.returns;
  b.host.code = {call, ret};
  b.host.labels = {{0, 0}};
  b.weights = weights;
  b.manifest = make_manifest(b.info, nullptr, {}, b.graphs, b.host);
  return b;
}

}  // namespace dynogram
