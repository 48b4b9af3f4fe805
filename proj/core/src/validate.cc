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

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "dynogram/error.h"
#include "dynogram/frontend.h"

namespace dynogram {

std::string_view diagnostic_kind_name(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kDefiniteAssignment:
      return "DefiniteAssignment";
    case DiagnosticKind::kInputDependentLoop:
      return "InputDependentLoop";
    case DiagnosticKind::kArity:
      return "Arity";
    case DiagnosticKind::kMissingReturn:
      return "MissingReturn";
    case DiagnosticKind::kUnreachableCode:
      return "UnreachableCode";
    case DiagnosticKind::kReturnArity:
      return "ReturnArity";
  }
  return "?";
}

std::string Diagnostic::to_string() const {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
         std::string(diagnostic_kind_name(kind)) + ": " + message;
}

namespace {

struct AttrRule {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

AttrRule attr_rule(OpKind op) {
  switch (op) {
    case OpKind::kConcat:
      return {{}, {"axis"}};
    case OpKind::kSlice:
      return {{"begin", "end"}, {}};
    case OpKind::kReshape:
      return {{"shape"}, {}};
    default:
      return {};
  }
}

// Per-path facts: which names are definitely assigned and which int
// variables have a known value. An unreachable state is the identity of
// merge.
struct State {
  bool unreachable = false;
  std::set<std::string> assigned;
  std::map<std::string, ScalarValue> known;

  static State merge(const State& a, const State& b) {
    if (a.unreachable) return b;
    if (b.unreachable) return a;
    State out;
    for (const auto& n : a.assigned) {
      if (b.assigned.count(n)) out.assigned.insert(n);
    }
    for (const auto& [n, v] : a.known) {
      auto it = b.known.find(n);
      if (it != b.known.end() && it->second == v) out.known.emplace(n, v);
    }
    return out;
  }
};

struct NotConstant {};

void collect_assigned_ints(const std::vector<Stmt>& body, std::set<std::string>& out) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::kIntAssign) out.insert(s.target);
    collect_assigned_ints(s.then_body, out);
    collect_assigned_ints(s.else_body, out);
    collect_assigned_ints(s.body, out);
  }
}

class Validator {
 public:
  explicit Validator(const ProgramAst& ast) : ast_(ast) {}

  std::vector<Diagnostic> run() {
    compute_taint(ast_.body);
    State st;
    for (const auto& p : ast_.params) st.assigned.insert(p.name);
    st = block(ast_.body, st);
    if (!st.unreachable) {
      SourceLoc end = ast_.body.empty() ? SourceLoc{1, 1} : ast_.body.back().loc;
      add(DiagnosticKind::kMissingReturn, end,
          "control can reach the end of model '" + ast_.name + "' without a return");
    }
    return std::move(diags_);
  }

 private:
  void add(DiagnosticKind k, SourceLoc loc, std::string msg) {
    diags_.push_back({k, loc, std::move(msg)});
  }

  // Flow-insensitive: an int variable is input-dependent if any of its
  // assignments reads a tensor or another input-dependent variable.
  void compute_taint(const std::vector<Stmt>& body) {
    std::vector<const Stmt*> assigns;
    std::vector<const std::vector<Stmt>*> stack = {&body};
    while (!stack.empty()) {
      const auto* b = stack.back();
      stack.pop_back();
      for (const auto& s : *b) {
        if (s.kind == Stmt::Kind::kIntAssign) assigns.push_back(&s);
        stack.push_back(&s.then_body);
        stack.push_back(&s.else_body);
        stack.push_back(&s.body);
      }
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Stmt* s : assigns) {
        if (tainted_.count(s->target)) continue;
        if (is_tainted(s->value)) {
          tainted_.insert(s->target);
          changed = true;
        }
      }
    }
  }

  bool is_tainted(const ScalarExpr& e) const {
    if (e.reads_tensor()) return true;
    std::vector<std::string> vars;
    e.collect_vars(vars);
    for (const auto& v : vars) {
      if (tainted_.count(v)) return true;
    }
    return false;
  }

  std::optional<ScalarValue> try_eval(const ScalarExpr& e, const State& st) const {
    try {
      return eval_scalar(
          e,
          [&](const std::string& n) -> ScalarValue {
            auto it = st.known.find(n);
            if (it == st.known.end()) throw NotConstant{};
            return it->second;
          },
          [](const std::string&) -> ScalarValue { throw NotConstant{}; });
    } catch (const NotConstant&) {
      return std::nullopt;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void use(const std::string& name, const State& st, SourceLoc loc) {
    if (!st.assigned.count(name)) {
      add(DiagnosticKind::kDefiniteAssignment, loc,
          "'" + name + "' may be used before it is assigned");
    }
  }

  void use_scalar(const ScalarExpr& e, const State& st, SourceLoc loc) {
    std::vector<std::string> names;
    e.collect_vars(names);
    e.collect_tensor_reads(names);
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (seen.insert(n).second) use(n, st, loc);
    }
  }

  void check_call(const Stmt& s, const State& st) {
    const TensorExpr& e = s.expr;
    const std::string op(op_name(e.op));
    if (e.op == OpKind::kConst) {
      if (e.operands.size() != 1 || e.operands[0].kind != Operand::Kind::kLiteral) {
        add(DiagnosticKind::kArity, s.loc, "const takes exactly one tensor literal");
      }
    } else {
      const int arity = op_arity(e.op);
      const int n = static_cast<int>(e.operands.size());
      if (arity >= 0 && n != arity) {
        add(DiagnosticKind::kArity, s.loc,
            op + " takes " + std::to_string(arity) + " operand(s), got " + std::to_string(n));
      } else if (arity < 0 && n < 1) {
        add(DiagnosticKind::kArity, s.loc, op + " takes at least one operand");
      }
    }
    const AttrRule rule = attr_rule(e.op);
    std::set<std::string> given;
    for (const auto& a : e.attrs) {
      const bool required =
          std::find(rule.required.begin(), rule.required.end(), a.name) != rule.required.end();
      const bool optional =
          std::find(rule.optional.begin(), rule.optional.end(), a.name) != rule.optional.end();
      if (!required && !optional) {
        add(DiagnosticKind::kArity, s.loc, op + " has no attribute '" + a.name + "'");
      } else if (!given.insert(a.name).second) {
        add(DiagnosticKind::kArity, s.loc, "attribute '" + a.name + "' given twice");
      } else if ((a.name == "axis") == a.is_list) {
        add(DiagnosticKind::kArity, s.loc,
            "attribute '" + a.name + (a.is_list ? "' takes a single value" : "' takes a list"));
      }
      for (const auto& v : a.values) use_scalar(v, st, s.loc);
    }
    for (const auto& r : rule.required) {
      if (!given.count(r)) add(DiagnosticKind::kArity, s.loc, op + " requires attribute '" + r + "'");
    }
    for (const auto& o : e.operands) {
      if (o.kind == Operand::Kind::kVar) {
        use(o.name, st, s.loc);
      } else if (o.kind == Operand::Kind::kWeight) {
        for (const auto& seg : o.weight.segments) {
          if (!seg.is_text) use_scalar(seg.expr, st, s.loc);
        }
      }
    }
  }

  State block(const std::vector<Stmt>& body, State st) {
    bool reported = false;
    for (const auto& s : body) {
      if (st.unreachable && !reported) {
        add(DiagnosticKind::kUnreachableCode, s.loc, "statement can never execute");
        reported = true;
      }
      st = statement(s, std::move(st));
    }
    return st;
  }

  State statement(const Stmt& s, State st) {
    switch (s.kind) {
      case Stmt::Kind::kTensorAssign:
        check_call(s, st);
        st.assigned.insert(s.target);
        return st;
      case Stmt::Kind::kIntAssign: {
        use_scalar(s.value, st, s.loc);
        auto v = try_eval(s.value, st);
        st.assigned.insert(s.target);
        if (v) {
          st.known[s.target] = *v;
        } else {
          st.known.erase(s.target);
        }
        return st;
      }
      case Stmt::Kind::kIf: {
        use_scalar(s.cond.lhs, st, s.loc);
        use_scalar(s.cond.rhs, st, s.loc);
        const auto lhs = try_eval(s.cond.lhs, st);
        const auto rhs = try_eval(s.cond.rhs, st);
        State then_st = block(s.then_body, st);
        State else_st = block(s.else_body, st);
        if (lhs && rhs) {
          // Statically decided: only the taken side shapes what follows.
          return compare_scalars(s.cond.cmp, *lhs, *rhs) ? then_st : else_st;
        }
        return State::merge(then_st, else_st);
      }
      case Stmt::Kind::kFor: {
        use_scalar(s.lo, st, s.loc);
        use_scalar(s.hi, st, s.loc);
        if (is_tainted(s.lo) || is_tainted(s.hi)) {
          add(DiagnosticKind::kInputDependentLoop, s.loc,
              "bounds of loop over '" + s.loop_var + "' depend on tensor values");
        }
        const auto lo = try_eval(s.lo, st);
        const auto hi = try_eval(s.hi, st);
        const bool runs = lo && hi && lo->as_double() < hi->as_double();
        const bool never = lo && hi && !runs;
        std::set<std::string> changed;
        collect_assigned_ints(s.body, changed);
        State body_in = st;
        body_in.assigned.insert(s.loop_var);
        for (const auto& n : changed) body_in.known.erase(n);
        State body_out = block(s.body, body_in);
        if (never) return st;
        State after = runs ? body_out : State::merge(st, body_out);
        if (!after.unreachable) {
          after.assigned.erase(s.loop_var);
          for (const auto& n : changed) after.known.erase(n);
        }
        return after;
      }
      case Stmt::Kind::kReturn:
        for (const auto& r : s.returns) use(r, st, s.loc);
        if (static_cast<int>(s.returns.size()) != ast_.num_outputs) {
          add(DiagnosticKind::kReturnArity, s.loc,
              "return yields " + std::to_string(s.returns.size()) + " value(s), model declares " +
                  std::to_string(ast_.num_outputs));
        }
        st.unreachable = true;
        return st;
    }
    return st;
  }

  const ProgramAst& ast_;
  std::set<std::string> tainted_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const ProgramAst& ast) { return Validator(ast).run(); }

}  // namespace dynogram
