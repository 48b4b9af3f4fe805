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

#include "dynogram/rewriter.h"

#include <map>
#include <set>

#include "dynogram/error.h"

namespace dynogram {

namespace {

using Env = std::map<std::string, std::optional<ScalarValue>>;

std::optional<ScalarValue> env_lookup(const Env& env, const std::string& name) {
  auto it = env.find(name);
  return it == env.end() ? std::nullopt : it->second;
}

ScalarExpr substitute(const ScalarExpr& e, const std::string& var, int64_t value) {
  switch (e.kind()) {
    case ScalarExpr::Kind::kVar:
      return e.name() == var ? ScalarExpr::int_lit(value) : e;
    case ScalarExpr::Kind::kBinary:
      return ScalarExpr::binary(e.op(), substitute(e.lhs(), var, value),
                                substitute(e.rhs(), var, value));
    default:
      return e;
  }
}

void substitute_stmts(std::vector<Stmt>& body, const std::string& var, int64_t value);

void substitute_stmt(Stmt& s, const std::string& var, int64_t value) {
  auto sub = [&](ScalarExpr& e) { e = substitute(e, var, value); };
  switch (s.kind) {
    case Stmt::Kind::kTensorAssign:
      for (auto& o : s.expr.operands) {
        for (auto& seg : o.weight.segments) {
          if (!seg.is_text) sub(seg.expr);
        }
      }
      for (auto& a : s.expr.attrs) {
        for (auto& v : a.values) sub(v);
      }
      break;
    case Stmt::Kind::kIntAssign:
      sub(s.value);
      break;
    case Stmt::Kind::kIf:
      sub(s.cond.lhs);
      sub(s.cond.rhs);
      substitute_stmts(s.then_body, var, value);
      substitute_stmts(s.else_body, var, value);
      break;
    case Stmt::Kind::kFor:
      sub(s.lo);
      sub(s.hi);
      // An inner loop over the same name would shadow; the parser rejects it.
      substitute_stmts(s.body, var, value);
      break;
    case Stmt::Kind::kReturn:
      break;
  }
}

void substitute_stmts(std::vector<Stmt>& body, const std::string& var, int64_t value) {
  for (auto& s : body) substitute_stmt(s, var, value);
}

class Unroller {
 public:
  explicit Unroller(int64_t budget) : budget_(budget) {}

  std::vector<Stmt> block(const std::vector<Stmt>& body, Env& env) {
    std::vector<Stmt> out;
    for (const auto& s : body) statement(s, env, out);
    return out;
  }

 private:
  void charge(int64_t n) {
    emitted_ += n;
    if (emitted_ > budget_) {
      fail(ErrorCode::kUnrollBudgetExceeded,
           "unrolling exceeds the budget of " + std::to_string(budget_) + " statements");
    }
  }

  int64_t eval_bound(const ScalarExpr& e, const Env& env, const Stmt& s) {
    const ScalarExpr f = fold_scalar(e, [&](const std::string& n) { return env_lookup(env, n); });
    if (f.kind() != ScalarExpr::Kind::kInt) {
      throw Error(ErrorCode::kNonConstLoopBound,
                  "bound '" + format_scalar_expr(e) + "' of loop over '" + s.loop_var +
                      "' is not a constant integer",
                  s.loc.line, s.loc.column);
    }
    return f.int_value();
  }

  void statement(const Stmt& s, Env& env, std::vector<Stmt>& out) {
    switch (s.kind) {
      case Stmt::Kind::kIntAssign: {
        const ScalarExpr f =
            fold_scalar(s.value, [&](const std::string& n) { return env_lookup(env, n); });
        env[s.target] = f.is_literal() ? std::optional(f.literal_value()) : std::nullopt;
        charge(1);
        out.push_back(s);
        return;
      }
      case Stmt::Kind::kIf: {
        Stmt copy = s;
        Env then_env = env;
        Env else_env = env;
        charge(1);
        copy.then_body = block(s.then_body, then_env);
        copy.else_body = block(s.else_body, else_env);
        for (auto& [name, value] : then_env) {
          auto it = else_env.find(name);
          if (it == else_env.end() || it->second != value) value.reset();
        }
        for (auto& [name, value] : else_env) then_env.try_emplace(name, std::nullopt);
        env = std::move(then_env);
        out.push_back(std::move(copy));
        return;
      }
      case Stmt::Kind::kFor: {
        const int64_t lo = eval_bound(s.lo, env, s);
        const int64_t hi = eval_bound(s.hi, env, s);
        for (int64_t i = lo; i < hi; ++i) {
          std::vector<Stmt> body = s.body;
          substitute_stmts(body, s.loop_var, i);
          for (const auto& b : body) statement(b, env, out);
        }
        return;
      }
      default:
        charge(1);
        out.push_back(s);
        return;
    }
  }

  int64_t budget_;
  int64_t emitted_ = 0;
};

// Marks exactly the first assignment of each name in preorder as the
// declaration so the printed program reparses.
void fix_declarations(std::vector<Stmt>& body, std::set<std::string>& seen) {
  for (auto& s : body) {
    if (s.kind == Stmt::Kind::kTensorAssign || s.kind == Stmt::Kind::kIntAssign) {
      s.declares = seen.insert(s.target).second;
    }
    fix_declarations(s.then_body, seen);
    fix_declarations(s.else_body, seen);
  }
}

[[noreturn]] void fail_at(ErrorCode code, const Stmt& s, const std::string& msg) {
  throw Error(code, msg, s.loc.line, s.loc.column);
}

class Propagator {
 public:
  std::vector<Stmt> block(const std::vector<Stmt>& body, Env& env) {
    std::vector<Stmt> out;
    for (const auto& s : body) statement(s, env, out);
    return out;
  }

 private:
  ScalarExpr fold(const ScalarExpr& e, const Env& env, const Stmt& s) {
    try {
      return fold_scalar(e, [&](const std::string& n) { return env_lookup(env, n); });
    } catch (const Error& err) {
      fail_at(err.code(), s, err.detail());
    }
  }

  // Requires every variable to be known; tensors may only be read when
  // allowed (dynamic conditions).
  void require_known(const ScalarExpr& e, const Stmt& s, ErrorCode code, const std::string& what) {
    std::vector<std::string> vars;
    e.collect_vars(vars);
    if (!vars.empty()) {
      fail_at(code, s, what + " depends on '" + vars.front() + "', which is not constant here");
    }
  }

  void statement(const Stmt& s, Env& env, std::vector<Stmt>& out) {
    switch (s.kind) {
      case Stmt::Kind::kTensorAssign: {
        Stmt c = s;
        for (auto& o : c.expr.operands) {
          if (o.kind != Operand::Kind::kWeight) continue;
          for (auto& seg : o.weight.segments) {
            if (seg.is_text) continue;
            if (seg.expr.reads_tensor()) {
              fail_at(ErrorCode::kNonConstWeightKey, s,
                      "weight key segment '" + format_scalar_expr(seg.expr) +
                          "' depends on tensor values");
            }
            seg.expr = fold(seg.expr, env, s);
            require_known(seg.expr, s, ErrorCode::kNonConstWeightKey, "weight key segment");
            if (seg.expr.kind() != ScalarExpr::Kind::kInt) {
              fail_at(ErrorCode::kNonConstWeightKey, s,
                      "weight key segment '" + format_scalar_expr(seg.expr) +
                          "' is not an integer");
            }
          }
        }
        for (auto& a : c.expr.attrs) {
          for (auto& v : a.values) {
            if (v.reads_tensor()) {
              fail_at(ErrorCode::kNonConstScalar, s,
                      "attribute " + a.name + " depends on tensor values");
            }
            v = fold(v, env, s);
            require_known(v, s, ErrorCode::kNonConstScalar, "attribute " + a.name);
          }
        }
        out.push_back(std::move(c));
        return;
      }
      case Stmt::Kind::kIntAssign: {
        if (s.value.reads_tensor()) {
          fail_at(ErrorCode::kNonConstScalar, s,
                  "int variable '" + s.target + "' depends on tensor values");
        }
        const ScalarExpr v = fold(s.value, env, s);
        require_known(v, s, ErrorCode::kNonConstScalar, "int variable '" + s.target + "'");
        env[s.target] = v.literal_value();
        return;
      }
      case Stmt::Kind::kIf: {
        Cond cond{fold(s.cond.lhs, env, s), s.cond.cmp, fold(s.cond.rhs, env, s)};
        require_known(cond.lhs, s, ErrorCode::kNonConstScalar, "condition");
        require_known(cond.rhs, s, ErrorCode::kNonConstScalar, "condition");
        if (!cond.is_dynamic()) {
          const bool taken =
              compare_scalars(cond.cmp, cond.lhs.literal_value(), cond.rhs.literal_value());
          for (const auto& b : taken ? s.then_body : s.else_body) statement(b, env, out);
          return;
        }
        Env then_env = env;
        Env else_env = env;
        Stmt c = s;
        c.cond = cond;
        c.then_body = block(s.then_body, then_env);
        c.else_body = block(s.else_body, else_env);
        c.has_else = !c.else_body.empty();
        for (auto& [name, value] : then_env) {
          auto it = else_env.find(name);
          if (it == else_env.end() || it->second != value) value.reset();
        }
        for (auto& [name, value] : else_env) then_env.try_emplace(name, std::nullopt);
        env = std::move(then_env);
        out.push_back(std::move(c));
        return;
      }
      case Stmt::Kind::kFor:
        fail_at(ErrorCode::kInvalidArgument, s, "propagate_constants expects a loop-free program");
      case Stmt::Kind::kReturn:
        out.push_back(s);
        return;
    }
  }
};

void collect_locs(const std::vector<Stmt>& body, std::vector<SourceLoc>& out) {
  for (const auto& s : body) {
    out.push_back(s.loc);
    collect_locs(s.then_body, out);
    collect_locs(s.else_body, out);
    collect_locs(s.body, out);
  }
}

}  // namespace

ScalarExpr fold_scalar(const ScalarExpr& e,
                       const std::function<std::optional<ScalarValue>(const std::string&)>& lookup) {
  switch (e.kind()) {
    case ScalarExpr::Kind::kVar: {
      auto v = lookup(e.name());
      return v ? ScalarExpr::literal(*v) : e;
    }
    case ScalarExpr::Kind::kBinary: {
      ScalarExpr l = fold_scalar(e.lhs(), lookup);
      ScalarExpr r = fold_scalar(e.rhs(), lookup);
      if (l.is_literal() && r.is_literal()) {
        return ScalarExpr::literal(apply_scalar_op(e.op(), l.literal_value(), r.literal_value()));
      }
      return ScalarExpr::binary(e.op(), std::move(l), std::move(r));
    }
    default:
      return e;
  }
}

ProgramAst unroll_loops(const ProgramAst& ast, int64_t budget) {
  ProgramAst out = ast;
  Env env;
  Unroller unroller(budget);
  out.body = unroller.block(ast.body, env);
  std::set<std::string> seen;
  for (const auto& p : ast.params) seen.insert(p.name);
  fix_declarations(out.body, seen);
  return out;
}

RewrittenProgram propagate_constants(const ProgramAst& ast) {
  RewrittenProgram r;
  r.ast = ast;
  for (;;) {
    Env env;
    Propagator prop;
    std::vector<Stmt> body = prop.block(r.ast.body, env);
    if (body == r.ast.body) break;
    r.ast.body = std::move(body);
  }
  std::set<std::string> seen;
  for (const auto& p : ast.params) seen.insert(p.name);
  fix_declarations(r.ast.body, seen);
  collect_locs(r.ast.body, r.provenance);
  return r;
}

RewrittenProgram rewrite(const ProgramAst& ast, int64_t budget) {
  return propagate_constants(unroll_loops(ast, budget));
}

int64_t count_statements(const std::vector<Stmt>& body) {
  int64_t n = 0;
  for (const auto& s : body) {
    n += 1 + count_statements(s.then_body) + count_statements(s.else_body) +
         count_statements(s.body);
  }
  return n;
}

int64_t count_loops(const std::vector<Stmt>& body) {
  int64_t n = 0;
  for (const auto& s : body) {
    n += (s.kind == Stmt::Kind::kFor) + count_loops(s.then_body) + count_loops(s.else_body) +
         count_loops(s.body);
  }
  return n;
}

int64_t count_ifs(const std::vector<Stmt>& body) {
  int64_t n = 0;
  for (const auto& s : body) {
    n += (s.kind == Stmt::Kind::kIf) + count_ifs(s.then_body) + count_ifs(s.else_body) +
         count_ifs(s.body);
  }
  return n;
}

}  // namespace dynogram
