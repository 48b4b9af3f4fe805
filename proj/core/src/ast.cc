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

#include "dynogram/ast.h"

#include <cmath>
#include <cstring>
#include <cstdio>
#include <sstream>

#include "dynogram/error.h"

namespace dynogram {

struct ScalarNode {
  ScalarExpr::Kind kind = ScalarExpr::Kind::kInt;
  int64_t int_value = 0;
  double real_value = 0.0;
  std::string name;
  ScalarOp op = ScalarOp::kAdd;
  ScalarExpr lhs;
  ScalarExpr rhs;
};

namespace {

// A null node stands for the integer literal 0, so default construction
// never allocates (and ScalarNode can hold default-constructed children).
const ScalarNode& zero_node() {
  static const ScalarNode* node = new ScalarNode();
  return *node;
}

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

int precedence(ScalarOp op) { return op == ScalarOp::kAdd || op == ScalarOp::kSub ? 1 : 2; }

void format_scalar(const ScalarExpr& e, int parent_prec, bool right, std::string& out) {
  switch (e.kind()) {
    case ScalarExpr::Kind::kInt:
      out += std::to_string(e.int_value());
      return;
    case ScalarExpr::Kind::kReal:
      out += format_double(e.real_value(), 17);
      return;
    case ScalarExpr::Kind::kVar:
      out += e.name();
      return;
    case ScalarExpr::Kind::kScalarOf:
      out += "scalar(" + e.name() + ")";
      return;
    case ScalarExpr::Kind::kBinary: {
      const int prec = precedence(e.op());
      const bool parens = prec < parent_prec || (prec == parent_prec && right);
      if (parens) out += "(";
      format_scalar(e.lhs(), prec, false, out);
      out += " ";
      out += scalar_op_symbol(e.op());
      out += " ";
      format_scalar(e.rhs(), prec, true, out);
      if (parens) out += ")";
      return;
    }
  }
}

std::string format_type(const TensorType& t) {
  std::string s(element_kind_name(t.kind));
  s += "<";
  for (size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.shape[i]);
  }
  return s + ">";
}

std::string format_operand(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::kVar:
      return o.name;
    case Operand::Kind::kLiteral:
      return format_tensor_literal(o.literal);
    case Operand::Kind::kWeight: {
      std::string s = "w[";
      for (size_t i = 0; i < o.weight.segments.size(); ++i) {
        if (i) s += ", ";
        const auto& seg = o.weight.segments[i];
        s += seg.is_text ? quote(seg.text) : format_scalar_expr(seg.expr);
      }
      return s + "]";
    }
  }
  return {};
}

void print_block(const std::vector<Stmt>& stmts, int indent, std::string& out);

void print_stmt(const Stmt& s, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::kTensorAssign:
      out += pad + (s.declares ? "let " : "") + s.target + " = " + format_tensor_expr(s.expr) +
             ";\n";
      return;
    case Stmt::Kind::kIntAssign:
      out += pad + (s.declares ? "int " : "") + s.target + " = " + format_scalar_expr(s.value) +
             ";\n";
      return;
    case Stmt::Kind::kIf:
      out += pad + "if " + format_cond(s.cond) + " {\n";
      print_block(s.then_body, indent + 1, out);
      out += pad + "}";
      if (s.has_else) {
        out += " else {\n";
        print_block(s.else_body, indent + 1, out);
        out += pad + "}";
      }
      out += "\n";
      return;
    case Stmt::Kind::kFor:
      out += pad + "for " + s.loop_var + " in " + format_scalar_expr(s.lo) + ".." +
             format_scalar_expr(s.hi) + " {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}\n";
      return;
    case Stmt::Kind::kReturn: {
      out += pad + "return ";
      for (size_t i = 0; i < s.returns.size(); ++i) {
        if (i) out += ", ";
        out += s.returns[i];
      }
      out += ";\n";
      return;
    }
  }
}

void print_block(const std::vector<Stmt>& stmts, int indent, std::string& out) {
  for (const auto& s : stmts) print_stmt(s, indent, out);
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

bool operator==(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.declares == b.declares && a.target == b.target &&
         a.expr == b.expr && a.value == b.value && a.cond == b.cond &&
         a.then_body == b.then_body && a.else_body == b.else_body && a.has_else == b.has_else &&
         a.loop_var == b.loop_var && a.lo == b.lo && a.hi == b.hi && a.body == b.body &&
         a.returns == b.returns;
}

std::string_view scalar_op_symbol(ScalarOp op) {
  switch (op) {
    case ScalarOp::kAdd:
      return "+";
    case ScalarOp::kSub:
      return "-";
    case ScalarOp::kMul:
      return "*";
    case ScalarOp::kDiv:
      return "/";
  }
  return "?";
}

std::string_view cmp_op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::kLt:
      return "<";
    case CmpOp::kLe:
      return "<=";
    case CmpOp::kGt:
      return ">";
    case CmpOp::kGe:
      return ">=";
    case CmpOp::kEq:
      return "==";
    case CmpOp::kNe:
      return "!=";
  }
  return "?";
}

ScalarExpr::ScalarExpr() = default;

ScalarExpr ScalarExpr::int_lit(int64_t v) {
  auto n = std::make_shared<ScalarNode>();
  n->kind = Kind::kInt;
  n->int_value = v;
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::real_lit(double v) {
  auto n = std::make_shared<ScalarNode>();
  n->kind = Kind::kReal;
  n->real_value = v;
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::literal(ScalarValue v) { return v.is_int ? int_lit(v.i) : real_lit(v.r); }

ScalarExpr ScalarExpr::var(std::string name) {
  auto n = std::make_shared<ScalarNode>();
  n->kind = Kind::kVar;
  n->name = std::move(name);
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::scalar_of(std::string tensor_var) {
  auto n = std::make_shared<ScalarNode>();
  n->kind = Kind::kScalarOf;
  n->name = std::move(tensor_var);
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::binary(ScalarOp op, ScalarExpr lhs, ScalarExpr rhs) {
  auto n = std::make_shared<ScalarNode>();
  n->kind = Kind::kBinary;
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return ScalarExpr(std::move(n));
}

ScalarExpr::Kind ScalarExpr::kind() const { return (node_ ? *node_ : zero_node()).kind; }
int64_t ScalarExpr::int_value() const { return (node_ ? *node_ : zero_node()).int_value; }
double ScalarExpr::real_value() const { return (node_ ? *node_ : zero_node()).real_value; }
const std::string& ScalarExpr::name() const { return (node_ ? *node_ : zero_node()).name; }
ScalarOp ScalarExpr::op() const { return (node_ ? *node_ : zero_node()).op; }
const ScalarExpr& ScalarExpr::lhs() const { return (node_ ? *node_ : zero_node()).lhs; }
const ScalarExpr& ScalarExpr::rhs() const { return (node_ ? *node_ : zero_node()).rhs; }

ScalarValue ScalarExpr::literal_value() const {
  return kind() == Kind::kInt ? ScalarValue::of_int(int_value())
                              : ScalarValue::of_real(real_value());
}

bool ScalarExpr::reads_tensor() const {
  switch (kind()) {
    case Kind::kScalarOf:
      return true;
    case Kind::kBinary:
      return lhs().reads_tensor() || rhs().reads_tensor();
    default:
      return false;
  }
}

void ScalarExpr::collect_tensor_reads(std::vector<std::string>& out) const {
  if (kind() == Kind::kScalarOf) out.push_back(name());
  if (kind() == Kind::kBinary) {
    lhs().collect_tensor_reads(out);
    rhs().collect_tensor_reads(out);
  }
}

void ScalarExpr::collect_vars(std::vector<std::string>& out) const {
  if (kind() == Kind::kVar) out.push_back(name());
  if (kind() == Kind::kBinary) {
    lhs().collect_vars(out);
    rhs().collect_vars(out);
  }
}

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ScalarExpr::Kind::kInt:
      return a.int_value() == b.int_value();
    case ScalarExpr::Kind::kReal: {
      const double ra = a.real_value();
      const double rb = b.real_value();
      return std::memcmp(&ra, &rb, sizeof(double)) == 0;
    }
    case ScalarExpr::Kind::kVar:
    case ScalarExpr::Kind::kScalarOf:
      return a.name() == b.name();
    case ScalarExpr::Kind::kBinary:
      return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

bool WeightRef::is_concrete() const {
  for (const auto& s : segments) {
    if (!s.is_text && s.expr.kind() != ScalarExpr::Kind::kInt) return false;
  }
  return true;
}

std::string WeightRef::key() const {
  std::string k;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (i) k += ".";
    const auto& s = segments[i];
    if (s.is_text) {
      k += s.text;
    } else if (s.expr.kind() == ScalarExpr::Kind::kInt) {
      k += std::to_string(s.expr.int_value());
    } else {
      fail(ErrorCode::kNonConstWeightKey,
           "weight key segment " + format_scalar_expr(s.expr) + " is not constant");
    }
  }
  return k;
}

bool WeightDecl::matches(const std::string& key) const {
  const auto want = split_key(pattern);
  const auto got = split_key(key);
  if (want.size() != got.size()) return false;
  for (size_t i = 0; i < want.size(); ++i) {
    if (want[i] != "*" && want[i] != got[i]) return false;
  }
  return true;
}

ScalarValue apply_scalar_op(ScalarOp op, ScalarValue a, ScalarValue b) {
  if (a.is_int && b.is_int) {
    const auto x = static_cast<uint64_t>(a.i);
    const auto y = static_cast<uint64_t>(b.i);
    switch (op) {
      case ScalarOp::kAdd:
        return ScalarValue::of_int(static_cast<int64_t>(x + y));
      case ScalarOp::kSub:
        return ScalarValue::of_int(static_cast<int64_t>(x - y));
      case ScalarOp::kMul:
        return ScalarValue::of_int(static_cast<int64_t>(x * y));
      case ScalarOp::kDiv:
        if (b.i == 0) fail(ErrorCode::kDivisionByZero, "integer division by zero");
        if (a.i == INT64_MIN && b.i == -1) return ScalarValue::of_int(INT64_MIN);
        return ScalarValue::of_int(a.i / b.i);
    }
  }
  const double x = a.as_double();
  const double y = b.as_double();
  switch (op) {
    case ScalarOp::kAdd:
      return ScalarValue::of_real(x + y);
    case ScalarOp::kSub:
      return ScalarValue::of_real(x - y);
    case ScalarOp::kMul:
      return ScalarValue::of_real(x * y);
    case ScalarOp::kDiv:
      return ScalarValue::of_real(x / y);
  }
  return {};
}

bool compare_scalars(CmpOp cmp, ScalarValue a, ScalarValue b) {
  if (a.is_int && b.is_int) {
    switch (cmp) {
      case CmpOp::kLt:
        return a.i < b.i;
      case CmpOp::kLe:
        return a.i <= b.i;
      case CmpOp::kGt:
        return a.i > b.i;
      case CmpOp::kGe:
        return a.i >= b.i;
      case CmpOp::kEq:
        return a.i == b.i;
      case CmpOp::kNe:
        return a.i != b.i;
    }
  }
  const double x = a.as_double();
  const double y = b.as_double();
  switch (cmp) {
    case CmpOp::kLt:
      return x < y;
    case CmpOp::kLe:
      return x <= y;
    case CmpOp::kGt:
      return x > y;
    case CmpOp::kGe:
      return x >= y;
    case CmpOp::kEq:
      return x == y;
    case CmpOp::kNe:
      return x != y;
  }
  return false;
}

ScalarValue scalar_value_of(const Tensor& t) {
  const double v = scalar_read(t);
  if (t.kind() == ElementKind::kInt) return ScalarValue::of_int(t.ints()[0]);
  return ScalarValue::of_real(v);
}

ScalarValue eval_scalar(const ScalarExpr& e, const VarLookup& lookup_var,
                        const TensorScalarLookup& read_tensor) {
  switch (e.kind()) {
    case ScalarExpr::Kind::kInt:
    case ScalarExpr::Kind::kReal:
      return e.literal_value();
    case ScalarExpr::Kind::kVar:
      return lookup_var(e.name());
    case ScalarExpr::Kind::kScalarOf:
      return read_tensor(e.name());
    case ScalarExpr::Kind::kBinary:
      return apply_scalar_op(e.op(), eval_scalar(e.lhs(), lookup_var, read_tensor),
                             eval_scalar(e.rhs(), lookup_var, read_tensor));
  }
  return {};
}

std::vector<std::string> expr_reads(const TensorExpr& e) {
  std::vector<std::string> out;
  for (const auto& o : e.operands) {
    if (o.kind == Operand::Kind::kVar) out.push_back(o.name);
  }
  return out;
}

OpAttrs concrete_attrs(const TensorExpr& e) {
  OpAttrs attrs;
  for (const auto& a : e.attrs) {
    std::vector<int64_t> values;
    for (const auto& v : a.values) {
      if (v.kind() != ScalarExpr::Kind::kInt) {
        fail(ErrorCode::kAttributeInvalid, "attribute " + a.name + " value " +
                                               format_scalar_expr(v) +
                                               " is not a constant integer");
      }
      values.push_back(v.int_value());
    }
    if (a.name == "axis") {
      if (a.is_list || values.size() != 1) {
        fail(ErrorCode::kAttributeInvalid, "axis takes a single integer");
      }
      attrs.axis = values[0];
    } else if (a.name == "begin") {
      attrs.begin = std::move(values);
    } else if (a.name == "end") {
      attrs.end = std::move(values);
    } else if (a.name == "shape") {
      attrs.shape = std::move(values);
    } else {
      fail(ErrorCode::kAttributeInvalid, "unknown attribute " + a.name);
    }
  }
  if (e.op == OpKind::kConst) {
    if (e.operands.size() != 1 || e.operands[0].kind != Operand::Kind::kLiteral) {
      fail(ErrorCode::kAttributeInvalid, "const takes exactly one tensor literal");
    }
    attrs.value = e.operands[0].literal;
  }
  return attrs;
}

Operator concrete_operator(const TensorExpr& e) { return Operator{e.op, concrete_attrs(e)}; }

std::string format_scalar_expr(const ScalarExpr& e) {
  std::string out;
  format_scalar(e, 0, false, out);
  return out;
}

std::string format_cond(const Cond& c) {
  return format_scalar_expr(c.lhs) + " " + std::string(cmp_op_symbol(c.cmp)) + " " +
         format_scalar_expr(c.rhs);
}

std::string format_tensor_literal(const Tensor& t) {
  std::string s = format_type(t.type()) + "[";
  const int64_t n = t.num_elements();
  auto elem = [&](int64_t i) {
    if (t.kind() == ElementKind::kReal) return format_double(t.reals()[i], 9);
    return std::to_string(t.ints()[i]);
  };
  bool splat = n > 1;
  for (int64_t i = 1; i < n && splat; ++i) {
    splat = t.kind() == ElementKind::kReal
                ? std::memcmp(&t.reals()[i], &t.reals()[0], sizeof(float)) == 0
                : t.ints()[i] == t.ints()[0];
  }
  if (splat) {
    s += elem(0);
  } else {
    for (int64_t i = 0; i < n; ++i) {
      if (i) s += ", ";
      s += elem(i);
    }
  }
  return s + "]";
}

std::string format_tensor_expr(const TensorExpr& e) {
  std::string s(op_name(e.op));
  s += "(";
  bool first = true;
  for (const auto& o : e.operands) {
    if (!first) s += ", ";
    first = false;
    s += format_operand(o);
  }
  for (const auto& a : e.attrs) {
    if (!first) s += ", ";
    first = false;
    s += a.name + "=";
    if (a.is_list) {
      s += "[";
      for (size_t i = 0; i < a.values.size(); ++i) {
        if (i) s += ", ";
        s += format_scalar_expr(a.values[i]);
      }
      s += "]";
    } else if (!a.values.empty()) {
      s += format_scalar_expr(a.values[0]);
    }
  }
  return s + ")";
}

std::string print_statements(const std::vector<Stmt>& stmts, int indent) {
  std::string out;
  print_block(stmts, indent, out);
  return out;
}

std::string print_program(const ProgramAst& p) {
  std::string out;
  if (p.decision_kind == DecisionKind::kClassifier) {
    out += "@classifier\n";
  } else {
    out += "@generator(eos=" + std::to_string(p.eos_token) + ")\n";
  }
  out += "model " + p.name + "(";
  for (size_t i = 0; i < p.params.size(); ++i) {
    if (i) out += ", ";
    out += p.params[i].name + ": " + format_type(p.params[i].type);
  }
  out += ") -> " + std::to_string(p.num_outputs) + " {\n";
  for (const auto& w : p.weights) {
    out += "  weight " + quote(w.pattern) + " : " + format_type(w.type) + " scale " +
           format_double(w.scale, 17) + ";\n";
  }
  print_block(p.body, 1, out);
  out += "}\n";
  return out;
}

}  // namespace dynogram
