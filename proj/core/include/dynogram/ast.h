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

#ifndef DYNOGRAM_AST_H_
#define DYNOGRAM_AST_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynogram/tensor.h"

namespace dynogram {

struct SourceLoc {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

// Host-level scalar: exact 64-bit integer or IEEE double.
struct ScalarValue {
  bool is_int = true;
  int64_t i = 0;
  double r = 0.0;

  static ScalarValue of_int(int64_t v) { return {true, v, 0.0}; }
  static ScalarValue of_real(double v) { return {false, 0, v}; }
  double as_double() const { return is_int ? static_cast<double>(i) : r; }

  friend bool operator==(const ScalarValue&, const ScalarValue&) = default;
};

enum class ScalarOp : uint8_t { kAdd, kSub, kMul, kDiv };
enum class CmpOp : uint8_t { kLt, kLe, kGt, kGe, kEq, kNe };

std::string_view scalar_op_symbol(ScalarOp op);
std::string_view cmp_op_symbol(CmpOp op);

struct ScalarNode;

// Immutable scalar expression tree with deep value equality.
class ScalarExpr {
 public:
  enum class Kind : uint8_t { kInt, kReal, kVar, kScalarOf, kBinary };

  ScalarExpr();  // integer literal 0
  static ScalarExpr int_lit(int64_t v);
  static ScalarExpr real_lit(double v);
  static ScalarExpr literal(ScalarValue v);
  // Loop variable or int variable.
  static ScalarExpr var(std::string name);
  // scalar(tensor_var)
  static ScalarExpr scalar_of(std::string tensor_var);
  static ScalarExpr binary(ScalarOp op, ScalarExpr lhs, ScalarExpr rhs);

  Kind kind() const;
  int64_t int_value() const;
  double real_value() const;
  const std::string& name() const;
  ScalarOp op() const;
  const ScalarExpr& lhs() const;
  const ScalarExpr& rhs() const;

  bool is_literal() const { return kind() == Kind::kInt || kind() == Kind::kReal; }
  ScalarValue literal_value() const;
  // True when the tree reads any tensor through scalar(...).
  bool reads_tensor() const;
  void collect_tensor_reads(std::vector<std::string>& out) const;
  void collect_vars(std::vector<std::string>& out) const;

  friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);

 private:
  explicit ScalarExpr(std::shared_ptr<const ScalarNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ScalarNode> node_;
};

struct Cond {
  ScalarExpr lhs;
  CmpOp cmp = CmpOp::kEq;
  ScalarExpr rhs;

  // Dynamic iff it reads a tensor value.
  bool is_dynamic() const { return lhs.reads_tensor() || rhs.reads_tensor(); }

  friend bool operator==(const Cond&, const Cond&) = default;
};

// One segment of w[...]: either a string literal or a scalar expression.
struct WeightSegment {
  bool is_text = true;
  std::string text;
  ScalarExpr expr;

  friend bool operator==(const WeightSegment&, const WeightSegment&) = default;
};

struct WeightRef {
  std::vector<WeightSegment> segments;

  bool is_concrete() const;
  // Segments joined with '.'; requires is_concrete() (integer literals print
  // in decimal).
  std::string key() const;

  friend bool operator==(const WeightRef&, const WeightRef&) = default;
};

struct Operand {
  enum class Kind : uint8_t { kVar, kWeight, kLiteral };
  Kind kind = Kind::kVar;
  std::string name;
  WeightRef weight;
  Tensor literal;

  static Operand var(std::string n) {
    Operand o;
    o.kind = Kind::kVar;
    o.name = std::move(n);
    return o;
  }
  static Operand weight_ref(WeightRef w) {
    Operand o;
    o.kind = Kind::kWeight;
    o.weight = std::move(w);
    return o;
  }
  static Operand lit(Tensor t) {
    Operand o;
    o.kind = Kind::kLiteral;
    o.literal = std::move(t);
    return o;
  }

  friend bool operator==(const Operand&, const Operand&) = default;
};

// name=value or name=[v, ...]
struct NamedAttr {
  std::string name;
  bool is_list = false;
  std::vector<ScalarExpr> values;

  friend bool operator==(const NamedAttr&, const NamedAttr&) = default;
};

// A single operator application in three-address form.
struct TensorExpr {
  OpKind op = OpKind::kIdentity;
  std::vector<Operand> operands;
  std::vector<NamedAttr> attrs;

  friend bool operator==(const TensorExpr&, const TensorExpr&) = default;
};

struct Stmt {
  enum class Kind : uint8_t { kTensorAssign, kIntAssign, kIf, kFor, kReturn };

  Kind kind = Kind::kTensorAssign;
  SourceLoc loc;

  // kTensorAssign / kIntAssign; `declares` marks `let x = ...` / `int x = ...`.
  bool declares = false;
  std::string target;
  TensorExpr expr;
  ScalarExpr value;

  // kIf
  Cond cond;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  bool has_else = false;

  // kFor: for loop_var in lo..hi { body }
  std::string loop_var;
  ScalarExpr lo;
  ScalarExpr hi;
  std::vector<Stmt> body;

  // kReturn
  std::vector<std::string> returns;

  // Structural equality; source locations are ignored.
  friend bool operator==(const Stmt& a, const Stmt& b);
};

struct Param {
  std::string name;
  TensorType type;

  friend bool operator==(const Param&, const Param&) = default;
};

// weight "pattern" : real<dims> [scale s];  '*' matches one key segment.
struct WeightDecl {
  std::string pattern;
  TensorType type;
  double scale = 0.5;

  bool matches(const std::string& key) const;

  friend bool operator==(const WeightDecl&, const WeightDecl&) = default;
};

enum class DecisionKind : uint8_t { kClassifier, kGenerator };

struct ProgramAst {
  std::string name;
  DecisionKind decision_kind = DecisionKind::kClassifier;
  int64_t eos_token = 0;  // generator only
  std::vector<Param> params;
  int num_outputs = 1;
  std::vector<WeightDecl> weights;
  std::vector<Stmt> body;

  friend bool operator==(const ProgramAst&, const ProgramAst&) = default;
};

// Evaluates a scalar expression. `lookup_var` resolves loop/int variables,
// `read_tensor` resolves scalar(name). Integer '/' truncates toward zero and
// throws kDivisionByZero on a zero divisor.
using VarLookup = std::function<ScalarValue(const std::string&)>;
using TensorScalarLookup = std::function<ScalarValue(const std::string&)>;
ScalarValue eval_scalar(const ScalarExpr& e, const VarLookup& lookup_var,
                        const TensorScalarLookup& read_tensor);
ScalarValue apply_scalar_op(ScalarOp op, ScalarValue a, ScalarValue b);
// Exact comparison when both sides are integers, IEEE otherwise.
bool compare_scalars(CmpOp cmp, ScalarValue a, ScalarValue b);
// Reads scalar(t) preserving the integer kind.
ScalarValue scalar_value_of(const Tensor& t);

// Tensor variables read by a tensor expression (duplicates preserved).
std::vector<std::string> expr_reads(const TensorExpr& e);

// Turns concrete attributes into kernel attributes. Throws
// kAttributeInvalid for unknown or non-literal attributes.
OpAttrs concrete_attrs(const TensorExpr& e);
Operator concrete_operator(const TensorExpr& e);

std::string format_scalar_expr(const ScalarExpr& e);
std::string format_cond(const Cond& c);
std::string format_tensor_literal(const Tensor& t);
std::string format_tensor_expr(const TensorExpr& e);
// Canonical DTPL text; parse(print_program(p)) == p.
std::string print_program(const ProgramAst& p);
std::string print_statements(const std::vector<Stmt>& stmts, int indent);

}  // namespace dynogram

#endif  // DYNOGRAM_AST_H_
