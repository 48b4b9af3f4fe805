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

#include <charconv>
#include <cstdlib>
#include <map>
#include <set>

#include "dynogram/binary_io.h"
#include "dynogram/error.h"
#include "dynogram/frontend.h"

namespace dynogram {

namespace {

enum class Tok { kIdent, kInt, kReal, kString, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  int line = 1;
  int column = 1;
};

constexpr int kMaxDepth = 200;
constexpr int64_t kMaxLiteralElements = int64_t{1} << 22;

[[noreturn]] void syntax_error(const Token& t, const std::string& msg) {
  throw Error(ErrorCode::kSyntaxError, msg, t.line, t.column);
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      bool real = false;
      if (j + 1 < src.size() && src[j] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = real ? Tok::kReal : Tok::kInt;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::string text;
      size_t j = i + 1;
      bool closed = false;
      while (j < src.size()) {
        if (src[j] == '\\' && j + 1 < src.size()) {
          text += src[j + 1];
          j += 2;
          continue;
        }
        if (src[j] == '"') {
          closed = true;
          break;
        }
        if (src[j] == '\n') break;
        text += src[j++];
      }
      if (!closed) syntax_error(t, "unterminated string literal");
      t.kind = Tok::kString;
      t.text = std::move(text);
      advance(j + 1 - i);
    } else {
      static const char* kTwo[] = {"..", "->", "<=", ">=", "==", "!="};
      t.kind = Tok::kPunct;
      for (const char* p : kTwo) {
        if (src.substr(i, 2) == p) t.text = p;
      }
      if (t.text.empty()) {
        if (std::string_view("(){}[]<>=,;:+-*/@").find(c) == std::string_view::npos) {
          syntax_error(t, std::string("unexpected character '") +
                              (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c)
                                                                           : "\\x" + std::to_string(static_cast<unsigned char>(c))) +
                              "'");
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::kEnd;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

enum class Sym { kTensor, kScalar, kLoop };

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    for (const auto& t : toks_) {
      if (t.kind == Tok::kIdent) used_names_.insert(t.text);
    }
  }

  ProgramAst program() {
    ProgramAst p;
    if (accept("@")) {
      const Token& kind = expect_ident();
      if (kind.text == "classifier") {
        p.decision_kind = DecisionKind::kClassifier;
      } else if (kind.text == "generator") {
        p.decision_kind = DecisionKind::kGenerator;
        if (accept("(")) {
          const Token& key = expect_ident();
          if (key.text != "eos") syntax_error(key, "expected eos=<token>");
          expect("=");
          p.eos_token = int_literal(/*allow_negative=*/false);
          expect(")");
        }
      } else {
        syntax_error(kind, "unknown annotation @" + kind.text);
      }
    }
    expect_keyword("model");
    p.name = expect_ident().text;
    expect("(");
    if (!peek_is(")")) {
      do {
        const Token& name = expect_ident();
        expect(":");
        Param param{name.text, tensor_type()};
        declare(name, Sym::kTensor);
        p.params.push_back(std::move(param));
      } while (accept(","));
    }
    expect(")");
    expect("->");
    {
      const Token& t = peek();
      const int64_t n = int_literal(false);
      if (n < 1 || n > 255) syntax_error(t, "output count must be in 1..255");
      p.num_outputs = static_cast<int>(n);
    }
    expect("{");
    while (peek_keyword("weight")) p.weights.push_back(weight_decl());
    p.body = block_body(0);
    expect("}");
    if (peek().kind != Tok::kEnd) syntax_error(peek(), "unexpected text after model body");
    return p;
  }

 private:
  // ---- token helpers ----
  const Token& peek(size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool peek_is(std::string_view p, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kPunct && t.text == p;
  }
  bool peek_keyword(std::string_view k, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kIdent && t.text == k;
  }
  bool accept(std::string_view p) {
    if (!peek_is(p)) return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) syntax_error(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
  }
  void expect_keyword(std::string_view k) {
    if (!peek_keyword(k)) syntax_error(peek(), "expected '" + std::string(k) + "', found " + describe(peek()));
    next();
  }
  const Token& expect_ident() {
    if (peek().kind != Tok::kIdent) syntax_error(peek(), "expected identifier, found " + describe(peek()));
    return next();
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::kEnd:
        return "end of input";
      case Tok::kString:
        return "string \"" + t.text + "\"";
      default:
        return "'" + t.text + "'";
    }
  }
  static SourceLoc loc_of(const Token& t) { return {t.line, t.column}; }

  struct DepthGuard {
    explicit DepthGuard(Parser* p) : parser(p) {
      if (++parser->depth_ > kMaxDepth) syntax_error(parser->peek(), "nesting too deep");
    }
    ~DepthGuard() { --parser->depth_; }
    Parser* parser;
  };

  // ---- symbols ----
  static bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"model", "let", "int",    "real",  "tensor",
                                             "if",    "else", "for",   "in",    "return",
                                             "weight", "scale", "scalar", "w"};
    return kw.count(s) != 0;
  }

  void declare(const Token& name, Sym kind) {
    if (is_keyword(name.text) || op_from_name(name.text)) {
      throw Error(ErrorCode::kSyntaxError, "'" + name.text + "' is reserved", name.line,
                  name.column);
    }
    if (symbols_.count(name.text)) {
      throw Error(ErrorCode::kDuplicateDefinition, "'" + name.text + "' is already defined",
                  name.line, name.column);
    }
    symbols_[name.text] = kind;
  }

  Sym lookup(const Token& name) const {
    auto it = symbols_.find(name.text);
    if (it == symbols_.end()) {
      throw Error(ErrorCode::kUndefinedIdentifier, "'" + name.text + "' is not defined",
                  name.line, name.column);
    }
    return it->second;
  }

  std::string fresh_temp() {
    for (;;) {
      std::string name = "_t" + std::to_string(temp_counter_++);
      if (!used_names_.count(name) && !symbols_.count(name)) {
        used_names_.insert(name);
        symbols_[name] = Sym::kTensor;
        return name;
      }
    }
  }

  // ---- literals and types ----
  int64_t int_literal(bool allow_negative) {
    const bool neg = allow_negative && accept("-");
    const Token& t = peek();
    if (t.kind != Tok::kInt) syntax_error(t, "expected integer, found " + describe(t));
    next();
    int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) syntax_error(t, "integer literal out of range");
    return neg ? -v : v;
  }

  double number_literal() {
    const bool neg = accept("-");
    const Token& t = peek();
    if (t.kind != Tok::kInt && t.kind != Tok::kReal) {
      syntax_error(t, "expected number, found " + describe(t));
    }
    next();
    const double v = std::strtod(t.text.c_str(), nullptr);
    return neg ? -v : v;
  }

  bool peek_type_start() const {
    return (peek_keyword("real") || peek_keyword("int") || peek_keyword("tensor")) &&
           peek_is("<", 1);
  }

  TensorType tensor_type() {
    const Token& t = expect_ident();
    TensorType type;
    if (t.text == "real" || t.text == "tensor") {
      type.kind = ElementKind::kReal;
    } else if (t.text == "int") {
      type.kind = ElementKind::kInt;
    } else {
      syntax_error(t, "expected tensor type, found " + describe(t));
    }
    expect("<");
    if (!peek_is(">")) {
      do {
        const Token& d = peek();
        const int64_t extent = int_literal(false);
        if (extent > 0xFFFFFFFFLL) syntax_error(d, "extent too large");
        type.shape.push_back(extent);
      } while (accept(","));
    }
    if (type.shape.size() > 8) syntax_error(t, "rank above 8 is not supported");
    expect(">");
    int64_t n = 1;
    for (int64_t d : type.shape) {
      n = d == 0 ? 0 : n;
      if (d != 0 && n > kMaxLiteralElements * 64 / d) syntax_error(t, "tensor type too large");
      n *= d;
    }
    return type;
  }

  Tensor tensor_literal() {
    const Token& start = peek();
    TensorType type = tensor_type();
    const int64_t n = type.num_elements();
    if (n > kMaxLiteralElements) syntax_error(start, "tensor literal too large");
    expect("[");
    std::vector<double> reals;
    std::vector<int64_t> ints;
    const bool is_int = type.kind == ElementKind::kInt;
    if (!peek_is("]")) {
      do {
        const Token& t = peek(peek_is("-") ? 1 : 0);
        if (is_int) {
          if (t.kind == Tok::kReal) syntax_error(t, "real value in int literal");
          ints.push_back(int_literal(true));
        } else {
          reals.push_back(number_literal());
        }
        if (static_cast<int64_t>(is_int ? ints.size() : reals.size()) > std::max<int64_t>(n, 1)) {
          syntax_error(t, "too many values for " + type.to_string());
        }
      } while (accept(","));
    }
    expect("]");
    const auto count = static_cast<int64_t>(is_int ? ints.size() : reals.size());
    if (!(count == n || (count == 1 && n > 1))) {
      syntax_error(start, "literal for " + type.to_string() + " needs " + std::to_string(n) +
                              " values (or one to fill), got " + std::to_string(count));
    }
    if (!is_int) {
      std::vector<float> data(static_cast<size_t>(n));
      for (int64_t i = 0; i < n; ++i) data[i] = static_cast<float>(reals[count == n ? i : 0]);
      return Tensor::real(type.shape, std::move(data));
    }
    std::vector<int64_t> data(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) data[i] = ints[count == n ? i : 0];
    return Tensor::integer(type.shape, std::move(data));
  }

  WeightDecl weight_decl() {
    expect_keyword("weight");
    const Token& pat = peek();
    if (pat.kind != Tok::kString) syntax_error(pat, "expected weight key pattern string");
    next();
    WeightDecl d;
    d.pattern = pat.text;
    expect(":");
    const Token& type_tok = peek();
    d.type = tensor_type();
    if (d.type.kind != ElementKind::kReal) syntax_error(type_tok, "weights must be real tensors");
    if (peek_keyword("scale")) {
      next();
      d.scale = number_literal();
    }
    expect(";");
    return d;
  }

  // ---- scalar expressions ----
  ScalarExpr scalar_expr() {
    DepthGuard guard(this);
    ScalarExpr lhs = scalar_term();
    while (peek_is("+") || peek_is("-")) {
      const ScalarOp op = next().text == "+" ? ScalarOp::kAdd : ScalarOp::kSub;
      lhs = ScalarExpr::binary(op, lhs, scalar_term());
    }
    return lhs;
  }

  ScalarExpr scalar_term() {
    ScalarExpr lhs = scalar_factor();
    while (peek_is("*") || peek_is("/")) {
      const ScalarOp op = next().text == "*" ? ScalarOp::kMul : ScalarOp::kDiv;
      lhs = ScalarExpr::binary(op, lhs, scalar_factor());
    }
    return lhs;
  }

  ScalarExpr scalar_factor() {
    DepthGuard guard(this);
    const Token& t = peek();
    if (accept("-")) {
      const Token& lit = peek();
      if (lit.kind == Tok::kInt) {
        next();
        uint64_t v = 0;
        auto [p, ec] = std::from_chars(lit.text.data(), lit.text.data() + lit.text.size(), v);
        if (ec != std::errc() || v > static_cast<uint64_t>(INT64_MAX) + 1) {
          syntax_error(lit, "integer literal out of range");
        }
        return ScalarExpr::int_lit(static_cast<int64_t>(0 - v));
      }
      if (lit.kind == Tok::kReal) {
        next();
        return ScalarExpr::real_lit(-std::strtod(lit.text.c_str(), nullptr));
      }
      return ScalarExpr::binary(ScalarOp::kSub, ScalarExpr::int_lit(0), scalar_factor());
    }
    if (t.kind == Tok::kInt) {
      return ScalarExpr::int_lit(int_literal(false));
    }
    if (t.kind == Tok::kReal) {
      next();
      return ScalarExpr::real_lit(std::strtod(t.text.c_str(), nullptr));
    }
    if (accept("(")) {
      ScalarExpr e = scalar_expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::kIdent) {
      if (t.text == "scalar" && peek_is("(", 1)) {
        next();
        next();
        const Token& name = expect_ident();
        if (lookup(name) != Sym::kTensor) {
          syntax_error(name, "scalar() expects a tensor variable, '" + name.text + "' is not");
        }
        expect(")");
        return ScalarExpr::scalar_of(name.text);
      }
      next();
      const Sym kind = lookup(t);
      if (kind == Sym::kTensor) {
        syntax_error(t, "tensor '" + t.text + "' used as a scalar; wrap it in scalar()");
      }
      return ScalarExpr::var(t.text);
    }
    syntax_error(t, "expected scalar expression, found " + describe(t));
  }

  Cond cond() {
    Cond c;
    c.lhs = scalar_expr();
    const Token& t = peek();
    static const std::map<std::string, CmpOp> ops = {
        {"<", CmpOp::kLt},  {"<=", CmpOp::kLe}, {">", CmpOp::kGt},
        {">=", CmpOp::kGe}, {"==", CmpOp::kEq}, {"!=", CmpOp::kNe}};
    auto it = t.kind == Tok::kPunct ? ops.find(t.text) : ops.end();
    if (it == ops.end()) syntax_error(t, "expected comparison operator, found " + describe(t));
    next();
    c.cmp = it->second;
    c.rhs = scalar_expr();
    return c;
  }

  // ---- tensor expressions ----
  WeightRef weight_ref() {
    expect_keyword("w");
    expect("[");
    WeightRef ref;
    do {
      WeightSegment seg;
      if (peek().kind == Tok::kString) {
        seg.is_text = true;
        seg.text = next().text;
        if (seg.text.find('.') != std::string::npos) {
          syntax_error(peek(), "weight key segments may not contain '.'");
        }
      } else {
        seg.is_text = false;
        seg.expr = scalar_expr();
      }
      ref.segments.push_back(std::move(seg));
    } while (accept(","));
    expect("]");
    return ref;
  }

  bool peek_call() const {
    return peek().kind == Tok::kIdent && op_from_name(peek().text).has_value() && peek_is("(", 1);
  }

  Operand operand(std::vector<Stmt>& pre) {
    const Token& t = peek();
    if (peek_call()) {
      Stmt tmp;
      tmp.kind = Stmt::Kind::kTensorAssign;
      tmp.loc = loc_of(t);
      tmp.declares = true;
      tmp.expr = call(pre);
      tmp.target = fresh_temp();
      std::string name = tmp.target;
      pre.push_back(std::move(tmp));
      return Operand::var(std::move(name));
    }
    if (peek_keyword("w") && peek_is("[", 1)) return Operand::weight_ref(weight_ref());
    if (peek_type_start()) return Operand::lit(tensor_literal());
    if (t.kind == Tok::kIdent) {
      next();
      if (lookup(t) != Sym::kTensor) {
        syntax_error(t, "'" + t.text + "' is a scalar, tensor operand expected");
      }
      return Operand::var(t.text);
    }
    syntax_error(t, "expected tensor operand, found " + describe(t));
  }

  TensorExpr call(std::vector<Stmt>& pre) {
    DepthGuard guard(this);
    const Token& name = next();
    TensorExpr e;
    e.op = *op_from_name(name.text);
    expect("(");
    if (!peek_is(")")) {
      do {
        if (peek().kind == Tok::kIdent && peek_is("=", 1)) {
          NamedAttr a;
          a.name = next().text;
          next();
          if (accept("[")) {
            a.is_list = true;
            if (!peek_is("]")) {
              do {
                a.values.push_back(scalar_expr());
              } while (accept(","));
            }
            expect("]");
          } else {
            a.values.push_back(scalar_expr());
          }
          e.attrs.push_back(std::move(a));
        } else {
          e.operands.push_back(operand(pre));
        }
      } while (accept(","));
    }
    expect(")");
    return e;
  }

  // Right-hand side of a tensor assignment; bare operands become
  // identity/const applications.
  TensorExpr tensor_rhs(std::vector<Stmt>& pre) {
    if (peek_call()) return call(pre);
    Operand o = operand(pre);
    TensorExpr e;
    e.op = o.kind == Operand::Kind::kLiteral ? OpKind::kConst : OpKind::kIdentity;
    e.operands.push_back(std::move(o));
    return e;
  }

  // ---- statements ----
  std::vector<Stmt> block_body(int depth) {
    std::vector<Stmt> out;
    while (!peek_is("}") && peek().kind != Tok::kEnd) statement(out, depth);
    return out;
  }

  std::vector<Stmt> braced_block(int depth) {
    expect("{");
    auto body = block_body(depth + 1);
    expect("}");
    return body;
  }

  void statement(std::vector<Stmt>& out, int depth) {
    DepthGuard guard(this);
    const Token& t = peek();
    if (t.kind != Tok::kIdent) syntax_error(t, "expected statement, found " + describe(t));
    Stmt s;
    s.loc = loc_of(t);
    if (t.text == "let") {
      next();
      const Token& name = expect_ident();
      expect("=");
      std::vector<Stmt> pre;
      s.kind = Stmt::Kind::kTensorAssign;
      s.expr = tensor_rhs(pre);
      expect(";");
      declare(name, Sym::kTensor);
      s.declares = true;
      s.target = name.text;
      for (auto& p : pre) out.push_back(std::move(p));
      out.push_back(std::move(s));
      return;
    }
    if (t.text == "int" && !peek_is("<", 1)) {
      next();
      const Token& name = expect_ident();
      expect("=");
      s.kind = Stmt::Kind::kIntAssign;
      s.value = scalar_expr();
      expect(";");
      declare(name, Sym::kScalar);
      s.declares = true;
      s.target = name.text;
      out.push_back(std::move(s));
      return;
    }
    if (t.text == "if") {
      next();
      s.kind = Stmt::Kind::kIf;
      s.cond = cond();
      // Each arm may declare the same name; the declarations merge after
      // the if and definite assignment decides whether reads are safe.
      const auto before = symbols_;
      s.then_body = braced_block(depth);
      const auto after_then = symbols_;
      symbols_ = before;
      if (peek_keyword("else")) {
        next();
        s.has_else = true;
        if (peek_keyword("if")) {
          statement(s.else_body, depth + 1);
        } else {
          s.else_body = braced_block(depth);
        }
      }
      for (const auto& [name, kind] : after_then) {
        auto [it, fresh] = symbols_.emplace(name, kind);
        if (!fresh && it->second != kind) {
          throw Error(ErrorCode::kDuplicateDefinition,
                      "'" + name + "' is declared with different kinds in the two branches",
                      t.line, t.column);
        }
      }
      out.push_back(std::move(s));
      return;
    }
    if (t.text == "for") {
      next();
      s.kind = Stmt::Kind::kFor;
      const Token& var = expect_ident();
      expect_keyword("in");
      s.lo = scalar_expr();
      expect("..");
      s.hi = scalar_expr();
      declare(var, Sym::kLoop);
      s.loop_var = var.text;
      s.body = braced_block(depth);
      symbols_.erase(var.text);
      out.push_back(std::move(s));
      return;
    }
    if (t.text == "return") {
      next();
      s.kind = Stmt::Kind::kReturn;
      do {
        const Token& name = expect_ident();
        if (lookup(name) != Sym::kTensor) syntax_error(name, "only tensors can be returned");
        s.returns.push_back(name.text);
      } while (accept(","));
      expect(";");
      out.push_back(std::move(s));
      return;
    }
    if (is_keyword(t.text)) syntax_error(t, "unexpected keyword '" + t.text + "'");
    next();
    const Sym kind = lookup(t);
    expect("=");
    s.target = t.text;
    if (kind == Sym::kLoop) syntax_error(t, "cannot assign to loop variable '" + t.text + "'");
    if (kind == Sym::kScalar) {
      s.kind = Stmt::Kind::kIntAssign;
      s.value = scalar_expr();
      expect(";");
      out.push_back(std::move(s));
      return;
    }
    std::vector<Stmt> pre;
    s.kind = Stmt::Kind::kTensorAssign;
    s.expr = tensor_rhs(pre);
    expect(";");
    for (auto& p : pre) out.push_back(std::move(p));
    out.push_back(std::move(s));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  int depth_ = 0;
  int temp_counter_ = 0;
  std::map<std::string, Sym> symbols_;
  std::set<std::string> used_names_;
};

}  // namespace

ProgramAst parse(std::string_view source) {
  Parser parser(lex(source));
  return parser.program();
}

ProgramAst parse_and_validate(std::string_view source) {
  ProgramAst ast = parse(source);
  const auto diags = validate(ast);
  if (!diags.empty()) {
    std::string msg = std::to_string(diags.size()) + " diagnostic(s):";
    for (const auto& d : diags) msg += "\n  " + d.to_string();
    fail(ErrorCode::kValidationFailed, msg);
  }
  return ast;
}

ProgramAst load_program(const std::string& path) { return parse_and_validate(read_file(path)); }

}  // namespace dynogram
