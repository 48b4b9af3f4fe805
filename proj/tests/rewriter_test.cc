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

#include <gtest/gtest.h>

#include "dynogram/error.h"
#include "dynogram/interpreter.h"
#include "dynogram/rewriter.h"
#include "test_support.h"

namespace dynogram {
namespace {

// Collects every weight key in statement order.
void collect_keys(const std::vector<Stmt>& body, std::vector<std::string>& out) {
  for (const auto& s : body) {
    for (const auto& o : s.expr.operands) {
      if (o.kind == Operand::Kind::kWeight) out.push_back(o.weight.key());
    }
    collect_keys(s.then_body, out);
    collect_keys(s.else_body, out);
  }
}

bool all_conds_dynamic(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::kIf &&
        (!s.cond.is_dynamic() || !all_conds_dynamic(s.then_body) ||
         !all_conds_dynamic(s.else_body))) {
      return false;
    }
  }
  return true;
}

TEST(Unroll, SubstitutesLoopVariable) {
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 {"
      "  weight \"blk.*\" : real<4,4>; weight \"b.*\" : real<1,4>;"
      "  for i in 0..3 { x = relu(dense(x, w[\"blk\", i], w[\"b\", i])); }"
      "  return x; }");
  const RewrittenProgram r = rewrite(p);
  EXPECT_EQ(count_loops(r.ast.body), 0);
  std::vector<std::string> keys;
  collect_keys(r.ast.body, keys);
  EXPECT_EQ(keys, (std::vector<std::string>{"blk.0", "b.0", "blk.1", "b.1", "blk.2", "b.2"}));
  // dense temp + relu per trip, then the return
  EXPECT_EQ(r.ast.body.size(), 7u);
}

TEST(Unroll, ZeroTripLoopVanishes) {
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 { for i in 2..2 { x = relu(x); } return x; }");
  const ProgramAst u = unroll_loops(p);
  ASSERT_EQ(u.body.size(), 1u);
  EXPECT_EQ(u.body[0].kind, Stmt::Kind::kReturn);
}

TEST(Unroll, DecoderTopLevelInstances) {
  // Independent count: statements directly inside the loop times its trip
  // count, read off the parsed source.
  const ProgramAst p = load_program(testing::zoo_path("decoder"));
  int64_t expected = 0, outside = 0;
  for (const auto& s : p.body) {
    if (s.kind == Stmt::Kind::kFor) {
      expected += static_cast<int64_t>(s.body.size()) * (s.hi.int_value() - s.lo.int_value());
    } else {
      ++outside;
    }
  }
  EXPECT_EQ(expected, 40);
  const ProgramAst u = unroll_loops(p);
  EXPECT_EQ(count_loops(u.body), 0);
  EXPECT_EQ(static_cast<int64_t>(u.body.size()) - outside, 40);
}

TEST(Unroll, BudgetAndBounds) {
  const ProgramAst big = parse(
      "model m(x: tensor<1,4>) -> 1 {"
      "  for i in 0..1000 { for j in 0..1000 { x = relu(x); } } return x; }");
  try {
    unroll_loops(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnrollBudgetExceeded);
  }
  EXPECT_NO_THROW(unroll_loops(big, 2000000));
}

TEST(ConstProp, FoldsComputedKeyAndDeletesBranch) {
  // Group/index bookkeeping resolved at compile time into one concrete key.
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 {"
      "  weight \"group.*.ds.*\" : real<4,4>;"
      "  int g = 0; int i = 0; int n = 3;"
      "  if g == 0 { if i < n - 1 { i = i + 1; } }"
      "  let y = matmul(x, w[\"group\", g + 1, \"ds\", i]);"
      "  return y; }");
  const RewrittenProgram r = rewrite(p);
  EXPECT_EQ(count_ifs(r.ast.body), 0);
  std::vector<std::string> keys;
  collect_keys(r.ast.body, keys);
  EXPECT_EQ(keys, std::vector<std::string>{"group.1.ds.1"});
  for (const auto& s : r.ast.body) EXPECT_NE(s.kind, Stmt::Kind::kIntAssign);
}

TEST(ConstProp, StaticElseInlined) {
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 {"
      "  if 3 > 5 { x = relu(x); } else { x = sigmoid(x); } return x; }");
  const RewrittenProgram r = rewrite(p);
  ASSERT_EQ(r.ast.body.size(), 2u);
  EXPECT_EQ(r.ast.body[0].expr.op, OpKind::kSigmoid);
  EXPECT_EQ(r.provenance.size(), static_cast<size_t>(count_statements(r.ast.body)));
}

TEST(ConstProp, DynamicCondSurvives) {
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 { let gate = reduce_sum(x);"
      "  if scalar(gate) > 0.5 { x = relu(x); } return x; }");
  const RewrittenProgram r = rewrite(p);
  EXPECT_EQ(count_ifs(r.ast.body), 1);
  EXPECT_TRUE(all_conds_dynamic(r.ast.body));
}

TEST(ConstProp, InputDependentKeyRejected) {
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 { weight \"a.*\" : real<4,4>;"
      "  let t = reduce_sum(x); int k = scalar(t);"
      "  let y = matmul(x, w[\"a\", k]); return y; }");
  try {
    rewrite(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kNonConstWeightKey ||
                e.code() == ErrorCode::kNonConstScalar);
  }
}

TEST(Rewrite, ZooStructure) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    EXPECT_EQ(count_loops(m.rewritten.ast.body), 0);
    EXPECT_TRUE(all_conds_dynamic(m.rewritten.ast.body));
    std::vector<std::string> keys;
    collect_keys(m.rewritten.ast.body, keys);
    for (const auto& k : keys) EXPECT_TRUE(m.weights.contains(k)) << k;
    // Rewriting is idempotent.
    EXPECT_EQ(rewrite(m.rewritten.ast).ast, m.rewritten.ast);
  }
  EXPECT_EQ(count_ifs(testing::load_zoo("skipnet").rewritten.ast.body), 6);
  EXPECT_EQ(count_ifs(testing::load_zoo("static_net").rewritten.ast.body), 0);
}

TEST(Rewrite, SemanticsPreserved) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    for (uint64_t i = 0; i < 50; ++i) {
      const auto in = random_inputs(m.ast.params, 3, i);
      EXPECT_TRUE(testing::bitwise_equal(interpret(m.ast, in, m.weights).outputs,
                                         interpret(m.rewritten.ast, in, m.weights).outputs));
    }
  }
}

TEST(Rewrite, IntegerDivisionTruncatesTowardZero) {
  const ProgramAst p = parse(
      "model m(x: tensor<1,4>) -> 1 { weight \"a.*\" : real<4,4>;"
      "  int k = (0 - 7) / 2 + 5; let y = matmul(x, w[\"a\", k]); return y; }");
  std::vector<std::string> keys;
  collect_keys(rewrite(p).ast.body, keys);
  EXPECT_EQ(keys, std::vector<std::string>{"a.2"});
}

}  // namespace
}  // namespace dynogram
