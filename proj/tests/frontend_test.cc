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

#include <random>

#include <gtest/gtest.h>

#include "dynogram/binary_io.h"
#include "dynogram/error.h"
#include "dynogram/frontend.h"
#include "test_support.h"

namespace dynogram {
namespace {

std::vector<DiagnosticKind> kinds(const std::string& src) {
  std::vector<DiagnosticKind> out;
  for (const auto& d : validate(parse(src))) out.push_back(d.kind);
  return out;
}

TEST(Parse, StraightLine) {
  const ProgramAst p = parse("model m(x: tensor<1,4>) -> 1 { let y = relu(x); return y; }");
  EXPECT_EQ(p.name, "m");
  ASSERT_EQ(p.params.size(), 1u);
  EXPECT_EQ(p.params[0].type.shape, (Shape{1, 4}));
  ASSERT_EQ(p.body.size(), 2u);
  EXPECT_EQ(p.body[0].kind, Stmt::Kind::kTensorAssign);
  EXPECT_EQ(p.body[1].kind, Stmt::Kind::kReturn);
  EXPECT_TRUE(validate(p).empty());
}

TEST(Parse, NestedCallsAreDesugared) {
  const ProgramAst p =
      parse("model m(x: tensor<1,4>) -> 1 { let y = relu(add(x, x)); return y; }");
  ASSERT_EQ(p.body.size(), 3u);
  EXPECT_EQ(p.body[0].expr.op, OpKind::kAdd);
  EXPECT_EQ(p.body[1].expr.op, OpKind::kRelu);
}

TEST(Parse, InputDependentLoopBoundRejected) {
  const std::string src =
      "model m(x: tensor<1,4>) -> 1 { let s = reduce_sum(x);"
      " for i in 0..scalar(s) { x = relu(x); } return x; }";
  bool rejected = false;
  try {
    const auto k = kinds(src);
    rejected = k.size() == 1 && k[0] == DiagnosticKind::kInputDependentLoop;
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::kSyntaxError;
  }
  EXPECT_TRUE(rejected);
}

TEST(Parse, ErrorsCarryPositions) {
  try {
    parse("model m(x: tensor<1,4>) -> 1 {\n  let y = relu(z);\n  return y;\n}");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedIdentifier);
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
  try {
    parse("model m(x: tensor<1,4>) -> 1 { let x = relu(x); return x; }");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateDefinition);
  }
  try {
    parse("model m(x: tensor<1,4>) -> 1 { let y = relu(x) return y; }");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyntaxError);
  }
}

TEST(Validate, DefiniteAssignmentOnElsePath) {
  const auto k = kinds(
      "model m(x: tensor<1,4>) -> 1 {"
      "  let s = reduce_sum(x);"
      "  if scalar(s) > 0.0 { let y = relu(x); } else { x = relu(x); }"
      "  return y; }");
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0], DiagnosticKind::kDefiniteAssignment);
}

TEST(Validate, BothArmsMayDeclare) {
  EXPECT_TRUE(kinds("model m(x: tensor<1,4>) -> 1 { let s = reduce_sum(x);"
                    "  if scalar(s) > 0.0 { let y = relu(x); } else { let y = sigmoid(x); }"
                    "  return y; }")
                  .empty());
  EXPECT_THROW(parse("model m(x: tensor<1,4>) -> 1 { let s = reduce_sum(x);"
                     "  if scalar(s) > 0.0 { let y = relu(x); } else { int y = 1; }"
                     "  return x; }"),
               Error);
}

TEST(Validate, LoopBoundFromTensor) {
  const auto k = kinds(
      "model m(x: tensor<1,4>) -> 1 {"
      "  let t = reduce_sum(x); int k = scalar(t);"
      "  for i in 0..k { x = relu(x); }"
      "  return x; }");
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0], DiagnosticKind::kInputDependentLoop);
}

TEST(Validate, OtherDiagnostics) {
  EXPECT_EQ(kinds("model m(x: tensor<1,4>) -> 1 { let y = add(x); return y; }"),
            std::vector{DiagnosticKind::kArity});
  // begin and end are reported separately
  EXPECT_EQ(kinds("model m(x: tensor<1,4>) -> 1 { let y = slice(x); return y; }"),
            std::vector(2, DiagnosticKind::kArity));
  EXPECT_EQ(kinds("model m(x: tensor<1,4>) -> 1 { let y = relu(x); }"),
            std::vector{DiagnosticKind::kMissingReturn});
  EXPECT_EQ(kinds("model m(x: tensor<1,4>) -> 1 { return x; let y = relu(x); }"),
            std::vector{DiagnosticKind::kUnreachableCode});
  EXPECT_EQ(kinds("model m(x: tensor<1,4>) -> 2 { return x; }"),
            std::vector{DiagnosticKind::kReturnArity});
}

TEST(Zoo, ParsesValidatesAndRoundTrips) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const std::string src = read_file(testing::zoo_path(name));
    const ProgramAst p = parse(src);
    EXPECT_TRUE(validate(p).empty());
    const std::string printed = print_program(p);
    const ProgramAst again = parse(printed);
    EXPECT_EQ(again, p);
    EXPECT_EQ(print_program(again), printed);
  }
}

TEST(Zoo, HeadersCarryDecisionKind) {
  EXPECT_EQ(load_program(testing::zoo_path("skipnet")).decision_kind, DecisionKind::kClassifier);
  const ProgramAst d = load_program(testing::zoo_path("decoder"));
  EXPECT_EQ(d.decision_kind, DecisionKind::kGenerator);
  EXPECT_EQ(d.eos_token, 6);
}

// Any byte sequence parses or raises a positioned Error; nothing else
// escapes.
TEST(ParserFuzz, MutatedZooSourcesNeverCrash) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "(){}[]<>=,;:+-*/@.\"x0123456789 \nletifforreturn";
  int parsed = 0, rejected = 0;
  for (const auto& name : testing::zoo_names()) {
    const std::string src = read_file(testing::zoo_path(name));
    for (int trial = 0; trial < 300; ++trial) {
      std::string s = src;
      const int edits = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < edits; ++e) {
        const size_t pos = rng() % s.size();
        switch (rng() % 3) {
          case 0:
            s.erase(pos, 1 + rng() % 8);
            break;
          case 1:
            s.insert(pos, 1, alphabet[rng() % alphabet.size()]);
            break;
          default:
            s[pos] = static_cast<char>(rng() % 256);
        }
      }
      try {
        validate(parse(s));
        ++parsed;
      } catch (const Error& e) {
        EXPECT_GE(e.line(), 0);
        ++rejected;
      }
    }
  }
  EXPECT_EQ(parsed + rejected, 1200);
  EXPECT_GT(rejected, 0);
}

TEST(ParserFuzz, RandomBytes) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s(rng() % 200, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    try {
      parse(s);
    } catch (const Error&) {
    }
  }
  // Deep nesting is bounded instead of overflowing the stack.
  std::string deep = "model m(x: tensor<1>) -> 1 { let y = ";
  for (int i = 0; i < 5000; ++i) deep += "relu(";
  EXPECT_THROW(parse(deep), Error);
}

}  // namespace
}  // namespace dynogram
