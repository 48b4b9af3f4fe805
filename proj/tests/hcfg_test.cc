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

#include <gtest/gtest.h>

#include "dynogram/hcfg.h"
#include "dynogram/interpreter.h"
#include "test_support.h"

namespace dynogram {
namespace {

RewrittenProgram rw(const std::string& src) { return rewrite(parse(src)); }

const char* kDiamond =
    "model m(x: tensor<1,4>) -> 1 {"
    "  let s = reduce_sum(x);"
    "  if scalar(s) > 0.0 { let y = relu(x); } else { let y = sigmoid(x); }"
    "  let z = add(y, x);"
    "  return z; }";

void collect_tensor_stmts(const std::vector<Stmt>& body, std::multiset<std::string>& out) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::kTensorAssign) out.insert(print_statements({s}, 0));
    collect_tensor_stmts(s.then_body, out);
    collect_tensor_stmts(s.else_body, out);
  }
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

TEST(Cfg, StraightLineIsOneBlock) {
  const Cfg c = build_cfg(rw("model m(x: tensor<1,4>) -> 1 { let y = relu(x); return y; }"));
  ASSERT_EQ(c.blocks.size(), 1u);
  EXPECT_EQ(c.blocks[0].terminator, BasicBlock::Terminator::kReturn);
}

TEST(Cfg, DiamondHasFourBlocks) {
  const Cfg c = build_cfg(rw(kDiamond));
  ASSERT_EQ(c.blocks.size(), 4u);
  EXPECT_EQ(c.blocks[0].terminator, BasicBlock::Terminator::kBranch);
  EXPECT_EQ(c.blocks[1].next, 3);
  EXPECT_EQ(c.blocks[2].next, 3);
}

TEST(Cfg, SkipnetBlockCount) {
  // Entry, then per gate: taken, skipped and join blocks.
  EXPECT_EQ(build_cfg(testing::load_zoo("skipnet").rewritten).blocks.size(), 1u + 6u * 3u);
}

TEST(Hcfg, DiamondPartition) {
  const Hcfg h = make_hcfg(rw(kDiamond));
  EXPECT_EQ(h.num_logic(), 1);
  EXPECT_EQ(h.num_tensor(), 4);
  const HcfgNode& logic = h.nodes[1];
  ASSERT_TRUE(logic.is_logic());
  EXPECT_EQ(logic.live_in, (std::vector<std::string>{"s", "x"}));
  const int t = h.successor(1, EdgeLabel::kTrue);
  const int f = h.successor(1, EdgeLabel::kFalse);
  EXPECT_TRUE(contains(h.nodes[t].live_out, "y"));
  EXPECT_TRUE(contains(h.nodes[f].live_out, "y"));
  EXPECT_EQ(h.nodes[h.exits.at(0)].live_out, std::vector<std::string>{"z"});
}

TEST(Hcfg, LivenessOfSimpleBlock) {
  const Hcfg h = make_hcfg(rw("model m(x: tensor<1,4>) -> 1 { let y = relu(x); return y; }"));
  ASSERT_EQ(h.nodes.size(), 1u);
  EXPECT_EQ(h.nodes[0].live_in, std::vector<std::string>{"x"});
  EXPECT_EQ(h.nodes[0].live_out, std::vector<std::string>{"y"});
}

TEST(Hcfg, ZooCounts) {
  const Hcfg skip = make_hcfg(testing::load_zoo("skipnet").rewritten);
  EXPECT_EQ(skip.num_logic(), 6);
  EXPECT_EQ(skip.num_tensor(), 19);
  const Hcfg stat = make_hcfg(testing::load_zoo("static_net").rewritten);
  EXPECT_EQ(stat.num_logic(), 0);
  EXPECT_EQ(stat.num_tensor(), 1);
}

TEST(Hcfg, EarlyExitEntryExportsConfidence) {
  const Hcfg h = make_hcfg(testing::load_zoo("early_exit").rewritten);
  EXPECT_EQ(h.num_logic(), 2);
  const HcfgNode& entry = h.nodes[h.entry];
  ASSERT_FALSE(entry.is_logic());
  EXPECT_TRUE(contains(entry.live_out, "conf"));
  EXPECT_TRUE(h.nodes[h.successors(h.entry).at(0)].is_logic());
}

TEST(Hcfg, ZooInvariants) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    const Hcfg h = make_hcfg(m.rewritten);

    // Partition completeness.
    std::multiset<std::string> original, partitioned;
    collect_tensor_stmts(m.rewritten.ast.body, original);
    for (const auto& n : h.nodes) {
      if (!n.is_logic()) collect_tensor_stmts(n.stmts, partitioned);
    }
    EXPECT_EQ(partitioned, original);
    EXPECT_EQ(h.num_logic(), count_ifs(m.rewritten.ast.body));

    for (const auto& n : h.nodes) {
      EXPECT_TRUE(std::is_sorted(n.live_in.begin(), n.live_in.end()));
      EXPECT_TRUE(std::is_sorted(n.live_out.begin(), n.live_out.end()));
      const auto succ = h.successors(n.id);
      if (n.is_logic()) {
        EXPECT_EQ(succ.size(), 2u);
        EXPECT_GE(h.successor(n.id, EdgeLabel::kTrue), 0);
        EXPECT_GE(h.successor(n.id, EdgeLabel::kFalse), 0);
        std::vector<std::string> reads;
        n.cond.lhs.collect_tensor_reads(reads);
        n.cond.rhs.collect_tensor_reads(reads);
        EXPECT_EQ(reads.size(), 1u);
        for (const auto& r : reads) EXPECT_TRUE(contains(n.live_in, r)) << r;
      } else {
        EXPECT_LE(succ.size(), 1u);
        EXPECT_EQ(n.is_exit, succ.empty());
      }
    }
    for (const auto& e : h.edges) EXPECT_LT(e.src, e.dst);  // topological, hence acyclic
  }
}

TEST(Hcfg, PathPreservation) {
  for (const auto& name : testing::zoo_names()) {
    SCOPED_TRACE(name);
    const auto m = testing::load_zoo(name);
    const Hcfg h = make_hcfg(m.rewritten);
    for (uint64_t i = 0; i < 200; ++i) {
      const auto in = random_inputs(m.ast.params, 5, i);
      const InterpResult ref = interpret(m.rewritten.ast, in, m.weights);
      const HcfgWalk walk = walk_hcfg(h, m.ast.params, in, m.weights);
      std::vector<bool> outcomes;
      for (const auto& [node, taken] : walk.branches) {
        EXPECT_TRUE(h.nodes[node].is_logic());
        outcomes.push_back(taken);
      }
      EXPECT_EQ(outcomes, ref.trace.dynamic_outcomes());
      EXPECT_TRUE(testing::bitwise_equal(walk.outputs, ref.outputs));
    }
  }
}

TEST(Hcfg, DotRendering) {
  const std::string dot = to_dot(make_hcfg(rw(kDiamond)), "m");
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("diamond"), std::string::npos);
  EXPECT_NE(dot.find("box"), std::string::npos);
}

}  // namespace
}  // namespace dynogram
