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

#ifndef DYNOGRAM_HCFG_H_
#define DYNOGRAM_HCFG_H_

#include <string>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/rewriter.h"

namespace dynogram {

enum class EdgeLabel : uint8_t { kUncond, kTrue, kFalse };

std::string_view edge_label_name(EdgeLabel label);

// Basic block of a loop-free program. Blocks always end at a conditional
// or a return; ids are assigned in a topological order.
struct BasicBlock {
  enum class Terminator : uint8_t { kFallthrough, kBranch, kReturn };

  int id = 0;
  std::vector<Stmt> stmts;  // tensor assignments only
  Terminator terminator = Terminator::kFallthrough;
  Cond cond;                         // kBranch
  SourceLoc cond_loc;                // kBranch
  int next = -1;                     // kFallthrough
  int on_true = -1;                  // kBranch
  int on_false = -1;                 // kBranch
  std::vector<std::string> returns;  // kReturn
};

struct Cfg {
  std::vector<BasicBlock> blocks;  // index == id
  int entry = 0;
};

Cfg build_cfg(const RewrittenProgram& p);

struct HcfgNode {
  enum class Kind : uint8_t { kTensor, kLogic };

  int id = 0;
  Kind kind = Kind::kTensor;
  std::vector<Stmt> stmts;  // kTensor
  Cond cond;                // kLogic
  SourceLoc loc;
  bool is_exit = false;
  std::vector<std::string> returns;  // exit nodes
  // Sorted by name.
  std::vector<std::string> live_in;
  std::vector<std::string> live_out;

  bool is_logic() const { return kind == Kind::kLogic; }
};

struct HcfgEdge {
  int src = 0;
  int dst = 0;
  EdgeLabel label = EdgeLabel::kUncond;

  friend bool operator==(const HcfgEdge&, const HcfgEdge&) = default;
};

struct Hcfg {
  std::vector<HcfgNode> nodes;  // index == id, topological
  std::vector<HcfgEdge> edges;
  int entry = 0;
  std::vector<int> exits;

  std::vector<int> successors(int id) const;
  std::vector<int> predecessors(int id) const;
  // Successor along `label`; -1 if none.
  int successor(int id, EdgeLabel label) const;
  int num_logic() const;
  int num_tensor() const;
};

// Splits branch blocks into a tensor prefix and a logic node and elides
// empty non-exit tensor blocks. Liveness is left empty.
Hcfg build_hcfg(const Cfg& cfg);

// Backward liveness: exit live_out is the return tuple.
void compute_liveness(Hcfg& h);

// build_cfg + build_hcfg + compute_liveness.
Hcfg make_hcfg(const RewrittenProgram& p);

std::string to_dot(const Hcfg& h, const std::string& name);

}  // namespace dynogram

#endif  // DYNOGRAM_HCFG_H_
