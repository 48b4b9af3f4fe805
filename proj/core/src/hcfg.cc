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

#include "dynogram/hcfg.h"

#include <algorithm>
#include <set>

#include "dynogram/error.h"

namespace dynogram {

std::string_view edge_label_name(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::kUncond:
      return "uncond";
    case EdgeLabel::kTrue:
      return "true";
    case EdgeLabel::kFalse:
      return "false";
  }
  return "?";
}

namespace {

class CfgBuilder {
 public:
  Cfg take() { return std::move(cfg_); }

  int new_block() {
    BasicBlock b;
    b.id = static_cast<int>(cfg_.blocks.size());
    cfg_.blocks.push_back(std::move(b));
    return cfg_.blocks.back().id;
  }

  // Emits `body` starting in block `cur`. Returns the open block control
  // falls out of, or -1 when every path returned.
  int emit(const std::vector<Stmt>& body, int cur) {
    for (const auto& s : body) {
      if (cur < 0) break;  // unreachable tail; validation reports it
      switch (s.kind) {
        case Stmt::Kind::kTensorAssign:
          cfg_.blocks[cur].stmts.push_back(s);
          break;
        case Stmt::Kind::kReturn:
          cfg_.blocks[cur].terminator = BasicBlock::Terminator::kReturn;
          cfg_.blocks[cur].returns = s.returns;
          cur = -1;
          break;
        case Stmt::Kind::kIf: {
          const int then_id = new_block();
          const int then_end = emit(s.then_body, then_id);
          int else_id = -1;
          int else_end = -1;
          if (!s.else_body.empty()) {
            else_id = new_block();
            else_end = emit(s.else_body, else_id);
          }
          int join = -1;
          if (then_end >= 0 || else_end >= 0 || else_id < 0) join = new_block();
          BasicBlock& b = cfg_.blocks[cur];
          b.terminator = BasicBlock::Terminator::kBranch;
          b.cond = s.cond;
          b.cond_loc = s.loc;
          b.on_true = then_id;
          b.on_false = else_id >= 0 ? else_id : join;
          if (then_end >= 0) cfg_.blocks[then_end].next = join;
          if (else_end >= 0) cfg_.blocks[else_end].next = join;
          cur = join;
          break;
        }
        case Stmt::Kind::kIntAssign:
        case Stmt::Kind::kFor:
          fail(ErrorCode::kInvalidArgument, "CFG construction requires a rewritten program");
      }
    }
    return cur;
  }

 private:
  Cfg cfg_;
};

}  // namespace

Cfg build_cfg(const RewrittenProgram& p) {
  CfgBuilder b;
  const int entry = b.new_block();
  const int end = b.emit(p.ast.body, entry);
  Cfg cfg = b.take();
  if (end >= 0) {
    fail(ErrorCode::kInvalidArgument, "control reaches the end of the program without a return");
  }
  cfg.entry = entry;
  return cfg;
}

std::vector<int> Hcfg::successors(int id) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.src == id) out.push_back(e.dst);
  }
  return out;
}

std::vector<int> Hcfg::predecessors(int id) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.dst == id && std::find(out.begin(), out.end(), e.src) == out.end()) {
      out.push_back(e.src);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Hcfg::successor(int id, EdgeLabel label) const {
  for (const auto& e : edges) {
    if (e.src == id && e.label == label) return e.dst;
  }
  return -1;
}

int Hcfg::num_logic() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const HcfgNode& n) { return n.is_logic(); }));
}

int Hcfg::num_tensor() const { return static_cast<int>(nodes.size()) - num_logic(); }

Hcfg build_hcfg(const Cfg& cfg) {
  // First pass: one or two provisional nodes per block.
  struct Proto {
    HcfgNode node;
    int next = -1;  // provisional uncond successor (block id target)
    int on_true = -1;
    int on_false = -1;
  };
  std::vector<Proto> protos;
  std::vector<int> block_head(cfg.blocks.size(), -1);
  for (const auto& b : cfg.blocks) {
    block_head[b.id] = static_cast<int>(protos.size());
    Proto tensor;
    tensor.node.kind = HcfgNode::Kind::kTensor;
    tensor.node.stmts = b.stmts;
    tensor.node.loc = b.stmts.empty() ? b.cond_loc : b.stmts.front().loc;
    if (b.terminator == BasicBlock::Terminator::kBranch) {
      Proto logic;
      logic.node.kind = HcfgNode::Kind::kLogic;
      logic.node.cond = b.cond;
      logic.node.loc = b.cond_loc;
      logic.on_true = b.on_true;
      logic.on_false = b.on_false;
      tensor.next = -2;  // falls into the logic node that follows
      protos.push_back(std::move(tensor));
      protos.push_back(std::move(logic));
    } else {
      if (b.terminator == BasicBlock::Terminator::kReturn) {
        tensor.node.is_exit = true;
        tensor.node.returns = b.returns;
      } else {
        tensor.next = b.next;
      }
      protos.push_back(std::move(tensor));
    }
  }
  // Resolve provisional targets to proto indices.
  auto target_of_block = [&](int block) { return block_head[block]; };
  const int n = static_cast<int>(protos.size());
  std::vector<int> next(n, -1);
  for (int i = 0; i < n; ++i) {
    if (protos[i].next == -2) {
      next[i] = i + 1;
    } else if (protos[i].next >= 0) {
      next[i] = target_of_block(protos[i].next);
    }
  }
  // Elide empty non-exit tensor nodes by following their successor.
  std::vector<bool> keep(n, true);
  for (int i = 0; i < n; ++i) {
    const auto& node = protos[i].node;
    keep[i] = node.is_logic() || node.is_exit || !node.stmts.empty();
  }
  auto resolve = [&](int i) {
    while (!keep[i]) i = next[i];
    return i;
  };
  std::vector<int> new_id(n, -1);
  Hcfg h;
  for (int i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    new_id[i] = static_cast<int>(h.nodes.size());
    HcfgNode node = protos[i].node;
    node.id = new_id[i];
    if (node.is_exit) h.exits.push_back(node.id);
    h.nodes.push_back(std::move(node));
  }
  for (int i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    if (protos[i].node.is_logic()) {
      h.edges.push_back(
          {new_id[i], new_id[resolve(target_of_block(protos[i].on_true))], EdgeLabel::kTrue});
      h.edges.push_back(
          {new_id[i], new_id[resolve(target_of_block(protos[i].on_false))], EdgeLabel::kFalse});
    } else if (next[i] >= 0) {
      h.edges.push_back({new_id[i], new_id[resolve(next[i])], EdgeLabel::kUncond});
    }
  }
  h.entry = new_id[resolve(target_of_block(cfg.entry))];
  return h;
}

void compute_liveness(Hcfg& h) {
  const int n = static_cast<int>(h.nodes.size());
  std::vector<std::set<std::string>> live_in(n);
  std::vector<std::set<std::string>> live_out(n);
  // Ids are topological, so one reverse sweep reaches the fixed point.
  for (int id = n - 1; id >= 0; --id) {
    HcfgNode& node = h.nodes[id];
    std::set<std::string> out;
    if (node.is_exit) {
      out.insert(node.returns.begin(), node.returns.end());
    } else {
      for (int s : h.successors(id)) out.insert(live_in[s].begin(), live_in[s].end());
    }
    std::set<std::string> in = out;
    if (node.is_logic()) {
      std::vector<std::string> reads;
      node.cond.lhs.collect_tensor_reads(reads);
      node.cond.rhs.collect_tensor_reads(reads);
      in.insert(reads.begin(), reads.end());
    } else {
      for (auto it = node.stmts.rbegin(); it != node.stmts.rend(); ++it) {
        in.erase(it->target);
        for (const auto& r : expr_reads(it->expr)) in.insert(r);
      }
    }
    live_in[id] = in;
    live_out[id] = out;
    node.live_in.assign(in.begin(), in.end());
    node.live_out.assign(out.begin(), out.end());
  }
}

Hcfg make_hcfg(const RewrittenProgram& p) {
  Hcfg h = build_hcfg(build_cfg(p));
  compute_liveness(h);
  return h;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Hcfg& h, const std::string& name) {
  std::string out = "digraph \"" + dot_escape(name) + "\" {\n  node [fontname=\"monospace\"];\n";
  for (const auto& n : h.nodes) {
    std::string label;
    if (n.is_logic()) {
      label = "L" + std::to_string(n.id) + ": " + dot_escape(format_cond(n.cond));
    } else {
      label = "T" + std::to_string(n.id) + "\\l";
      for (const auto& s : n.stmts) label += dot_escape(s.target + " = " + format_tensor_expr(s.expr)) + "\\l";
      if (n.is_exit) {
        label += "return";
        for (size_t i = 0; i < n.returns.size(); ++i) label += (i ? ", " : " ") + n.returns[i];
        label += "\\l";
      }
    }
    out += "  n" + std::to_string(n.id) + " [shape=" + (n.is_logic() ? "diamond" : "box") +
           ", label=\"" + label + "\"];\n";
  }
  for (const auto& e : h.edges) {
    out += "  n" + std::to_string(e.src) + " -> n" + std::to_string(e.dst);
    if (e.label != EdgeLabel::kUncond) {
      out += " [label=\"" + std::string(edge_label_name(e.label)) + "\"]";
    }
    out += ";\n";
  }
  return out + "}\n";
}

}  // namespace dynogram
