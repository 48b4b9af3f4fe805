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

#include "dynogram/host_program.h"

#include <algorithm>

#include "dynogram/binary_io.h"
#include "dynogram/error.h"

namespace dynogram {

namespace {

constexpr int kMaxExprDepth = 64;

enum ExprTag : uint8_t { kTagInt = 0, kTagReal = 1, kTagScalarOf = 2, kTagBinary = 3 };

void write_expr(ByteWriter& w, const ScalarExpr& e) {
  switch (e.kind()) {
    case ScalarExpr::Kind::kInt:
      w.u8(kTagInt);
      w.i64(e.int_value());
      break;
    case ScalarExpr::Kind::kReal:
      w.u8(kTagReal);
      w.f64(e.real_value());
      break;
    case ScalarExpr::Kind::kScalarOf:
      w.u8(kTagScalarOf);
      w.str16(e.name());
      break;
    case ScalarExpr::Kind::kBinary:
      w.u8(kTagBinary);
      w.u8(static_cast<uint8_t>(e.op()));
      write_expr(w, e.lhs());
      write_expr(w, e.rhs());
      break;
    case ScalarExpr::Kind::kVar:
      fail(ErrorCode::kInvalidArgument,
           "host conditions cannot reference variable '" + e.name() + "'");
  }
}

ScalarExpr read_expr(ByteReader& r, int depth) {
  if (depth > kMaxExprDepth) r.corrupt("condition nested too deeply");
  const uint8_t tag = r.u8();
  switch (tag) {
    case kTagInt:
      return ScalarExpr::int_lit(r.i64());
    case kTagReal:
      return ScalarExpr::real_lit(r.f64());
    case kTagScalarOf:
      return ScalarExpr::scalar_of(r.str16());
    case kTagBinary: {
      const uint8_t op = r.u8();
      if (op > static_cast<uint8_t>(ScalarOp::kDiv)) r.corrupt("bad scalar operator");
      ScalarExpr lhs = read_expr(r, depth + 1);
      ScalarExpr rhs = read_expr(r, depth + 1);
      return ScalarExpr::binary(static_cast<ScalarOp>(op), std::move(lhs), std::move(rhs));
    }
    default:
      r.corrupt("bad condition tag " + std::to_string(tag));
  }
}

void write_names(ByteWriter& w, const std::vector<std::string>& names) {
  w.u16(static_cast<uint16_t>(names.size()));
  for (const auto& n : names) w.str16(n);
}

std::vector<std::string> read_names(ByteReader& r) {
  const uint16_t n = r.u16();
  std::vector<std::string> out;
  for (uint16_t i = 0; i < n; ++i) out.push_back(r.str16());
  return out;
}

}  // namespace

int HostProgram::node_at(int pc) const {
  for (const auto& [node, at] : labels) {
    if (at == pc) return node;
  }
  return -1;
}

int HostProgram::count(HostInstr::Op op) const {
  return static_cast<int>(
      std::count_if(code.begin(), code.end(), [&](const HostInstr& i) { return i.op == op; }));
}

std::string_view host_op_name(HostInstr::Op op) {
  switch (op) {
    case HostInstr::Op::kCall:
      return "call";
    case HostInstr::Op::kCopy:
      return "copy";
    case HostInstr::Op::kAssignConst:
      return "assign_const";
    case HostInstr::Op::kBranch:
      return "branch";
    case HostInstr::Op::kJump:
      return "jump";
    case HostInstr::Op::kReturn:
      return "return";
  }
  return "?";
}

std::string serialize_host(const HostProgram& p) {
  ByteWriter w;
  w.bytes("DYHP");
  w.u32(kHostProgramVersion);
  w.u32(static_cast<uint32_t>(p.literals.size()));
  for (const auto& t : p.literals) w.tensor_body(t);
  w.u32(static_cast<uint32_t>(p.labels.size()));
  for (const auto& [node, pc] : p.labels) {
    w.u32(static_cast<uint32_t>(node));
    w.u32(static_cast<uint32_t>(pc));
  }
  w.u32(static_cast<uint32_t>(p.code.size()));
  for (const auto& i : p.code) {
    w.u8(static_cast<uint8_t>(i.op));
    switch (i.op) {
      case HostInstr::Op::kCall:
        w.u32(static_cast<uint32_t>(i.graph));
        write_names(w, i.ins);
        write_names(w, i.outs);
        break;
      case HostInstr::Op::kCopy:
        w.str16(i.dst);
        w.str16(i.src);
        break;
      case HostInstr::Op::kAssignConst:
        w.str16(i.dst);
        w.u32(static_cast<uint32_t>(i.literal));
        break;
      case HostInstr::Op::kBranch:
        write_expr(w, i.cond.lhs);
        w.u8(static_cast<uint8_t>(i.cond.cmp));
        write_expr(w, i.cond.rhs);
        w.u32(static_cast<uint32_t>(i.on_true));
        w.u32(static_cast<uint32_t>(i.on_false));
        break;
      case HostInstr::Op::kJump:
        w.u32(static_cast<uint32_t>(i.target));
        break;
      case HostInstr::Op::kReturn:
        write_names(w, i.ins);
        break;
    }
  }
  return w.take();
}

HostProgram deserialize_host(std::string_view bytes) {
  ByteReader r(bytes, "host.bin");
  r.expect_header("DYHP", kHostProgramVersion);
  HostProgram p;
  const uint32_t nlit = r.u32();
  for (uint32_t k = 0; k < nlit; ++k) p.literals.push_back(r.tensor_body());
  const uint32_t nlabels = r.u32();
  for (uint32_t k = 0; k < nlabels; ++k) {
    const uint32_t node = r.u32();
    const uint32_t pc = r.u32();
    p.labels.emplace_back(static_cast<int>(node), static_cast<int>(pc));
  }
  const uint32_t n = r.u32();
  if (n > r.remaining()) r.corrupt("instruction count exceeds data");
  for (uint32_t k = 0; k < n; ++k) {
    HostInstr i;
    const uint8_t op = r.u8();
    if (op < 1 || op > 6) r.corrupt("bad op code " + std::to_string(op));
    i.op = static_cast<HostInstr::Op>(op);
    auto target = [&](uint32_t t) {
      if (t <= k || t >= n) {
        r.corrupt("instruction " + std::to_string(k) + " jumps to " + std::to_string(t));
      }
      return static_cast<int>(t);
    };
    switch (i.op) {
      case HostInstr::Op::kCall:
        i.graph = static_cast<int>(r.u32());
        i.ins = read_names(r);
        i.outs = read_names(r);
        break;
      case HostInstr::Op::kCopy:
        i.dst = r.str16();
        i.src = r.str16();
        break;
      case HostInstr::Op::kAssignConst: {
        i.dst = r.str16();
        const uint32_t lit = r.u32();
        if (lit >= p.literals.size()) r.corrupt("literal index out of range");
        i.literal = static_cast<int>(lit);
        break;
      }
      case HostInstr::Op::kBranch: {
        i.cond.lhs = read_expr(r, 0);
        const uint8_t cmp = r.u8();
        if (cmp > static_cast<uint8_t>(CmpOp::kNe)) r.corrupt("bad comparator");
        i.cond.cmp = static_cast<CmpOp>(cmp);
        i.cond.rhs = read_expr(r, 0);
        i.on_true = target(r.u32());
        i.on_false = target(r.u32());
        break;
      }
      case HostInstr::Op::kJump:
        i.target = target(r.u32());
        break;
      case HostInstr::Op::kReturn:
        i.ins = read_names(r);
        break;
    }
    p.code.push_back(std::move(i));
  }
  for (const auto& [node, pc] : p.labels) {
    if (pc < 0 || pc > static_cast<int>(n)) r.corrupt("label out of range");
  }
  if (!r.at_end()) r.corrupt("trailing bytes");
  return p;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k];
  return s;
}

}  // namespace

std::string emit_pseudo(const HostProgram& p) {
  std::string out;
  for (size_t pc = 0; pc < p.code.size(); ++pc) {
    const int node = p.node_at(static_cast<int>(pc));
    if (node >= 0) out += "node" + std::to_string(node) + ":\n";
    const HostInstr& i = p.code[pc];
    std::string line = "  " + std::to_string(pc) + ": ";
    switch (i.op) {
      case HostInstr::Op::kCall:
        line += join(i.outs) + " = g" + std::to_string(i.graph) + "(" + join(i.ins) + ")";
        break;
      case HostInstr::Op::kCopy:
        line += i.dst + " = " + i.src;
        break;
      case HostInstr::Op::kAssignConst:
        line += i.dst + " = " + format_tensor_literal(p.literals[i.literal]);
        break;
      case HostInstr::Op::kBranch:
        line += "if " + format_cond(i.cond) + " goto " + std::to_string(i.on_true) + " else goto " +
                std::to_string(i.on_false);
        break;
      case HostInstr::Op::kJump:
        line += "goto " + std::to_string(i.target);
        break;
      case HostInstr::Op::kReturn:
        line += "return " + join(i.ins);
        break;
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace dynogram
