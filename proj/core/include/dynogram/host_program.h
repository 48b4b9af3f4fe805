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

#ifndef DYNOGRAM_HOST_PROGRAM_H_
#define DYNOGRAM_HOST_PROGRAM_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/tensor.h"

namespace dynogram {

inline constexpr uint32_t kHostProgramVersion = 1;

struct HostInstr {
  enum class Op : uint8_t {
    kCall = 1,
    kCopy = 2,
    kAssignConst = 3,
    kBranch = 4,
    kJump = 5,
    kReturn = 6,
  };

  Op op = Op::kReturn;
  int graph = -1;                 // kCall
  std::vector<std::string> ins;   // kCall arguments, kReturn values
  std::vector<std::string> outs;  // kCall results
  std::string dst;                // kCopy, kAssignConst
  std::string src;                // kCopy
  int literal = -1;               // kAssignConst: index into the literal pool
  Cond cond;                      // kBranch
  int on_true = -1;               // kBranch
  int on_false = -1;              // kBranch
  int target = -1;                // kJump

  friend bool operator==(const HostInstr&, const HostInstr&) = default;
};

struct HostProgram {
  std::vector<HostInstr> code;
  std::vector<Tensor> literals;
  // (HCFG node id, first instruction index) in node order.
  std::vector<std::pair<int, int>> labels;

  // HCFG node whose code starts at `pc`, or -1.
  int node_at(int pc) const;
  int count(HostInstr::Op op) const;

  friend bool operator==(const HostProgram&, const HostProgram&) = default;
};

std::string_view host_op_name(HostInstr::Op op);

// host.bin: "DYHP", version u32, literal pool, label table, instruction
// stream (op code u8 + operands). Every jump target must lie strictly
// after its instruction, which keeps the program acyclic.
std::string serialize_host(const HostProgram& p);
// Throws kInvalidBundle on bad magic/version, truncation or bad targets.
HostProgram deserialize_host(std::string_view bytes);

// Human-readable listing.
std::string emit_pseudo(const HostProgram& p);

}  // namespace dynogram

#endif  // DYNOGRAM_HOST_PROGRAM_H_
