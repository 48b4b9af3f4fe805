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

#ifndef DYNOGRAM_HOST_H_
#define DYNOGRAM_HOST_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dynogram/bundle.h"
#include "dynogram/driver.h"
#include "dynogram/hcfg.h"
#include "dynogram/host_program.h"

namespace dynogram {

// Linearizes the HCFG in node order: a tensor node becomes its Call (when
// its graph survived) followed by its residual instructions, a logic node
// becomes a Branch, an exit a Return. Residual copies read the values the
// block started with; sources the Call would clobber are saved to
// `%save_N` temporaries first.
HostProgram synthesize_host(const Hcfg& h, const CompiledProgram& compiled);

struct TransferMeter {
  uint64_t host_to_device = 0;
  uint64_t device_to_host = 0;

  uint64_t total() const { return host_to_device + device_to_host; }
};

struct HostRun {
  std::vector<Tensor> outputs;
  TransferMeter meter;
  // (HCFG node of the Branch, outcome) in execution order.
  std::vector<std::pair<int, bool>> branches;
  int calls = 0;
  int steps = 0;
};

// Executes the bundle's host program. Throws kRuntimeShapeMismatch for
// inputs not matching the manifest or Call arguments not matching the
// compiled signature.
HostRun run_host(const Bundle& b, std::span<const Tensor> inputs);

}  // namespace dynogram

#endif  // DYNOGRAM_HOST_H_
