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

#ifndef DYNOGRAM_BUNDLE_H_
#define DYNOGRAM_BUNDLE_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/driver.h"
#include "dynogram/hcfg.h"
#include "dynogram/host_program.h"
#include "dynogram/weights.h"

namespace dynogram {

inline constexpr uint32_t kGraphVersion = 1;
inline constexpr int kManifestVersion = 1;

// g<id>.bin: "DYCG", version u32, graph id u32, input table, node table
// (op code u16, attribute blob, input value ids), const pool (tag 0 inline
// literal, tag 1 weight key), output table. Value ids number inputs, then
// constants, then kernels.
std::string serialize_graph(const CompiledSubGraph& c);
// Resolves weight keys from `weights` and recomputes the plan. Throws
// kInvalidBundle on any inconsistency.
CompiledSubGraph deserialize_graph(std::string_view bytes, const WeightStore& weights);

struct BundleInfo {
  std::string model;
  std::string variant;  // "dynogram", "dynogram-no-opt" or "trace"
  DecisionKind decision_kind = DecisionKind::kClassifier;
  int64_t eos_token = 0;
  std::vector<Param> inputs;
  int num_outputs = 1;
};

// A deployable program: host program plus the compiled sub-graph of every
// surviving tensor node, keyed by HCFG node id.
struct Bundle {
  BundleInfo info;
  HostProgram host;
  std::map<int, CompiledSubGraph> graphs;
  WeightStore weights;
  std::string manifest;  // manifest.json text
};

// Describes the HCFG (when given), residuals and graphs. Contains nothing
// time- or machine-dependent.
std::string make_manifest(const BundleInfo& info, const Hcfg* h,
                          const std::map<int, HostResidual>& residuals,
                          const std::map<int, CompiledSubGraph>& graphs, const HostProgram& host);

// Relative path -> file contents.
std::map<std::string, std::string> bundle_files(const Bundle& b);
Bundle bundle_from_files(const std::map<std::string, std::string>& files);

void save_bundle(const Bundle& b, const std::string& dir);
Bundle load_bundle(const std::string& dir);

}  // namespace dynogram

#endif  // DYNOGRAM_BUNDLE_H_
