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

#ifndef DYNOGRAM_WEIGHTS_H_
#define DYNOGRAM_WEIGHTS_H_

#include <map>
#include <string>
#include <string_view>

#include "dynogram/tensor.h"

namespace dynogram {

inline constexpr uint32_t kWeightsVersion = 1;

// Named parameter tensors keyed by dotted weight key ("blk.0").
class WeightStore {
 public:
  void set(const std::string& key, Tensor value) { entries_[key] = std::move(value); }
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  const Tensor* find(const std::string& key) const;
  // Throws kUnknownWeightKey.
  const Tensor& at(const std::string& key) const;

  const std::map<std::string, Tensor>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  friend bool operator==(const WeightStore&, const WeightStore&) = default;

 private:
  std::map<std::string, Tensor> entries_;
};

// weights.bin: "DYWT", version u32, entry count u32, then per entry
// key (u16 length + bytes), kind u8, rank u8, extents u32, elements.
// Entries are written in key order.
std::string serialize_weights(const WeightStore& weights);
WeightStore deserialize_weights(std::string_view bytes);

WeightStore load_weights(const std::string& path);
void save_weights(const WeightStore& weights, const std::string& path);

// A tensor file has the layout of a single weights.bin entry.
struct NamedTensor {
  std::string name;
  Tensor value;
};
std::string serialize_tensor_file(const NamedTensor& entry);
NamedTensor deserialize_tensor_file(std::string_view bytes);
NamedTensor load_tensor_file(const std::string& path);
void save_tensor_file(const NamedTensor& entry, const std::string& path);

}  // namespace dynogram

#endif  // DYNOGRAM_WEIGHTS_H_
