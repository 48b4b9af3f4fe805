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

#include "dynogram/weights.h"

#include "dynogram/binary_io.h"
#include "dynogram/error.h"

namespace dynogram {

namespace {

constexpr std::string_view kWeightsMagic = "DYWT";

void write_entry(ByteWriter& w, const std::string& key, const Tensor& t) {
  w.str16(key);
  w.tensor_body(t);
}

}  // namespace

const Tensor* WeightStore::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const Tensor& WeightStore::at(const std::string& key) const {
  const Tensor* t = find(key);
  if (t == nullptr) fail(ErrorCode::kUnknownWeightKey, "no weight named \"" + key + "\"");
  return *t;
}

std::string serialize_weights(const WeightStore& weights) {
  ByteWriter w;
  w.bytes(kWeightsMagic);
  w.u32(kWeightsVersion);
  w.u32(static_cast<uint32_t>(weights.size()));
  for (const auto& [key, t] : weights.entries()) write_entry(w, key, t);
  return w.take();
}

WeightStore deserialize_weights(std::string_view bytes) {
  ByteReader r(bytes, "weights.bin");
  r.expect_header(kWeightsMagic, kWeightsVersion);
  const uint32_t count = r.u32();
  WeightStore store;
  for (uint32_t i = 0; i < count; ++i) {
    std::string key = r.str16();
    Tensor t = r.tensor_body();
    if (store.contains(key)) r.corrupt("duplicate key \"" + key + "\"");
    store.set(key, std::move(t));
  }
  if (!r.at_end()) r.corrupt("trailing bytes after last entry");
  return store;
}

WeightStore load_weights(const std::string& path) { return deserialize_weights(read_file(path)); }

void save_weights(const WeightStore& weights, const std::string& path) {
  write_file(path, serialize_weights(weights));
}

std::string serialize_tensor_file(const NamedTensor& entry) {
  ByteWriter w;
  write_entry(w, entry.name, entry.value);
  return w.take();
}

NamedTensor deserialize_tensor_file(std::string_view bytes) {
  ByteReader r(bytes, "tensor file");
  NamedTensor entry;
  entry.name = r.str16();
  entry.value = r.tensor_body();
  if (!r.at_end()) r.corrupt("trailing bytes after tensor");
  return entry;
}

NamedTensor load_tensor_file(const std::string& path) {
  return deserialize_tensor_file(read_file(path));
}

void save_tensor_file(const NamedTensor& entry, const std::string& path) {
  write_file(path, serialize_tensor_file(entry));
}

}  // namespace dynogram
