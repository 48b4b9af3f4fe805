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

#include "dynogram/binary_io.h"

#include <bit>
#include <fstream>
#include <sstream>

#include "dynogram/error.h"

namespace dynogram {

void ByteWriter::u16(uint16_t v) {
  u8(static_cast<uint8_t>(v));
  u8(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<uint32_t>(v)); }

void ByteWriter::f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::str16(std::string_view s) {
  if (s.size() > 0xFFFF) fail(ErrorCode::kInvalidArgument, "string too long to encode");
  u16(static_cast<uint16_t>(s.size()));
  bytes(s);
}

void ByteWriter::tensor_body(const Tensor& t) {
  u8(static_cast<uint8_t>(t.kind()));
  if (t.rank() > 255) fail(ErrorCode::kInvalidArgument, "rank too large to encode");
  u8(static_cast<uint8_t>(t.rank()));
  for (int64_t d : t.shape()) u32(static_cast<uint32_t>(d));
  if (t.kind() == ElementKind::kReal) {
    for (float v : t.reals()) f32(v);
  } else {
    for (int64_t v : t.ints()) i64(v);
  }
}

void ByteReader::corrupt(const std::string& what) const {
  fail(ErrorCode::kInvalidBundle, context_ + ": " + what);
}

void ByteReader::need(size_t n) {
  if (remaining() < n) {
    corrupt("truncated at byte " + std::to_string(pos_) + " (needed " + std::to_string(n) +
            " more)");
  }
}

uint8_t ByteReader::u8() {
  need(1);
  return static_cast<uint8_t>(data_[pos_++]);
}

uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = 0;
  for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(static_cast<uint8_t>(data_[pos_++])) << (8 * i);
  return v;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_++])) << (8 * i);
  return v;
}

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(data_[pos_++])) << (8 * i);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string_view ByteReader::bytes(size_t n) {
  need(n);
  auto s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::string ByteReader::str16() {
  const uint16_t n = u16();
  return std::string(bytes(n));
}

Tensor ByteReader::tensor_body() {
  const uint8_t kind = u8();
  if (kind > 1) corrupt("unknown element kind " + std::to_string(kind));
  const uint8_t rank = u8();
  Shape shape(rank);
  uint64_t count = 1;
  for (auto& d : shape) {
    d = u32();
    count *= static_cast<uint64_t>(d);
    if (count > remaining()) corrupt("tensor extents exceed remaining data");
  }
  if (kind == 0) {
    std::vector<float> values(count);
    for (auto& v : values) v = f32();
    return Tensor::real(std::move(shape), std::move(values));
  }
  std::vector<int64_t> values(count);
  for (auto& v : values) v = i64();
  return Tensor::integer(std::move(shape), std::move(values));
}

void ByteReader::expect_header(std::string_view magic, uint32_t version) {
  if (remaining() < magic.size() || bytes(magic.size()) != magic) {
    corrupt("bad magic (expected \"" + std::string(magic) + "\")");
  }
  const uint32_t got = u32();
  if (got != version) {
    corrupt("unsupported version " + std::to_string(got) + " (expected " +
            std::to_string(version) + ")");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCode::kIoError, "short write to " + path);
}

}  // namespace dynogram
