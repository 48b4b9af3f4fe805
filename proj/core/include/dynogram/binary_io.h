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

#ifndef DYNOGRAM_BINARY_IO_H_
#define DYNOGRAM_BINARY_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "dynogram/tensor.h"

namespace dynogram {

// Little-endian byte sink used by every on-disk format.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(uint16_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
  void f32(float v);
  void f64(double v);
  void bytes(std::string_view s) { buf_.append(s); }
  // u16 length prefix + UTF-8 bytes.
  void str16(std::string_view s);
  // kind u8, rank u8, extents u32 each, raw little-endian elements.
  void tensor_body(const Tensor& t);

  const std::string& data() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

// Bounds-checked little-endian reader; every failure throws kInvalidBundle
// tagged with `context`.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string context)
      : data_(data), context_(std::move(context)) {}

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  int64_t i64() { return static_cast<int64_t>(u64()); }
  float f32();
  double f64();
  std::string_view bytes(size_t n);
  std::string str16();
  Tensor tensor_body();

  // Reads and checks a 4-byte magic and u32 version.
  void expect_header(std::string_view magic, uint32_t version);

  size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }
  [[noreturn]] void corrupt(const std::string& what) const;

 private:
  void need(size_t n);

  std::string_view data_;
  size_t pos_ = 0;
  std::string context_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace dynogram

#endif  // DYNOGRAM_BINARY_IO_H_
