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

#ifndef DYNOGRAM_TENSOR_H_
#define DYNOGRAM_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dynogram {

using Shape = std::vector<int64_t>;

enum class ElementKind : uint8_t { kReal = 0, kInt = 1 };

std::string_view element_kind_name(ElementKind kind);
size_t element_size(ElementKind kind);
int64_t num_elements(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// Static type of a tensor value: extents plus element kind.
struct TensorType {
  Shape shape;
  ElementKind kind = ElementKind::kReal;

  int64_t num_elements() const { return dynogram::num_elements(shape); }
  size_t byte_size() const { return static_cast<size_t>(num_elements()) * element_size(kind); }
  std::string to_string() const;

  friend bool operator==(const TensorType&, const TensorType&) = default;
};

// Non-owning read-only view over row-major tensor storage.
struct TensorView {
  std::span<const int64_t> shape;
  ElementKind kind = ElementKind::kReal;
  const void* data = nullptr;

  int64_t num_elements() const;
  const float* reals() const { return static_cast<const float*>(data); }
  const int64_t* ints() const { return static_cast<const int64_t*>(data); }
};

// Mutable destination view; `data` must hold num_elements(shape) elements.
struct MutableTensorView {
  std::span<const int64_t> shape;
  ElementKind kind = ElementKind::kReal;
  void* data = nullptr;

  float* reals() const { return static_cast<float*>(data); }
  int64_t* ints() const { return static_cast<int64_t*>(data); }
};

// Dense immutable tensor. Copies share storage.
class Tensor {
 public:
  // Rank-0 real zero.
  Tensor();

  static Tensor real(Shape shape, std::vector<float> values);
  static Tensor integer(Shape shape, std::vector<int64_t> values);
  static Tensor zeros(const TensorType& type);
  static Tensor real_scalar(float value) { return real({}, {value}); }
  static Tensor int_scalar(int64_t value) { return integer({}, {value}); }

  const Shape& shape() const { return shape_; }
  ElementKind kind() const { return kind_; }
  TensorType type() const { return {shape_, kind_}; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t num_elements() const { return dynogram::num_elements(shape_); }
  size_t byte_size() const { return type().byte_size(); }

  // Empty span when the kind does not match.
  std::span<const float> reals() const;
  std::span<const int64_t> ints() const;

  // Element i widened to double (integers are exact up to 2^53).
  double element_as_double(int64_t index) const;

  TensorView view() const;

  // Bitwise equality: same kind, shape and element bit patterns.
  friend bool operator==(const Tensor& a, const Tensor& b);

  std::string debug_string(size_t max_elements = 16) const;

 private:
  Shape shape_;
  ElementKind kind_ = ElementKind::kReal;
  std::shared_ptr<const std::vector<float>> reals_;
  std::shared_ptr<const std::vector<int64_t>> ints_;
};

enum class OpKind : uint16_t {
  kConst = 0,
  kIdentity,
  kAdd,
  kSub,
  kMul,
  kMatmul,
  kDense,
  kRelu,
  kSigmoid,
  kSoftmax,
  kConcat,
  kSlice,
  kReshape,
  kReduceMax,
  kReduceSum,
  kArgmax,
  kEmbed,
};

inline constexpr int kNumOpKinds = static_cast<int>(OpKind::kEmbed) + 1;

std::string_view op_name(OpKind op);
std::optional<OpKind> op_from_name(std::string_view name);
// const and identity move data without computing.
bool is_computation_free(OpKind op);

// Static per-operator attributes. Only the fields an op uses are meaningful.
struct OpAttrs {
  int64_t axis = 0;              // concat
  std::vector<int64_t> begin;    // slice
  std::vector<int64_t> end;      // slice
  std::vector<int64_t> shape;    // reshape
  std::optional<Tensor> value;   // const

  friend bool operator==(const OpAttrs&, const OpAttrs&) = default;
};

struct Operator {
  OpKind kind = OpKind::kIdentity;
  OpAttrs attrs;

  friend bool operator==(const Operator&, const Operator&) = default;
};

// Number of inputs the op takes; -1 for variadic (concat, at least one).
int op_arity(OpKind op);

TensorType infer_shape(const Operator& op, std::span<const TensorType> inputs);

// Runs the kernel into `out`, whose type must equal infer_shape's result.
// Inputs and output must not alias.
void run_kernel(const Operator& op, std::span<const TensorView> inputs,
                const MutableTensorView& out);

Tensor apply_kernel(const Operator& op, std::span<const Tensor> inputs);

// Value of a single-element tensor; throws kNotScalar otherwise.
double scalar_read(const Tensor& t);

}  // namespace dynogram

#endif  // DYNOGRAM_TENSOR_H_
