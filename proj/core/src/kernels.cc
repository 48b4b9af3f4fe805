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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "dynogram/error.h"
#include "dynogram/tensor.h"

namespace dynogram {

namespace {

constexpr std::array<std::string_view, kNumOpKinds> kOpNames = {
    "const",   "identity", "add",    "sub",     "mul",        "matmul",
    "dense",   "relu",     "sigmoid", "softmax", "concat",     "slice",
    "reshape", "reduce_max", "reduce_sum", "argmax", "embed",
};

[[noreturn]] void shape_error(OpKind op, const std::string& what) {
  fail(ErrorCode::kShapeMismatch, std::string(op_name(op)) + ": " + what);
}

[[noreturn]] void attr_error(OpKind op, const std::string& what) {
  fail(ErrorCode::kAttributeInvalid, std::string(op_name(op)) + ": " + what);
}

void expect_kind(OpKind op, const TensorType& t, ElementKind kind) {
  if (t.kind != kind) {
    shape_error(op, "expected " + std::string(element_kind_name(kind)) + " input, got " +
                        t.to_string());
  }
}

void expect_rank(OpKind op, const TensorType& t, size_t rank) {
  if (t.shape.size() != rank) {
    shape_error(op, "expected rank " + std::to_string(rank) + ", got " + t.to_string());
  }
}

template <typename T>
const T* data_of(const TensorView& v) {
  return static_cast<const T*>(v.data);
}

template <typename T>
T* data_of(const MutableTensorView& v) {
  return static_cast<T*>(v.data);
}

template <typename T>
void elementwise_binary(OpKind op, const TensorView& a, const TensorView& b,
                        const MutableTensorView& out, int64_t n) {
  const T* x = data_of<T>(a);
  const T* y = data_of<T>(b);
  T* z = data_of<T>(out);
  switch (op) {
    case OpKind::kAdd:
      for (int64_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
      break;
    case OpKind::kSub:
      for (int64_t i = 0; i < n; ++i) z[i] = x[i] - y[i];
      break;
    case OpKind::kMul:
      for (int64_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
      break;
    default:
      break;
  }
}

// Left-to-right accumulation over k; bias (if any) is added after the sum
// so dense(x, W, b) is bitwise add(matmul(x, W), b).
template <typename T>
void matmul_kernel(const TensorView& a, const TensorView& b, const T* bias,
                   const MutableTensorView& out) {
  const int64_t m = a.shape[0];
  const int64_t k = a.shape[1];
  const int64_t n = b.shape[1];
  const T* x = data_of<T>(a);
  const T* w = data_of<T>(b);
  T* z = data_of<T>(out);
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (int64_t p = 0; p < k; ++p) acc += x[i * k + p] * w[p * n + j];
      if (bias != nullptr) acc = acc + bias[i * n + j];
      z[i * n + j] = acc;
    }
  }
}

template <typename T>
void copy_elements(const TensorView& in, const MutableTensorView& out, int64_t n) {
  if (n > 0) std::memcpy(out.data, in.data, static_cast<size_t>(n) * sizeof(T));
}

void copy_any(const TensorView& in, const MutableTensorView& out) {
  const int64_t n = in.num_elements();
  if (in.kind == ElementKind::kReal) {
    copy_elements<float>(in, out, n);
  } else {
    copy_elements<int64_t>(in, out, n);
  }
}

template <typename T>
void concat_kernel(int64_t axis, std::span<const TensorView> inputs,
                   const MutableTensorView& out) {
  const auto& oshape = out.shape;
  int64_t outer = 1;
  for (int64_t d = 0; d < axis; ++d) outer *= oshape[d];
  int64_t inner = 1;
  for (size_t d = static_cast<size_t>(axis) + 1; d < oshape.size(); ++d) inner *= oshape[d];
  T* z = data_of<T>(out);
  const int64_t out_row = oshape[axis] * inner;
  int64_t offset = 0;
  for (const auto& in : inputs) {
    const int64_t chunk = in.shape[axis] * inner;
    const T* x = data_of<T>(in);
    for (int64_t o = 0; o < outer; ++o) {
      for (int64_t c = 0; c < chunk; ++c) z[o * out_row + offset + c] = x[o * chunk + c];
    }
    offset += chunk;
  }
}

template <typename T>
void slice_kernel(const OpAttrs& attrs, const TensorView& in, const MutableTensorView& out) {
  const size_t rank = in.shape.size();
  const int64_t total = num_elements(Shape(out.shape.begin(), out.shape.end()));
  if (total == 0) return;
  std::vector<int64_t> in_strides(rank, 1);
  for (size_t d = rank; d-- > 1;) in_strides[d - 1] = in_strides[d] * in.shape[d];
  std::vector<int64_t> index(rank, 0);
  const T* x = data_of<T>(in);
  T* z = data_of<T>(out);
  for (int64_t flat = 0; flat < total; ++flat) {
    int64_t src = 0;
    for (size_t d = 0; d < rank; ++d) src += (attrs.begin[d] + index[d]) * in_strides[d];
    z[flat] = x[src];
    for (size_t d = rank; d-- > 0;) {
      if (++index[d] < out.shape[d]) break;
      index[d] = 0;
    }
  }
}

}  // namespace

std::string_view op_name(OpKind op) { return kOpNames[static_cast<size_t>(op)]; }

std::optional<OpKind> op_from_name(std::string_view name) {
  for (size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == name) return static_cast<OpKind>(i);
  }
  return std::nullopt;
}

bool is_computation_free(OpKind op) { return op == OpKind::kConst || op == OpKind::kIdentity; }

int op_arity(OpKind op) {
  switch (op) {
    case OpKind::kConst:
      return 0;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kMatmul:
    case OpKind::kEmbed:
      return 2;
    case OpKind::kDense:
      return 3;
    case OpKind::kConcat:
      return -1;
    default:
      return 1;
  }
}

TensorType infer_shape(const Operator& op, std::span<const TensorType> in) {
  const OpKind k = op.kind;
  const int arity = op_arity(k);
  if (arity >= 0 && static_cast<int>(in.size()) != arity) {
    shape_error(k, "expected " + std::to_string(arity) + " inputs, got " +
                       std::to_string(in.size()));
  }
  switch (k) {
    case OpKind::kConst:
      if (!op.attrs.value) attr_error(k, "missing literal value");
      return op.attrs.value->type();
    case OpKind::kIdentity:
    case OpKind::kRelu:
      return in[0];
    case OpKind::kSigmoid:
      expect_kind(k, in[0], ElementKind::kReal);
      return in[0];
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
      if (in[0] != in[1]) {
        shape_error(k, "operands must have identical types, got " + in[0].to_string() +
                           " and " + in[1].to_string());
      }
      return in[0];
    case OpKind::kMatmul:
    case OpKind::kDense: {
      expect_rank(k, in[0], 2);
      expect_rank(k, in[1], 2);
      if (in[0].kind != in[1].kind) shape_error(k, "operand kinds differ");
      if (in[0].shape[1] != in[1].shape[0]) {
        shape_error(k, "inner dimensions differ: " + in[0].to_string() + " x " +
                           in[1].to_string());
      }
      TensorType out{{in[0].shape[0], in[1].shape[1]}, in[0].kind};
      if (k == OpKind::kDense && in[2] != out) {
        shape_error(k, "bias must be " + out.to_string() + ", got " + in[2].to_string());
      }
      return out;
    }
    case OpKind::kSoftmax:
      expect_kind(k, in[0], ElementKind::kReal);
      if (in[0].shape.empty()) shape_error(k, "requires rank >= 1");
      return in[0];
    case OpKind::kConcat: {
      if (in.empty()) shape_error(k, "requires at least one input");
      const auto rank = static_cast<int64_t>(in[0].shape.size());
      if (rank == 0) shape_error(k, "cannot concatenate rank-0 tensors");
      if (op.attrs.axis < 0 || op.attrs.axis >= rank) {
        attr_error(k, "axis " + std::to_string(op.attrs.axis) + " out of range for rank " +
                          std::to_string(rank));
      }
      TensorType out = in[0];
      for (size_t i = 1; i < in.size(); ++i) {
        if (in[i].kind != in[0].kind || static_cast<int64_t>(in[i].shape.size()) != rank) {
          shape_error(k, "operand " + std::to_string(i) + " has type " + in[i].to_string());
        }
        for (int64_t d = 0; d < rank; ++d) {
          if (d == op.attrs.axis) continue;
          if (in[i].shape[d] != in[0].shape[d]) {
            shape_error(k, "non-axis extents differ: " + in[0].to_string() + " vs " +
                               in[i].to_string());
          }
        }
        out.shape[op.attrs.axis] += in[i].shape[op.attrs.axis];
      }
      return out;
    }
    case OpKind::kSlice: {
      const size_t rank = in[0].shape.size();
      if (op.attrs.begin.size() != rank || op.attrs.end.size() != rank) {
        attr_error(k, "begin/end must have one entry per axis (rank " + std::to_string(rank) +
                          ")");
      }
      TensorType out{Shape(rank), in[0].kind};
      for (size_t d = 0; d < rank; ++d) {
        const int64_t b = op.attrs.begin[d];
        const int64_t e = op.attrs.end[d];
        if (b < 0 || b > e || e > in[0].shape[d]) {
          attr_error(k, "bounds [" + std::to_string(b) + ", " + std::to_string(e) +
                            ") out of range on axis " + std::to_string(d) + " of " +
                            in[0].to_string());
        }
        out.shape[d] = e - b;
      }
      return out;
    }
    case OpKind::kReshape: {
      for (int64_t d : op.attrs.shape) {
        if (d < 0) attr_error(k, "negative target extent");
      }
      if (num_elements(op.attrs.shape) != in[0].num_elements()) {
        shape_error(k, "cannot reshape " + in[0].to_string() + " to " +
                           shape_to_string(op.attrs.shape));
      }
      return {op.attrs.shape, in[0].kind};
    }
    case OpKind::kReduceMax:
      if (in[0].num_elements() == 0) shape_error(k, "empty reduction");
      return {{}, in[0].kind};
    case OpKind::kReduceSum:
      return {{}, in[0].kind};
    case OpKind::kArgmax: {
      const auto& s = in[0].shape;
      if (s.size() != 1 && s.size() != 2) shape_error(k, "requires rank 1 or 2");
      if (s.back() == 0) shape_error(k, "empty last axis");
      if (s.size() == 1) return {{}, ElementKind::kInt};
      return {{s[0]}, ElementKind::kInt};
    }
    case OpKind::kEmbed: {
      expect_rank(k, in[0], 2);
      expect_kind(k, in[1], ElementKind::kInt);
      if (in[1].shape.size() > 1) shape_error(k, "index must be rank 0 or 1");
      if (in[1].shape.empty()) return {{in[0].shape[1]}, in[0].kind};
      return {{in[1].shape[0], in[0].shape[1]}, in[0].kind};
    }
  }
  shape_error(k, "unknown operator");
}

void run_kernel(const Operator& op, std::span<const TensorView> in,
                const MutableTensorView& out) {
  const OpKind k = op.kind;
  const int64_t n = num_elements(Shape(out.shape.begin(), out.shape.end()));
  const bool real = out.kind == ElementKind::kReal;
  switch (k) {
    case OpKind::kConst:
      copy_any(op.attrs.value->view(), out);
      return;
    case OpKind::kIdentity:
    case OpKind::kReshape:
      copy_any(in[0], out);
      return;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
      if (real) {
        elementwise_binary<float>(k, in[0], in[1], out, n);
      } else {
        elementwise_binary<int64_t>(k, in[0], in[1], out, n);
      }
      return;
    case OpKind::kMatmul:
    case OpKind::kDense:
      if (real) {
        matmul_kernel<float>(in[0], in[1], k == OpKind::kDense ? in[2].reals() : nullptr, out);
      } else {
        matmul_kernel<int64_t>(in[0], in[1], k == OpKind::kDense ? in[2].ints() : nullptr,
                               out);
      }
      return;
    case OpKind::kRelu:
      if (real) {
        const float* x = in[0].reals();
        float* z = out.reals();
        for (int64_t i = 0; i < n; ++i) z[i] = x[i] > 0.0f ? x[i] : 0.0f;
      } else {
        const int64_t* x = in[0].ints();
        int64_t* z = out.ints();
        for (int64_t i = 0; i < n; ++i) z[i] = x[i] > 0 ? x[i] : 0;
      }
      return;
    case OpKind::kSigmoid: {
      const float* x = in[0].reals();
      float* z = out.reals();
      for (int64_t i = 0; i < n; ++i) z[i] = 1.0f / (1.0f + std::exp(-x[i]));
      return;
    }
    case OpKind::kSoftmax: {
      const int64_t cols = out.shape.back();
      if (cols == 0) return;
      const int64_t rows = n / cols;
      const float* x = in[0].reals();
      float* z = out.reals();
      for (int64_t r = 0; r < rows; ++r) {
        const float* row = x + r * cols;
        float* dst = z + r * cols;
        float m = row[0];
        for (int64_t c = 1; c < cols; ++c) m = std::max(m, row[c]);
        float sum = 0.0f;
        for (int64_t c = 0; c < cols; ++c) {
          dst[c] = std::exp(row[c] - m);
          sum += dst[c];
        }
        for (int64_t c = 0; c < cols; ++c) dst[c] = dst[c] / sum;
      }
      return;
    }
    case OpKind::kConcat:
      if (real) {
        concat_kernel<float>(op.attrs.axis, in, out);
      } else {
        concat_kernel<int64_t>(op.attrs.axis, in, out);
      }
      return;
    case OpKind::kSlice:
      if (real) {
        slice_kernel<float>(op.attrs, in[0], out);
      } else {
        slice_kernel<int64_t>(op.attrs, in[0], out);
      }
      return;
    case OpKind::kReduceMax: {
      const int64_t m = in[0].num_elements();
      if (real) {
        const float* x = in[0].reals();
        float best = x[0];
        for (int64_t i = 1; i < m; ++i) best = std::max(best, x[i]);
        out.reals()[0] = best;
      } else {
        const int64_t* x = in[0].ints();
        int64_t best = x[0];
        for (int64_t i = 1; i < m; ++i) best = std::max(best, x[i]);
        out.ints()[0] = best;
      }
      return;
    }
    case OpKind::kReduceSum: {
      const int64_t m = in[0].num_elements();
      if (real) {
        const float* x = in[0].reals();
        float acc = 0.0f;
        for (int64_t i = 0; i < m; ++i) acc += x[i];
        out.reals()[0] = acc;
      } else {
        const int64_t* x = in[0].ints();
        int64_t acc = 0;
        for (int64_t i = 0; i < m; ++i) acc += x[i];
        out.ints()[0] = acc;
      }
      return;
    }
    case OpKind::kArgmax: {
      const int64_t cols = in[0].shape.back();
      const int64_t rows = in[0].num_elements() / cols;
      int64_t* z = out.ints();
      for (int64_t r = 0; r < rows; ++r) {
        int64_t best = 0;
        if (in[0].kind == ElementKind::kReal) {
          const float* row = in[0].reals() + r * cols;
          for (int64_t c = 1; c < cols; ++c) {
            if (row[c] > row[best]) best = c;
          }
        } else {
          const int64_t* row = in[0].ints() + r * cols;
          for (int64_t c = 1; c < cols; ++c) {
            if (row[c] > row[best]) best = c;
          }
        }
        z[r] = best;
      }
      return;
    }
    case OpKind::kEmbed: {
      const int64_t vocab = in[0].shape[0];
      const int64_t dim = in[0].shape[1];
      const int64_t count = in[1].num_elements();
      for (int64_t i = 0; i < count; ++i) {
        const int64_t idx = in[1].ints()[i];
        if (idx < 0 || idx >= vocab) {
          attr_error(k, "index " + std::to_string(idx) + " outside table of " +
                            std::to_string(vocab) + " rows");
        }
        const size_t bytes = static_cast<size_t>(dim) * element_size(in[0].kind);
        const auto* src = static_cast<const char*>(in[0].data) + idx * static_cast<int64_t>(bytes);
        auto* dst = static_cast<char*>(out.data) + i * static_cast<int64_t>(bytes);
        if (bytes > 0) std::memcpy(dst, src, bytes);
      }
      return;
    }
  }
}

Tensor apply_kernel(const Operator& op, std::span<const Tensor> inputs) {
  std::vector<TensorType> types;
  std::vector<TensorView> views;
  types.reserve(inputs.size());
  views.reserve(inputs.size());
  for (const auto& t : inputs) {
    types.push_back(t.type());
    views.push_back(t.view());
  }
  const TensorType out_type = infer_shape(op, types);
  const auto n = static_cast<size_t>(out_type.num_elements());
  MutableTensorView out;
  out.shape = out_type.shape;
  out.kind = out_type.kind;
  if (out_type.kind == ElementKind::kReal) {
    std::vector<float> data(n);
    out.data = data.data();
    run_kernel(op, views, out);
    return Tensor::real(out_type.shape, std::move(data));
  }
  std::vector<int64_t> data(n);
  out.data = data.data();
  run_kernel(op, views, out);
  return Tensor::integer(out_type.shape, std::move(data));
}

}  // namespace dynogram
