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

#include "dynogram/tensor.h"

#include <cstring>
#include <sstream>

#include "dynogram/error.h"

namespace dynogram {

namespace {

constexpr std::string_view kErrorNames[] = {
    "ShapeMismatch",       "AttributeInvalid",     "NotScalar",
    "SyntaxError",         "UndefinedIdentifier",  "DuplicateDefinition",
    "ValidationFailed",    "UnrollBudgetExceeded", "NonConstWeightKey",
    "NonConstScalar",      "NonConstLoopBound",    "DivisionByZero",
    "UnknownWeightKey",    "ShapeJoinMismatch",    "ShapeInferenceError",
    "SignatureMismatch",   "RuntimeShapeMismatch", "InvalidBundle",
    "InputShapeMismatch",  "IoError",              "InvalidArgument",
};

std::string format_message(ErrorCode code, const std::string& message, int line,
                           int column) {
  std::ostringstream os;
  os << error_code_name(code);
  if (line > 0) os << " at " << line << ":" << column;
  os << ": " << message;
  return os.str();
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  return kErrorNames[static_cast<int>(code)];
}

Error::Error(ErrorCode code, const std::string& message, int line, int column)
    : std::runtime_error(format_message(code, message, line, column)),
      code_(code),
      detail_(message),
      line_(line),
      column_(column) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

std::string_view element_kind_name(ElementKind kind) {
  return kind == ElementKind::kReal ? "real" : "int";
}

size_t element_size(ElementKind kind) { return kind == ElementKind::kReal ? 4 : 8; }

int64_t num_elements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::string TensorType::to_string() const {
  return std::string(element_kind_name(kind)) + shape_to_string(shape);
}

int64_t TensorView::num_elements() const {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

Tensor::Tensor() : reals_(std::make_shared<const std::vector<float>>(1, 0.0f)) {}

Tensor Tensor::real(Shape shape, std::vector<float> values) {
  for (int64_t d : shape) {
    if (d < 0) fail(ErrorCode::kShapeMismatch, "negative extent in " + shape_to_string(shape));
  }
  if (static_cast<int64_t>(values.size()) != dynogram::num_elements(shape)) {
    fail(ErrorCode::kShapeMismatch,
         "element count " + std::to_string(values.size()) + " does not match shape " +
             shape_to_string(shape));
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.kind_ = ElementKind::kReal;
  t.reals_ = std::make_shared<const std::vector<float>>(std::move(values));
  return t;
}

Tensor Tensor::integer(Shape shape, std::vector<int64_t> values) {
  for (int64_t d : shape) {
    if (d < 0) fail(ErrorCode::kShapeMismatch, "negative extent in " + shape_to_string(shape));
  }
  if (static_cast<int64_t>(values.size()) != dynogram::num_elements(shape)) {
    fail(ErrorCode::kShapeMismatch,
         "element count " + std::to_string(values.size()) + " does not match shape " +
             shape_to_string(shape));
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.kind_ = ElementKind::kInt;
  t.reals_.reset();
  t.ints_ = std::make_shared<const std::vector<int64_t>>(std::move(values));
  return t;
}

Tensor Tensor::zeros(const TensorType& type) {
  const auto n = static_cast<size_t>(type.num_elements());
  if (type.kind == ElementKind::kReal) return real(type.shape, std::vector<float>(n, 0.0f));
  return integer(type.shape, std::vector<int64_t>(n, 0));
}

std::span<const float> Tensor::reals() const {
  if (kind_ != ElementKind::kReal) return {};
  return {reals_->data(), reals_->size()};
}

std::span<const int64_t> Tensor::ints() const {
  if (kind_ != ElementKind::kInt) return {};
  return {ints_->data(), ints_->size()};
}

double Tensor::element_as_double(int64_t index) const {
  if (kind_ == ElementKind::kReal) return static_cast<double>((*reals_)[index]);
  return static_cast<double>((*ints_)[index]);
}

TensorView Tensor::view() const {
  TensorView v;
  v.shape = shape_;
  v.kind = kind_;
  v.data = kind_ == ElementKind::kReal ? static_cast<const void*>(reals_->data())
                                       : static_cast<const void*>(ints_->data());
  return v;
}

bool operator==(const Tensor& a, const Tensor& b) {
  if (a.kind_ != b.kind_ || a.shape_ != b.shape_) return false;
  if (a.kind_ == ElementKind::kReal) {
    if (a.reals_ == b.reals_) return true;
    return std::memcmp(a.reals_->data(), b.reals_->data(), a.reals_->size() * sizeof(float)) ==
           0;
  }
  return *a.ints_ == *b.ints_;
}

std::string Tensor::debug_string(size_t max_elements) const {
  std::ostringstream os;
  os << element_kind_name(kind_) << shape_to_string(shape_) << " {";
  const auto n = static_cast<size_t>(num_elements());
  for (size_t i = 0; i < n && i < max_elements; ++i) {
    if (i) os << ", ";
    if (kind_ == ElementKind::kReal) {
      os << (*reals_)[i];
    } else {
      os << (*ints_)[i];
    }
  }
  if (n > max_elements) os << ", ...";
  os << "}";
  return os.str();
}

double scalar_read(const Tensor& t) {
  if (t.num_elements() != 1) {
    fail(ErrorCode::kNotScalar,
         "expected a single-element tensor, got " + shape_to_string(t.shape()));
  }
  return t.element_as_double(0);
}

}  // namespace dynogram
