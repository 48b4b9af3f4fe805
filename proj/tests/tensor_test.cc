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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dynogram/error.h"
#include "dynogram/random.h"
#include "dynogram/tensor.h"

namespace dynogram {
namespace {

Tensor apply(OpKind k, std::vector<Tensor> in, OpAttrs attrs = {}) {
  return apply_kernel(Operator{k, std::move(attrs)}, in);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Kernels, MatmulShape) {
  const Tensor a = Tensor::real({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = Tensor::real({3, 4}, std::vector<float>(12, 1.0f));
  const Tensor c = apply(OpKind::kMatmul, {a, b});
  EXPECT_EQ(c.shape(), (Shape{2, 4}));
  EXPECT_FLOAT_EQ(c.reals()[0], 6.0f);
  EXPECT_FLOAT_EQ(c.reals()[7], 15.0f);
}

TEST(Kernels, ArgmaxLowestIndexWins) {
  const Tensor t = apply(OpKind::kArgmax, {Tensor::real({3}, {0.1f, 0.7f, 0.2f})});
  EXPECT_EQ(t.kind(), ElementKind::kInt);
  EXPECT_EQ(t.rank(), 0);
  EXPECT_EQ(t.ints()[0], 1);
  const Tensor tie = apply(OpKind::kArgmax, {Tensor::real({2, 3}, {1, 5, 5, 2, 2, 2})});
  EXPECT_EQ(tie.shape(), (Shape{2}));
  EXPECT_EQ(tie.ints()[0], 1);
  EXPECT_EQ(tie.ints()[1], 0);
}

TEST(Kernels, IdentityKeepsElements) {
  const Tensor t = Tensor::real({2, 2}, {1.5f, -2.0f, 0.0f, 3.25f});
  EXPECT_EQ(apply(OpKind::kIdentity, {t}), t);
}

TEST(Kernels, SoftmaxOfZerosIsUniform) {
  const Tensor t = apply(OpKind::kSoftmax, {Tensor::real({3}, {0, 0, 0})});
  for (float v : t.reals()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-7);
}

TEST(Kernels, DenseIsMatmulPlusBias) {
  const Tensor x = Tensor::real({1, 2}, {1, 2});
  const Tensor w = Tensor::real({2, 2}, {1, 0, 0, 1});
  const Tensor b = Tensor::real({1, 2}, {0.5f, -0.5f});
  EXPECT_EQ(apply(OpKind::kDense, {x, w, b}),
            apply(OpKind::kAdd, {apply(OpKind::kMatmul, {x, w}), b}));
}

TEST(Kernels, NoBroadcasting) {
  EXPECT_EQ(code_of([] {
              apply(OpKind::kAdd, {Tensor::real({1, 2}, {1, 2}), Tensor::real({2}, {1, 2})});
            }),
            ErrorCode::kShapeMismatch);
}

TEST(Kernels, SliceOutOfBounds) {
  OpAttrs a;
  a.begin = {0};
  a.end = {4};
  EXPECT_EQ(code_of([&] { apply(OpKind::kSlice, {Tensor::real({3}, {1, 2, 3})}, a); }),
            ErrorCode::kAttributeInvalid);
}

TEST(Kernels, EmptySliceAndConcat) {
  const Tensor seq = Tensor::real({2, 2}, {1, 2, 3, 4});
  OpAttrs s;
  s.begin = {0, 0};
  s.end = {0, 2};
  const Tensor empty = apply(OpKind::kSlice, {seq}, s);
  EXPECT_EQ(empty.shape(), (Shape{0, 2}));
  OpAttrs c;
  c.axis = 0;
  EXPECT_EQ(apply(OpKind::kConcat, {empty, seq}, c), seq);
}

TEST(ShapeRules, Examples) {
  OpAttrs c;
  c.axis = 0;
  const TensorType a{{2, 4}, ElementKind::kReal};
  const TensorType b{{3, 4}, ElementKind::kReal};
  EXPECT_EQ(infer_shape({OpKind::kConcat, c}, std::vector<TensorType>{a, b}).shape,
            (Shape{5, 4}));
  EXPECT_EQ(infer_shape({OpKind::kReduceMax, {}},
                        std::vector<TensorType>{{{5, 7}, ElementKind::kReal}})
                .shape,
            Shape{});
  const TensorType table{{100, 16}, ElementKind::kReal};
  const TensorType index{{}, ElementKind::kInt};
  EXPECT_EQ(infer_shape({OpKind::kEmbed, {}}, std::vector<TensorType>{table, index}).shape,
            (Shape{16}));
}

TEST(ScalarRead, Examples) {
  EXPECT_FLOAT_EQ(scalar_read(Tensor::real_scalar(0.73f)), 0.73f);
  EXPECT_EQ(scalar_read(Tensor::integer({1}, {5})), 5.0);
  EXPECT_EQ(code_of([] { scalar_read(Tensor::real({2}, {1, 2})); }), ErrorCode::kNotScalar);
}

TEST(ComputationFree, ExactlyIdentityAndConst) {
  for (int k = 0; k < kNumOpKinds; ++k) {
    const auto op = static_cast<OpKind>(k);
    EXPECT_EQ(is_computation_free(op), op == OpKind::kIdentity || op == OpKind::kConst)
        << op_name(op);
  }
}

// Random operands for every operator; the shape rule must agree with the
// kernel and the kernel must be deterministic.
std::vector<std::pair<Operator, std::vector<Tensor>>> random_cases(uint64_t seed) {
  auto r = [&](Shape s, uint64_t salt) {
    return uniform_tensor({std::move(s), ElementKind::kReal}, mix_seed(seed, salt), -2, 2);
  };
  std::vector<std::pair<Operator, std::vector<Tensor>>> out;
  const Tensor x = r({3, 4}, 1);
  const Tensor y = r({3, 4}, 2);
  OpAttrs konst;
  konst.value = r({2}, 3);
  out.push_back({{OpKind::kConst, konst}, {}});
  for (OpKind k : {OpKind::kIdentity, OpKind::kRelu, OpKind::kSigmoid, OpKind::kSoftmax,
                   OpKind::kReduceMax, OpKind::kReduceSum, OpKind::kArgmax}) {
    out.push_back({{k, {}}, {x}});
  }
  for (OpKind k : {OpKind::kAdd, OpKind::kSub, OpKind::kMul}) out.push_back({{k, {}}, {x, y}});
  out.push_back({{OpKind::kMatmul, {}}, {x, r({4, 5}, 4)}});
  out.push_back({{OpKind::kDense, {}}, {x, r({4, 5}, 5), r({3, 5}, 6)}});
  OpAttrs cat;
  cat.axis = 1;
  out.push_back({{OpKind::kConcat, cat}, {x, r({3, 2}, 7), y}});
  OpAttrs sl;
  sl.begin = {1, 0};
  sl.end = {3, 3};
  out.push_back({{OpKind::kSlice, sl}, {x}});
  OpAttrs rs;
  rs.shape = {2, 6};
  out.push_back({{OpKind::kReshape, rs}, {x}});
  const Tensor idx = Tensor::integer({2}, {static_cast<int64_t>(seed % 3), 0});
  out.push_back({{OpKind::kEmbed, {}}, {x, idx}});
  return out;
}

TEST(KernelProperties, ShapeRuleAgreesAndKernelsArePure) {
  int covered = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& [op, in] : random_cases(seed)) {
      std::vector<TensorType> types;
      for (const auto& t : in) types.push_back(t.type());
      const Tensor a = apply_kernel(op, in);
      EXPECT_EQ(infer_shape(op, types), a.type()) << op_name(op.kind);
      EXPECT_EQ(apply_kernel(op, in), a) << op_name(op.kind);
      for (int64_t i = 0; i < a.num_elements(); ++i) {
        EXPECT_TRUE(std::isfinite(a.element_as_double(i)));
      }
      if (op.kind == OpKind::kSoftmax) {
        for (int row = 0; row < 3; ++row) {
          double sum = 0;
          for (int c = 0; c < 4; ++c) sum += a.reals()[row * 4 + c];
          EXPECT_NEAR(sum, 1.0, 1e-6);
        }
      }
      if (op.kind == OpKind::kRelu) {
        for (float v : a.reals()) EXPECT_GE(v, 0.0f);
      }
      if (op.kind == OpKind::kArgmax) {
        for (int64_t v : a.ints()) EXPECT_TRUE(v >= 0 && v < 4);
      }
      ++covered;
    }
  }
  EXPECT_EQ(covered, 20 * kNumOpKinds);
}

}  // namespace
}  // namespace dynogram
