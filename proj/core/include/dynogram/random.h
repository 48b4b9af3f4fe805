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

#ifndef DYNOGRAM_RANDOM_H_
#define DYNOGRAM_RANDOM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dynogram/ast.h"
#include "dynogram/rewriter.h"
#include "dynogram/tensor.h"
#include "dynogram/weights.h"

namespace dynogram {

// Deterministic 64-bit mixing of a seed with a stream index.
uint64_t mix_seed(uint64_t seed, uint64_t index);

// Tensor with i.i.d. uniform elements in [lo, hi) drawn from a
// mt19937_64 stream. Real elements use the top 53 bits of each draw;
// int elements take values in {floor(lo) .. floor(hi) - 1}.
Tensor uniform_tensor(const TensorType& type, uint64_t stream_seed, double lo, double hi);

// The index-th input for a model under `seed`: one tensor per parameter,
// uniform in [-1, 1).
std::vector<Tensor> random_inputs(const std::vector<Param>& params, uint64_t seed,
                                  uint64_t index);

// Concrete weight keys referenced by a rewritten program, sorted.
std::vector<std::string> weight_keys(const RewrittenProgram& p);

// Draws every referenced weight from its declaration: uniform in
// [-scale, scale) seeded by the key and `seed`. Throws kUnknownWeightKey
// for a key no declaration matches.
WeightStore init_weights(const ProgramAst& ast, const RewrittenProgram& rewritten, uint64_t seed);

}  // namespace dynogram

#endif  // DYNOGRAM_RANDOM_H_
