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

#include "dynogram/random.h"

#include <cmath>
#include <random>
#include <set>

#include "dynogram/error.h"

namespace dynogram {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent of the standard library's distribution implementations so
// streams are identical across toolchains.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void collect_keys(const std::vector<Stmt>& body, std::set<std::string>& out) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::kTensorAssign) {
      for (const auto& o : s.expr.operands) {
        if (o.kind == Operand::Kind::kWeight) out.insert(o.weight.key());
      }
    }
    collect_keys(s.then_body, out);
    collect_keys(s.else_body, out);
    collect_keys(s.body, out);
  }
}

}  // namespace

uint64_t mix_seed(uint64_t seed, uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

Tensor uniform_tensor(const TensorType& type, uint64_t stream_seed, double lo, double hi) {
  std::mt19937_64 rng(stream_seed);
  const int64_t n = type.num_elements();
  if (type.kind == ElementKind::kReal) {
    std::vector<float> v(static_cast<size_t>(n));
    for (auto& x : v) x = static_cast<float>(lo + (hi - lo) * unit_draw(rng));
    return Tensor::real(type.shape, std::move(v));
  }
  const auto ilo = static_cast<int64_t>(std::floor(lo));
  const auto span = std::max<int64_t>(1, static_cast<int64_t>(std::floor(hi)) - ilo);
  std::vector<int64_t> v(static_cast<size_t>(n));
  for (auto& x : v) x = ilo + static_cast<int64_t>(rng() % static_cast<uint64_t>(span));
  return Tensor::integer(type.shape, std::move(v));
}

std::vector<Tensor> random_inputs(const std::vector<Param>& params, uint64_t seed,
                                  uint64_t index) {
  std::vector<Tensor> out;
  for (size_t k = 0; k < params.size(); ++k) {
    out.push_back(uniform_tensor(params[k].type, mix_seed(mix_seed(seed, index), k), -1.0, 1.0));
  }
  return out;
}

std::vector<std::string> weight_keys(const RewrittenProgram& p) {
  std::set<std::string> keys;
  collect_keys(p.ast.body, keys);
  return {keys.begin(), keys.end()};
}

WeightStore init_weights(const ProgramAst& ast, const RewrittenProgram& rewritten,
                         uint64_t seed) {
  WeightStore store;
  for (const auto& key : weight_keys(rewritten)) {
    const WeightDecl* decl = nullptr;
    for (const auto& d : ast.weights) {
      if (d.matches(key)) {
        decl = &d;
        break;
      }
    }
    if (!decl) fail(ErrorCode::kUnknownWeightKey, "no weight declaration matches '" + key + "'");
    store.set(key, uniform_tensor(decl->type, fnv1a(key) ^ splitmix64(seed), -decl->scale,
                                  decl->scale));
  }
  return store;
}

}  // namespace dynogram
