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

#ifndef DYNOGRAM_TESTS_TEST_SUPPORT_H_
#define DYNOGRAM_TESTS_TEST_SUPPORT_H_

#include <string>
#include <vector>

#include "dynogram/frontend.h"
#include "dynogram/random.h"
#include "dynogram/rewriter.h"
#include "dynogram/weights.h"

namespace dynogram::testing {

inline const std::vector<std::string>& zoo_names() {
  static const std::vector<std::string> names = {"static_net", "skipnet", "early_exit",
                                                 "decoder"};
  return names;
}

inline std::string zoo_path(const std::string& name) {
  return std::string(DYNOGRAM_ZOO_DIR) + "/" + name + ".dtpl";
}

struct ZooModel {
  ProgramAst ast;
  RewrittenProgram rewritten;
  WeightStore weights;
};

inline ZooModel load_zoo(const std::string& name, uint64_t weight_seed = 0) {
  ZooModel m;
  m.ast = load_program(zoo_path(name));
  m.rewritten = rewrite(m.ast);
  m.weights = init_weights(m.ast, m.rewritten, weight_seed);
  return m;
}

inline bool bitwise_equal(const std::vector<Tensor>& a, const std::vector<Tensor>& b) {
  if (a.size() != b.size()) return false;
  for (size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] == b[k])) return false;
  }
  return true;
}

}  // namespace dynogram::testing

#endif  // DYNOGRAM_TESTS_TEST_SUPPORT_H_
