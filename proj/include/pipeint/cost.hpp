// Copyright 2026 The pipeint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIPEINT_COST_HPP_
#define PIPEINT_COST_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pipeint/errors.hpp"
#include "pipeint/matrix.hpp"

namespace pipeint {

enum class CostKind { kL1, kWeightedL1 };

// Cost of a single layer: either plain L1 or entrywise-weighted L1.
struct LayerCost {
  CostKind kind = CostKind::kL1;
  const Matrix* weights = nullptr;  // set iff kind == kWeightedL1

  double weight(std::size_t v, std::size_t u) const {
    return kind == CostKind::kL1 ? 1.0 : (*weights)(v, u);
  }
};

// Plain L1 distance between two equally shaped matrices.
inline double cost(const Matrix& m, const Matrix& m0) {
  require_same_shape(m, m0, "cost");
  return l1_distance(m.data(), m0.data());
}

inline double cost_model_evaluate(const LayerCost& lc, const Matrix& m,
                                  const Matrix& m0) {
  require_same_shape(m, m0, "cost_model_evaluate");
  if (lc.kind == CostKind::kL1) return cost(m, m0);
  if (lc.weights == nullptr) throw InputError("weighted cost without weights");
  require_same_shape(*lc.weights, m, "cost_model_evaluate weights");
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double w = lc.weights->data()[i];
    if (!(w > 0.0)) throw InputError("weighted_l1: non-positive weight");
    acc += w * std::abs(m.data()[i] - m0.data()[i]);
  }
  return acc;
}

// Instance-wide cost model, one weight matrix per transition layer when
// weighted.
struct CostModel {
  CostKind kind = CostKind::kL1;
  std::vector<Matrix> weights;

  LayerCost layer(std::size_t t) const {
    if (kind == CostKind::kL1) return {};
    if (t >= weights.size()) throw InputError("cost model: missing layer weights");
    return {CostKind::kWeightedL1, &weights[t]};
  }

  // Linear-growth constant: 1 for L1, the smallest weight otherwise.
  double lipschitz() const {
    if (kind == CostKind::kL1) return 1.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& w : weights)
      for (double x : w.data()) lo = std::min(lo, x);
    return lo;
  }

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

}  // namespace pipeint

#endif  // PIPEINT_COST_HPP_
