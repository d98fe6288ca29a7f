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

#ifndef PIPEINT_LAYERLP_HPP_
#define PIPEINT_LAYERLP_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pipeint/cost.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/matrix.hpp"
#include "pipeint/simplex.hpp"

namespace pipeint {

struct LayerStepResult {
  Matrix matrix;
  double objective = 0.0;
  LpStatus lp_status = LpStatus::kOptimal;
  double cost = 0.0;
  std::vector<double> reward_row;  // r_out^T * matrix
};

// kAuto uses the exact greedy for the L1 welfare step and the simplex
// everywhere else; kLp always uses the simplex.
enum class StepMethod { kAuto, kLp };

namespace detail {

inline void check_step_inputs(std::span<const double> r_out,
                              std::size_t in_dim, const Matrix& m0,
                              const Mask& mask, double budget,
                              const LayerCost& lc) {
  if (r_out.size() != m0.rows())
    throw InputError("layer step: r_out length does not match target layer");
  if (in_dim != m0.cols())
    throw InputError("layer step: input distribution does not match source layer");
  if (mask.rows() != m0.rows() || mask.cols() != m0.cols())
    throw InputError("layer step: mask shape mismatch");
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw InputError("layer step: budget must be non-negative");
  if (lc.kind == CostKind::kWeightedL1) {
    if (lc.weights == nullptr || !lc.weights->same_shape(m0))
      throw InputError("layer step: weight matrix shape mismatch");
  }
}

// Clamp, rescale malleable mass to its initial per-column total, then pull
// toward m0 if the cost overshoots. Frozen entries are copied from m0.
inline Matrix repair_step_matrix(Matrix m, const Matrix& m0, const Mask& mask,
                                 double budget, const LayerCost& lc) {
  for (std::size_t u = 0; u < m0.cols(); ++u) {
    double target = 0.0;
    double have = 0.0;
    for (std::size_t v = 0; v < m0.rows(); ++v) {
      if (!mask(v, u)) {
        m(v, u) = m0(v, u);
        continue;
      }
      if (m(v, u) < 0.0) m(v, u) = 0.0;
      target += m0(v, u);
      have += m(v, u);
    }
    if (have > 0.0 && have != target) {
      const double f = target / have;
      for (std::size_t v = 0; v < m0.rows(); ++v)
        if (mask(v, u)) m(v, u) *= f;
    } else if (!(have > 0.0)) {
      for (std::size_t v = 0; v < m0.rows(); ++v)
        if (mask(v, u)) m(v, u) = m0(v, u);
    }
    // Rescaling can push a near-1 entry an ulp above 1.
    for (std::size_t v = 0; v < m0.rows(); ++v)
      if (mask(v, u) && m(v, u) > 1.0) m(v, u) = 1.0;
  }
  const double c = cost_model_evaluate(lc, m, m0);
  if (c > budget) {
    const double f = c > 0.0 ? budget / c : 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double d0 = m0.data()[i];
      m.data()[i] = d0 + f * (m.data()[i] - d0);
    }
  }
  return m;
}

inline LayerStepResult finish_step(Matrix m, std::span<const double> r_out,
                                   const Matrix& m0, const LayerCost& lc) {
  LayerStepResult res;
  res.reward_row = vec_mat(r_out, m);
  res.cost = cost_model_evaluate(lc, m, m0);
  res.matrix = std::move(m);
  return res;
}

struct StepLpLayout {
  std::vector<std::pair<std::size_t, std::size_t>> entries;  // (v, u)
  std::size_t x0 = 0;  // x_e at x0 + e, a_e at x0 + E + e
};

// Shared feasibility block: column equalities, |x - m0| <= a, sum c a <= B.
inline StepLpLayout add_feasibility(LinearProgram& lp, std::size_t x0,
                                    const Matrix& m0, const Mask& mask,
                                    double budget, const LayerCost& lc) {
  StepLpLayout lay;
  lay.x0 = x0;
  for (std::size_t u = 0; u < m0.cols(); ++u)
    for (std::size_t v = 0; v < m0.rows(); ++v)
      if (mask(v, u)) lay.entries.emplace_back(v, u);
  const std::size_t E = lay.entries.size();
  lp.num_vars = x0 + 2 * E;
  lp.objective.resize(lp.num_vars, 0.0);

  std::size_t e = 0;
  for (std::size_t u = 0; u < m0.cols(); ++u) {
    std::vector<std::pair<std::size_t, double>> row;
    double target = 0.0;
    while (e < E && lay.entries[e].second == u) {
      row.emplace_back(x0 + e, 1.0);
      target += m0(lay.entries[e].first, u);
      ++e;
    }
    if (!row.empty()) lp.add_row(std::move(row), Sense::kEq, target);
  }
  std::vector<std::pair<std::size_t, double>> budget_row;
  for (e = 0; e < E; ++e) {
    const auto [v, u] = lay.entries[e];
    const std::size_t xi = x0 + e;
    const std::size_t ai = x0 + E + e;
    lp.add_row({{xi, 1.0}, {ai, -1.0}}, Sense::kLe, m0(v, u));
    lp.add_row({{xi, -1.0}, {ai, -1.0}}, Sense::kLe, -m0(v, u));
    budget_row.emplace_back(ai, lc.weight(v, u));
  }
  if (E > 0) lp.add_row(std::move(budget_row), Sense::kLe, budget);
  return lay;
}

inline Matrix matrix_from_lp(const LpSolution& sol, const StepLpLayout& lay,
                             const Matrix& m0) {
  Matrix m = m0;
  for (std::size_t e = 0; e < lay.entries.size(); ++e) {
    const auto [v, u] = lay.entries[e];
    m(v, u) = sol.x[lay.x0 + e];
  }
  return m;
}

// Exact L1 welfare step. Moving mass inside a column from row v to the
// best malleable row v* costs 2 per unit and gains d(u) (r(v*) - r(v)), so
// the problem is a fractional knapsack over (column, source row) items.
inline Matrix greedy_l1_welfare(std::span<const double> r_out,
                                std::span<const double> d_in, const Matrix& m0,
                                const Mask& mask, double budget) {
  struct Item {
    double gain;
    std::size_t u, v, target;
  };
  std::vector<Item> items;
  for (std::size_t u = 0; u < m0.cols(); ++u) {
    std::size_t best = m0.rows();
    for (std::size_t v = 0; v < m0.rows(); ++v)
      if (mask(v, u) && (best == m0.rows() || r_out[v] > r_out[best])) best = v;
    if (best == m0.rows()) continue;
    for (std::size_t v = 0; v < m0.rows(); ++v) {
      if (v == best || !mask(v, u) || !(m0(v, u) > 0.0)) continue;
      const double g = d_in[u] * (r_out[best] - r_out[v]);
      if (g > 0.0) items.push_back({g, u, v, best});
    }
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.gain > b.gain; });
  Matrix m = m0;
  double left = budget;
  for (const auto& it : items) {
    if (!(left > 0.0)) break;
    const double mass = std::min(m0(it.v, it.u), left / 2.0);
    m(it.v, it.u) -= mass;
    m(it.target, it.u) += mass;
    left -= 2.0 * mass;
  }
  return m;
}

}  // namespace detail

// max r_out^T M d_in over feasible M for this layer.
inline LayerStepResult solve_welfare_step(std::span<const double> r_out,
                                          std::span<const double> d_in,
                                          const Matrix& m0, const Mask& mask,
                                          double budget,
                                          const LayerCost& lc = {},
                                          StepMethod method = StepMethod::kAuto) {
  detail::check_step_inputs(r_out, d_in.size(), m0, mask, budget, lc);
  Matrix m;
  if (budget == 0.0) {
    m = m0;
  } else if (method == StepMethod::kAuto && lc.kind == CostKind::kL1) {
    m = detail::greedy_l1_welfare(r_out, d_in, m0, mask, budget);
  } else {
    LinearProgram lp;
    const auto lay = detail::add_feasibility(lp, 0, m0, mask, budget, lc);
    for (std::size_t e = 0; e < lay.entries.size(); ++e) {
      const auto [v, u] = lay.entries[e];
      lp.objective[e] = r_out[v] * d_in[u];
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal)
      throw SolverError(std::string("welfare step LP: ") + to_string(sol.status));
    m = detail::matrix_from_lp(sol, lay, m0);
  }
  m = detail::repair_step_matrix(std::move(m), m0, mask, budget, lc);
  auto res = detail::finish_step(std::move(m), r_out, m0, lc);
  res.objective = dot(res.reward_row, d_in);
  return res;
}

// max_M min_j r_out^T M a_in^j; column j of a_in is population j's
// distribution over the source layer.
inline LayerStepResult solve_maximin_step(std::span<const double> r_out,
                                          const Matrix& a_in, const Matrix& m0,
                                          const Mask& mask, double budget,
                                          const LayerCost& lc = {}) {
  detail::check_step_inputs(r_out, a_in.rows(), m0, mask, budget, lc);
  if (a_in.cols() == 0) throw InputError("maximin step: no populations");
  Matrix m;
  if (budget == 0.0) {
    m = m0;
  } else {
    LinearProgram lp(1);
    lp.objective[0] = 1.0;  // epigraph variable v
    const auto lay = detail::add_feasibility(lp, 1, m0, mask, budget, lc);
    for (std::size_t j = 0; j < a_in.cols(); ++j) {
      std::vector<std::pair<std::size_t, double>> row{{0, 1.0}};
      double fixed = 0.0;
      for (std::size_t u = 0; u < m0.cols(); ++u)
        for (std::size_t v = 0; v < m0.rows(); ++v)
          if (!mask(v, u)) fixed += r_out[v] * m0(v, u) * a_in(u, j);
      for (std::size_t e = 0; e < lay.entries.size(); ++e) {
        const auto [v, u] = lay.entries[e];
        const double c = r_out[v] * a_in(u, j);
        if (c != 0.0) row.emplace_back(1 + e, -c);
      }
      lp.add_row(std::move(row), Sense::kLe, fixed);
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal)
      throw SolverError(std::string("maximin step LP: ") + to_string(sol.status));
    m = detail::matrix_from_lp(sol, lay, m0);
  }
  m = detail::repair_step_matrix(std::move(m), m0, mask, budget, lc);
  auto res = detail::finish_step(std::move(m), r_out, m0, lc);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < a_in.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t u = 0; u < a_in.rows(); ++u) acc += res.reward_row[u] * a_in(u, j);
    lo = std::min(lo, acc);
  }
  res.objective = lo;
  return res;
}

}  // namespace pipeint

#endif  // PIPEINT_LAYERLP_HPP_
