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

#ifndef PIPEINT_DETAIL_DP_ENGINE_HPP_
#define PIPEINT_DETAIL_DP_ENGINE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pipeint/detail/parallel.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/layerlp.hpp"
#include "pipeint/matrix.hpp"
#include "pipeint/model.hpp"
#include "pipeint/netgrid.hpp"

namespace pipeint {

struct DpOptions {
  int threads = 1;
  std::uint64_t cap = kDefaultSizeCap;
  StepMethod method = StepMethod::kAuto;
};

namespace detail {

inline constexpr double kTieTol = 1e-12;

// A distinct reward row R^T M(B_{>=t}, X_t) reachable at node layer t with a
// given remaining budget, plus the choice that produced it.
struct Candidate {
  std::vector<double> rho;
  std::uint64_t rep_cell = 0;
  std::int32_t next_budget = -1;
  std::int32_t next_cand = -1;
};

struct LayerTable {
  std::size_t layer = 0;
  std::uint64_t cells_per_budget = 0;
  std::vector<std::vector<Candidate>> by_budget;
  std::vector<std::int32_t> cell_cand;  // b * cells_per_budget + cell
};

struct DpTables {
  BudgetGrid grid{0.0, 1.0};
  double epsilon = 0.0;
  // Indexed by node layer; entry 0 is unused (the root is solved
  // separately) and the last entry is the reward layer.
  std::vector<LayerTable> layers;
  std::uint64_t cells = 0;
  std::uint64_t step_solves = 0;
};

struct RowKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : k) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::vector<std::int64_t> row_key(std::span<const double> rho) {
  std::vector<std::int64_t> k(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i)
    k[i] = std::llround(rho[i] * 1e12);
  return k;
}

struct Choice {
  double value = -std::numeric_limits<double>::infinity();
  std::int32_t next_budget = -1;
  std::int32_t next_cand = -1;
  LayerStepResult step;
};

// Scans every (B_{>=t+1} <= B_{>=t}, candidate) pair for one cell. Ties go
// to the lowest budget index, then the lowest candidate id.
template <typename Policy>
Choice best_choice(const Policy& pol, const DpTables& tabs, std::size_t t,
                   std::size_t b, const Matrix& input,
                   std::uint64_t& solves) {
  const LayerTable& next = tabs.layers[t + 1];
  Choice best;
  for (std::size_t nb = 0; nb <= b && nb < next.by_budget.size(); ++nb) {
    const double beta = tabs.grid.point(b) - tabs.grid.point(nb);
    const auto& cands = next.by_budget[nb];
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      auto res = pol.step(t, cands[ci].rho, input, beta < 0.0 ? 0.0 : beta);
      ++solves;
      if (res.objective > best.value + kTieTol) {
        best.value = res.objective;
        best.next_budget = static_cast<std::int32_t>(nb);
        best.next_cand = static_cast<std::int32_t>(ci);
        best.step = std::move(res);
      }
    }
  }
  if (best.next_cand < 0) throw SolverError("dp: no candidate for cell");
  return best;
}

// Builds tables for node layers k-1 (reward sentinel) down to 1.
template <typename Policy>
DpTables build_tables(const Instance& in, double eps, const Policy& pol,
                      const DpOptions& opt) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw InputError("epsilon must be positive");
  const std::size_t k = in.num_layers();
  DpTables tabs;
  tabs.grid = BudgetGrid(in.budget, eps);
  tabs.epsilon = eps;
  tabs.layers.resize(k);
  const std::size_t G = tabs.grid.size();

  LayerTable& sentinel = tabs.layers[k - 1];
  sentinel.layer = k - 1;
  sentinel.cells_per_budget = 1;
  sentinel.by_budget.assign(G, {});
  sentinel.by_budget[0].push_back({in.rewards, 0, -1, -1});

  for (std::size_t t = k - 1; t-- > 1;) {
    LayerTable& tab = tabs.layers[t];
    tab.layer = t;
    const std::uint64_t C = pol.cells_per_budget(t);
    const long double total = static_cast<long double>(C) * G;
    if (total > static_cast<long double>(opt.cap))
      throw SizeCapError("dp layer " + std::to_string(t) + " needs " +
                         std::to_string(C) + " x " + std::to_string(G) +
                         " cells, cap is " + std::to_string(opt.cap));
    tab.cells_per_budget = C;
    const std::size_t n = static_cast<std::size_t>(C * G);
    const std::size_t st = in.layer_sizes[t];
    std::vector<double> rows(n * st);
    std::vector<std::int32_t> nb(n), nc(n);
    std::vector<std::uint64_t> solves_per_chunk(n ? n : 1, 0);

    parallel_chunks(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
      Matrix input;
      std::uint64_t solves = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t b = i / C;
        const std::uint64_t c = i % C;
        pol.cell_input(t, c, input);
        auto ch = best_choice(pol, tabs, t, b, input, solves);
        std::copy(ch.step.reward_row.begin(), ch.step.reward_row.end(),
                  rows.begin() + static_cast<std::ptrdiff_t>(i * st));
        nb[i] = ch.next_budget;
        nc[i] = ch.next_cand;
      }
      solves_per_chunk[lo] = solves;
    });
    for (auto s : solves_per_chunk) tabs.step_solves += s;

    // Sequential dedup keeps the first representative in cell order.
    tab.by_budget.assign(G, {});
    tab.cell_cand.assign(n, -1);
    for (std::size_t b = 0; b < G; ++b) {
      std::unordered_map<std::vector<std::int64_t>, std::int32_t, RowKeyHash> seen;
      for (std::uint64_t c = 0; c < C; ++c) {
        const std::size_t i = b * C + c;
        std::span<const double> rho(rows.data() + i * st, st);
        auto key = row_key(rho);
        auto [it, fresh] =
            seen.try_emplace(std::move(key), static_cast<std::int32_t>(tab.by_budget[b].size()));
        if (fresh)
          tab.by_budget[b].push_back(
              {std::vector<double>(rho.begin(), rho.end()), c, nb[i], nc[i]});
        tab.cell_cand[i] = it->second;
      }
    }
    tabs.cells += n;
  }
  return tabs;
}

struct RootResult {
  InterventionPlan plan;
  double dp_value = 0.0;
  std::uint64_t solves = 0;
};

// Solves the root cell (full budget B^eps, fixed input) and reconstructs
// the plan by replaying the stored choices.
template <typename Policy>
RootResult solve_root(const Instance& in, const DpTables& tabs,
                      const Policy& pol, const Matrix& root_input) {
  const std::size_t k = in.num_layers();
  RootResult out;
  const std::size_t top = tabs.grid.top_index();
  auto ch = best_choice(pol, tabs, 0, top, root_input, out.solves);
  out.dp_value = ch.value;
  out.plan.matrices.resize(k - 1);
  out.plan.budget_split.assign(k - 1, 0.0);
  out.plan.matrices[0] = std::move(ch.step.matrix);
  out.plan.budget_split[0] =
      tabs.grid.point(top) - tabs.grid.point(static_cast<std::size_t>(ch.next_budget));

  std::int32_t b = ch.next_budget;
  std::int32_t ci = ch.next_cand;
  Matrix input;
  for (std::size_t t = 1; t + 1 < k; ++t) {
    const Candidate& cand = tabs.layers[t].by_budget[b][ci];
    const Candidate& next =
        tabs.layers[t + 1].by_budget[cand.next_budget][cand.next_cand];
    pol.cell_input(t, cand.rep_cell, input);
    const double beta = tabs.grid.point(b) - tabs.grid.point(cand.next_budget);
    auto res = pol.step(t, next.rho, input, beta < 0.0 ? 0.0 : beta);
    ++out.solves;
    out.plan.matrices[t] = std::move(res.matrix);
    out.plan.budget_split[t] = beta < 0.0 ? 0.0 : beta;
    b = cand.next_budget;
    ci = cand.next_cand;
  }
  return out;
}

}  // namespace detail
}  // namespace pipeint

#endif  // PIPEINT_DETAIL_DP_ENGINE_HPP_
