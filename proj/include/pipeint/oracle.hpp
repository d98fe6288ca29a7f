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

// Brute-force grid search over interventions for small instances.
//
// Every malleable column is perturbed as M0 + eta * z with integer z,
// sum(z) = 0 over the column's malleable rows, entries kept in [0, 1].
// Columns with fewer than two malleable rows cannot change. A plan is kept
// when its total cost is at most B (+1e-9); per-layer budgets are the
// layer costs, so every budget split is covered implicitly.
//
// Accuracy: any feasible plan can be rounded onto this grid column by
// column (truncate each deviation toward M0, then rebalance the column by
// shrinking |z|), which never increases cost and moves each column by at
// most 2 w eta in L1. By the reward-perturbation bound this loses at most
// 2 (k-1) w eta ||R||_inf, so oracle >= OPT - 2 (k-1) w eta ||R||_inf.

#ifndef PIPEINT_ORACLE_HPP_
#define PIPEINT_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pipeint/errors.hpp"
#include "pipeint/matrix.hpp"
#include "pipeint/model.hpp"
#include "pipeint/netgrid.hpp"
#include "pipeint/simplex.hpp"

namespace pipeint {

struct OracleOptions {
  std::uint64_t cap = kDefaultSizeCap;
};

struct OracleResult {
  double value = 0.0;
  InterventionPlan plan;
  std::uint64_t enumerated = 0;
};

struct OracleMixedResult {
  double value = 0.0;  // exact ex-ante value of `mixture`
  double lp_value = 0.0;
  MixedPlan mixture;
  std::uint64_t enumerated = 0;
  std::size_t iterations = 0;
};

namespace detail {

struct ColumnOptions {
  std::size_t t = 0;
  std::size_t u = 0;
  std::vector<std::vector<double>> values;  // full column per option
  std::vector<double> costs;
};

class OracleSpace {
 public:
  // Column enumeration stops once one column alone has more than `cap`
  // options; count() then saturates.
  OracleSpace(const Instance& in, double eta, std::uint64_t cap) : in_(in), cap_(cap) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("grid step must be positive");
    require_valid(in);
    const std::size_t k = in.num_layers();
    for (std::size_t t = k - 1; t-- > 0;) {
      for (std::size_t u = 0; u < in.layer_sizes[t] && !saturated_; ++u)
        columns_.push_back(build_column(t, u, eta));
    }
  }

  const std::vector<ColumnOptions>& columns() const { return columns_; }

  // Number of budget-feasible option combinations, saturating at cap + 1.
  std::uint64_t count(std::uint64_t cap) const {
    if (saturated_) return cap + 1;
    std::map<double, std::uint64_t> acc{{0.0, 1}};
    const double lim = in_.budget + 1e-9;
    for (const auto& col : columns_) {
      std::map<double, std::uint64_t> nxt;
      for (const auto& [c, n] : acc)
        for (double oc : col.costs) {
          const double s = c + oc;
          if (s <= lim) {
            auto& slot = nxt[s];
            slot = std::min<std::uint64_t>(slot + n, cap + 1);
          }
        }
      acc = std::move(nxt);
    }
    std::uint64_t total = 0;
    for (const auto& [c, n] : acc) total = std::min<std::uint64_t>(total + n, cap + 1);
    return total;
  }

  // Calls fn(rewards_by_population, choice) for every feasible combination.
  void enumerate(const std::function<void(const std::vector<double>&,
                                          const std::vector<std::uint32_t>&)>& fn) const {
    const std::size_t k = in_.num_layers();
    rho_.assign(k, {});
    for (std::size_t t = 0; t < k; ++t) rho_[t].assign(in_.layer_sizes[t], 0.0);
    rho_[k - 1] = in_.rewards;
    choice_.assign(columns_.size(), 0);
    recurse(0, 0.0, fn);
  }

  InterventionPlan plan_from(const std::vector<std::uint32_t>& choice) const {
    InterventionPlan p = zero_budget_plan(in_);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const auto& col = columns_[i];
      const auto& vals = col.values[choice[i]];
      for (std::size_t v = 0; v < vals.size(); ++v) p.matrices[col.t](v, col.u) = vals[v];
    }
    for (std::size_t t = 0; t < p.matrices.size(); ++t)
      p.budget_split[t] = layer_cost(in_, t, p.matrices[t]);
    return p;
  }

 private:
  ColumnOptions build_column(std::size_t t, std::size_t u, double eta) {
    ColumnOptions col;
    col.t = t;
    col.u = u;
    const Matrix& m0 = in_.initial_matrices[t];
    const Mask& mask = in_.malleable[t];
    const LayerCost lc = in_.cost_model.layer(t);
    std::vector<std::size_t> rows;
    for (std::size_t v = 0; v < m0.rows(); ++v)
      if (mask(v, u)) rows.push_back(v);
    std::vector<double> base(m0.rows());
    for (std::size_t v = 0; v < m0.rows(); ++v) base[v] = m0(v, u);

    struct Opt {
      double cost;
      std::vector<double> vals;
    };
    std::vector<Opt> opts;
    opts.push_back({0.0, base});
    if (rows.size() >= 2) {
      const std::size_t r = rows.size();
      std::vector<long> lo(r), hi(r);
      for (std::size_t i = 0; i < r; ++i) {
        const double x = base[rows[i]];
        lo[i] = static_cast<long>(std::ceil(-x / eta - 1e-9));
        hi[i] = static_cast<long>(std::floor((1.0 - x) / eta + 1e-9));
      }
      const double lim = in_.budget + 1e-9;
      std::vector<long> z(r, 0);
      // Depth-first over z_0..z_{r-2}; z_{r-1} closes the sum.
      std::function<void(std::size_t, long, double)> rec = [&](std::size_t i, long sum,
                                                               double partial) {
        if (i + 1 == r) {
          const long last = -sum;
          if (last < lo[i] || last > hi[i]) return;
          z[i] = last;
          bool zero = true;
          for (auto x : z) zero = zero && x == 0;
          if (zero) return;
          std::vector<double> vals = base;
          double c = 0.0;
          for (std::size_t j = 0; j < r; ++j) {
            double y = base[rows[j]] + eta * static_cast<double>(z[j]);
            y = std::clamp(y, 0.0, 1.0);
            vals[rows[j]] = y;
          }
          for (std::size_t j = 0; j < r; ++j)
            c += lc.weight(rows[j], u) * std::abs(vals[rows[j]] - base[rows[j]]);
          if (c <= lim) opts.push_back({c, std::move(vals)});
          if (opts.size() > cap_) saturated_ = true;
          return;
        }
        for (long x = lo[i]; x <= hi[i] && !saturated_; ++x) {
          const double p = partial + eta * lc.weight(rows[i], u) * std::abs(static_cast<double>(x));
          if (p > lim + 1e-9) continue;
          z[i] = x;
          rec(i + 1, sum + x, p);
        }
      };
      rec(0, 0, 0.0);
    }
    std::stable_sort(opts.begin(), opts.end(),
                     [](const Opt& a, const Opt& b) { return a.cost < b.cost; });
    for (auto& o : opts) {
      col.costs.push_back(o.cost);
      col.values.push_back(std::move(o.vals));
    }
    return col;
  }

  void recurse(std::size_t i, double spent,
               const std::function<void(const std::vector<double>&,
                                        const std::vector<std::uint32_t>&)>& fn) const {
    if (i == columns_.size()) {
      fn(rho_[0], choice_);
      return;
    }
    const auto& col = columns_[i];
    const double lim = in_.budget + 1e-9;
    const auto& next = rho_[col.t + 1];
    for (std::size_t o = 0; o < col.costs.size(); ++o) {
      const double s = spent + col.costs[o];
      if (s > lim) continue;
      const auto& vals = col.values[o];
      double acc = 0.0;
      for (std::size_t v = 0; v < vals.size(); ++v) acc += next[v] * vals[v];
      rho_[col.t][col.u] = acc;
      choice_[i] = static_cast<std::uint32_t>(o);
      recurse(i + 1, s, fn);
    }
  }

  const Instance& in_;
  std::uint64_t cap_;
  bool saturated_ = false;
  std::vector<ColumnOptions> columns_;
  mutable std::vector<std::vector<double>> rho_;
  mutable std::vector<std::uint32_t> choice_;
};

inline void require_within_cap(const OracleSpace& sp, std::uint64_t cap,
                               std::uint64_t& count) {
  count = sp.count(cap);
  if (count > cap)
    throw SizeCapError("oracle enumeration exceeds cap of " + std::to_string(cap) +
                       " plans");
}

// Best plan for the weighted objective q . rewards.
inline OracleResult weighted_best(const Instance& in, const OracleSpace& sp,
                                  std::span<const double> q, std::uint64_t count) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> arg;
  sp.enumerate([&](const std::vector<double>& rho, const std::vector<std::uint32_t>& ch) {
    const double v = dot(rho, q);
    if (v > best + 1e-12) {
      best = v;
      arg = ch;
    }
  });
  OracleResult r;
  r.plan = sp.plan_from(arg);
  r.value = dot(evaluate_population_rewards(in, r.plan), q);
  r.enumerated = count;
  return r;
}

}  // namespace detail

// Number of grid plans the oracle would enumerate (saturates at cap + 1).
inline std::uint64_t oracle_plan_count(const Instance& in, double eta,
                                       std::uint64_t cap = kDefaultSizeCap) {
  return detail::OracleSpace(in, eta, cap).count(cap);
}

inline OracleResult oracle_welfare(const Instance& in, double eta,
                                   const OracleOptions& opt = {}) {
  detail::OracleSpace sp(in, eta, opt.cap);
  std::uint64_t count = 0;
  detail::require_within_cap(sp, opt.cap, count);
  return detail::weighted_best(in, sp, in.initial_distribution, count);
}

// Grid maximin optimum; among equal minima the higher welfare wins.
inline OracleResult oracle_expost_maximin(const Instance& in, double eta,
                                          const OracleOptions& opt = {}) {
  detail::OracleSpace sp(in, eta, opt.cap);
  std::uint64_t count = 0;
  detail::require_within_cap(sp, opt.cap, count);
  double best_min = -std::numeric_limits<double>::infinity();
  double best_w = -std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> arg;
  const auto& d1 = in.initial_distribution;
  sp.enumerate([&](const std::vector<double>& rho, const std::vector<std::uint32_t>& ch) {
    const double mn = *std::min_element(rho.begin(), rho.end());
    if (mn > best_min + 1e-12) {
      best_min = mn;
      best_w = dot(rho, d1);
      arg = ch;
    } else if (mn >= best_min - 1e-12) {
      const double w = dot(rho, d1);
      if (w > best_w + 1e-12) {
        best_min = std::max(best_min, mn);
        best_w = w;
        arg = ch;
      }
    }
  });
  OracleResult r;
  r.plan = sp.plan_from(arg);
  r.value = maximin_value(in, r.plan);
  r.enumerated = count;
  return r;
}

// Exact ex-ante optimum over mixtures of grid plans, by column generation:
// the restricted primal gives the mixture, the restricted dual gives the
// adversary's distribution q, and pricing searches all grid plans for the
// best response to q.
inline OracleMixedResult oracle_exante_maximin(const Instance& in, double eta,
                                               const OracleOptions& opt = {}) {
  detail::OracleSpace sp(in, eta, opt.cap);
  std::uint64_t count = 0;
  detail::require_within_cap(sp, opt.cap, count);
  const std::size_t w = in.layer_sizes[0];

  std::vector<InterventionPlan> plans;
  std::vector<std::vector<double>> rewards;
  auto add_plan = [&](InterventionPlan p) -> bool {
    for (const auto& x : plans)
      if (x == p) return false;
    rewards.push_back(evaluate_population_rewards(in, p));
    plans.push_back(std::move(p));
    return true;
  };
  add_plan(oracle_expost_maximin(in, eta, opt).plan);
  for (std::size_t j = 0; j < w; ++j) {
    std::vector<double> e(w, 0.0);
    e[j] = 1.0;
    add_plan(detail::weighted_best(in, sp, e, count).plan);
  }

  OracleMixedResult out;
  out.enumerated = count;
  std::vector<double> lambda;
  for (std::size_t it = 0; it < 500; ++it) {
    ++out.iterations;
    const std::size_t P = plans.size();
    // Primal: max v  s.t.  v <= sum_p lambda_p r_j(p), sum lambda = 1.
    LinearProgram primal(P + 1);
    primal.objective[P] = 1.0;
    for (std::size_t j = 0; j < w; ++j) {
      std::vector<std::pair<std::size_t, double>> row{{P, 1.0}};
      for (std::size_t p = 0; p < P; ++p) row.emplace_back(p, -rewards[p][j]);
      primal.add_row(std::move(row), Sense::kLe, 0.0);
    }
    {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t p = 0; p < P; ++p) row.emplace_back(p, 1.0);
      primal.add_row(std::move(row), Sense::kEq, 1.0);
    }
    const auto ps = solve_lp(primal);
    if (ps.status != LpStatus::kOptimal) throw SolverError("oracle ex-ante primal LP failed");
    lambda.assign(ps.x.begin(), ps.x.begin() + static_cast<std::ptrdiff_t>(P));
    out.lp_value = ps.x[P];

    // Dual: min u  s.t.  sum_j q_j r_j(p) <= u, sum q = 1.
    LinearProgram dual(w + 1);
    dual.objective[w] = -1.0;
    for (std::size_t p = 0; p < P; ++p) {
      std::vector<std::pair<std::size_t, double>> row{{w, -1.0}};
      for (std::size_t j = 0; j < w; ++j) row.emplace_back(j, rewards[p][j]);
      dual.add_row(std::move(row), Sense::kLe, 0.0);
    }
    {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t j = 0; j < w; ++j) row.emplace_back(j, 1.0);
      dual.add_row(std::move(row), Sense::kEq, 1.0);
    }
    const auto ds = solve_lp(dual);
    if (ds.status != LpStatus::kOptimal) throw SolverError("oracle ex-ante dual LP failed");
    std::vector<double> q(ds.x.begin(), ds.x.begin() + static_cast<std::ptrdiff_t>(w));
    const double u = ds.x[w];

    auto br = detail::weighted_best(in, sp, q, count);
    if (br.value <= u + 1e-10) break;
    if (!add_plan(std::move(br.plan))) break;
  }

  double s = 0.0;
  for (double x : lambda) s += x > 1e-12 ? x : 0.0;
  for (std::size_t p = 0; p < plans.size(); ++p)
    if (lambda[p] > 1e-12) out.mixture.support.push_back({lambda[p] / s, plans[p]});
  out.value = evaluate_mixed(in, out.mixture).exante_maximin;
  return out;
}

}  // namespace pipeint

#endif  // PIPEINT_ORACLE_HPP_
