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

#ifndef PIPEINT_EXANTE_HPP_
#define PIPEINT_EXANTE_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pipeint/dp_welfare.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/model.hpp"

namespace pipeint {

// D'(i) = D(i) beta^{u_i} / sum_j D(j) beta^{u_j}
inline std::vector<double> mw_update(std::span<const double> D,
                                     std::span<const double> u, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("mw_update: beta must lie in (0,1)");
  if (D.size() != u.size()) throw InputError("mw_update: dimension mismatch");
  std::vector<double> out(D.size());
  double z = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) throw InputError("mw_update: utility outside [0,1]");
    if (!(D[i] >= 0.0)) throw InputError("mw_update: negative weight");
    out[i] = D[i] * std::pow(beta, u[i]);
    z += out[i];
  }
  if (!(z > 0.0)) throw InputError("mw_update: zero total weight");
  for (auto& x : out) x /= z;
  return out;
}

struct DynamicsRound {
  std::size_t round = 0;  // 1-based
  std::vector<double> distribution;
  double best_response_value = 0.0;  // R^T M^t D^t, exact
  std::vector<double> population_rewards;  // R^T M^t e_i
  std::vector<double> utilities;           // population_rewards / ||R||_inf
  std::size_t plan_id = 0;           // index into the distinct best responses
};

struct DynamicsTrace {
  std::vector<DynamicsRound> rounds;
  double beta = 0.0;
  std::size_t T = 0;
  double reward_norm = 0.0;
};

struct RegretCertificate {
  double average_payoff = 0.0;    // (1/T) sum_t R^T M^t D^t
  double best_fixed_payoff = 0.0; // min_q (1/T) sum_t R^T M^t e_q
  double slack = 0.0;             // (sqrt(2 ln w / T) + ln w / T) ||R||_inf
  bool holds = false;
};

inline RegretCertificate regret_certificate(const DynamicsTrace& tr) {
  RegretCertificate c;
  if (tr.rounds.empty()) return c;
  const double T = static_cast<double>(tr.rounds.size());
  const std::size_t w = tr.rounds.front().utilities.size();
  std::vector<double> per_q(w, 0.0);
  for (const auto& r : tr.rounds) {
    c.average_payoff += r.best_response_value;
    for (std::size_t q = 0; q < w; ++q) per_q[q] += r.population_rewards[q];
  }
  c.average_payoff /= T;
  c.best_fixed_payoff = *std::min_element(per_q.begin(), per_q.end()) / T;
  const double lw = std::log(static_cast<double>(w));
  c.slack = (std::sqrt(2.0 * lw / T) + lw / T) * tr.reward_norm;
  c.holds = c.average_payoff <= c.best_fixed_payoff + c.slack;
  return c;
}

struct ExanteOptions {
  std::size_t rounds = 0;                // 0 = ceil(2 ln w / eps^2)
  std::optional<double> br_epsilon;      // default eps / (3 (k-1))
  DpOptions dp;
};

struct ExanteResult {
  MixedPlan mixture;
  SolveReport report;
  DynamicsTrace trace;
};

inline std::size_t default_rounds(std::size_t w, double eps) {
  if (w <= 1) return 1;
  return static_cast<std::size_t>(
      std::ceil(2.0 * std::log(static_cast<double>(w)) / (eps * eps)));
}

// Multiplicative weights over starting nodes against welfare best
// responses; returns the uniform mixture over all rounds' plans.
inline ExanteResult solve_exante_maximin(const Instance& in, double eps,
                                         const ExanteOptions& opt = {}) {
  require_valid(in);
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t w = in.layer_sizes[0];
  const std::size_t k = in.num_layers();
  const std::size_t T = opt.rounds > 0 ? opt.rounds : default_rounds(w, eps);
  if (T < 1) throw InputError("rounds must be >= 1");
  const double br_eps =
      opt.br_epsilon ? *opt.br_epsilon : eps / (3.0 * static_cast<double>(k - 1));
  if (!(br_eps > 0.0)) throw InputError("best-response epsilon must be positive");

  const auto wt = build_welfare_tables(in, br_eps, opt.dp);
  const double rn = in.reward_norm();
  const double lw = std::log(static_cast<double>(w));

  ExanteResult res;
  res.trace.T = T;
  res.trace.reward_norm = rn;
  res.trace.beta = w > 1 ? 1.0 / (1.0 + std::sqrt(2.0 * lw / static_cast<double>(T))) : 0.0;

  std::vector<InterventionPlan> plans;
  std::vector<std::vector<double>> plan_rewards;
  std::vector<std::size_t> counts;
  std::map<std::vector<std::int64_t>, std::size_t> memo;  // rounded D -> plan id
  std::uint64_t root_solves = 0;

  std::vector<double> D(w, 1.0 / static_cast<double>(w));
  const std::size_t rounds = w == 1 ? 1 : T;  // one population: MW is vacuous
  for (std::size_t t = 1; t <= rounds; ++t) {
    std::vector<std::int64_t> key(w);
    for (std::size_t i = 0; i < w; ++i) key[i] = std::llround(D[i] * 1e12);
    std::size_t id;
    if (auto it = memo.find(key); it != memo.end()) {
      id = it->second;
    } else {
      auto rs = root_step(wt, D);
      root_solves += rs.solves;
      id = plans.size();
      for (std::size_t p = 0; p < plans.size(); ++p)
        if (plans[p] == rs.plan) { id = p; break; }
      if (id == plans.size()) {
        plan_rewards.push_back(evaluate_population_rewards(in, rs.plan));
        plans.push_back(std::move(rs.plan));
        counts.push_back(0);
      }
      memo.emplace(std::move(key), id);
    }
    ++counts[id];
    DynamicsRound r;
    r.round = t;
    r.distribution = D;
    r.best_response_value = dot(plan_rewards[id], D);
    r.population_rewards = plan_rewards[id];
    r.utilities.resize(w);
    for (std::size_t i = 0; i < w; ++i)
      r.utilities[i] = rn > 0.0 ? std::clamp(plan_rewards[id][i] / rn, 0.0, 1.0) : 0.0;
    r.plan_id = id;
    if (w > 1) D = mw_update(D, r.utilities, res.trace.beta);
    res.trace.rounds.push_back(std::move(r));
  }

  res.trace.T = rounds;
  const double total = static_cast<double>(rounds);
  for (std::size_t p = 0; p < plans.size(); ++p)
    res.mixture.support.push_back({static_cast<double>(counts[p]) / total, plans[p]});

  const auto ev = evaluate_mixed(in, res.mixture);
  res.report.per_population_rewards = ev.per_population_expected;
  res.report.objective_value = ev.exante_maximin;
  double used = 0.0;
  for (const auto& e : res.mixture.support) used = std::max(used, plan_cost(in, e.plan));
  res.report.budget_used = used;
  const auto t1 = std::chrono::steady_clock::now();
  res.report.meta = welfare_meta(wt, root_solves,
                                 std::chrono::duration<double, std::milli>(t1 - t0).count());
  res.report.meta.epsilon = eps;
  res.report.meta.extra["br_epsilon"] = br_eps;
  res.report.meta.extra["rounds"] = static_cast<double>(rounds);
  res.report.meta.extra["beta"] = res.trace.beta;
  res.report.meta.extra["support_size"] = static_cast<double>(plans.size());
  return res;
}

}  // namespace pipeint

#endif  // PIPEINT_EXANTE_HPP_
