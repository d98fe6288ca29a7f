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

#ifndef PIPEINT_MODEL_HPP_
#define PIPEINT_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pipeint/cost.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/matrix.hpp"

namespace pipeint {

inline constexpr double kModelTol = 1e-9;

// A layered pipeline: transition t maps layer t to layer t+1 (0-based).
struct Instance {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> initial_matrices;
  std::vector<Mask> malleable;
  std::vector<double> rewards;
  std::vector<double> initial_distribution;
  double budget = 0.0;
  CostModel cost_model;

  std::size_t num_layers() const { return layer_sizes.size(); }
  std::size_t num_transitions() const { return initial_matrices.size(); }
  std::size_t width() const {
    return layer_sizes.empty()
               ? 0
               : *std::max_element(layer_sizes.begin(), layer_sizes.end());
  }
  double reward_norm() const { return max_abs(rewards); }
  bool all_malleable() const {
    for (const auto& m : malleable)
      for (auto b : m.data())
        if (!b) return false;
    return true;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct InterventionPlan {
  std::vector<Matrix> matrices;
  std::vector<double> budget_split;

  friend bool operator==(const InterventionPlan&,
                         const InterventionPlan&) = default;
};

struct MixedPlan {
  struct Entry {
    double weight = 0.0;
    InterventionPlan plan;
  };
  std::vector<Entry> support;
};

struct SolveMeta {
  double epsilon = 0.0;
  std::uint64_t cells = 0;
  double wall_ms = 0.0;
  std::map<std::string, double> extra;
};

struct SolveReport {
  double objective_value = 0.0;
  std::vector<double> per_population_rewards;
  double budget_used = 0.0;
  SolveMeta meta;
};

// One invariant failure. Indices are -1 when not applicable.
struct Violation {
  std::string what;
  int layer = -1;
  int row = -1;
  int col = -1;
  double magnitude = 0.0;

  std::string describe() const {
    std::ostringstream os;
    os << what;
    if (layer >= 0) os << " [layer " << layer;
    if (row >= 0) os << (layer >= 0 ? ", row " : " [row ") << row;
    if (col >= 0) os << ((layer >= 0 || row >= 0) ? ", column " : " [column ") << col;
    if (layer >= 0 || row >= 0 || col >= 0) os << "]";
    os << " magnitude " << magnitude;
    return os.str();
  }
};

namespace detail {

inline void check_stochastic(const Matrix& m, int layer,
                             std::vector<Violation>& out) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double x = m(r, c);
      if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
        out.push_back({"entry outside [0,1]", layer, static_cast<int>(r),
                       static_cast<int>(c), x});
      }
    }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, c);
    if (std::abs(s - 1.0) > kModelTol) {
      out.push_back({s < 1.0 ? "column sum deficit" : "column sum excess",
                     layer, -1, static_cast<int>(c), std::abs(1.0 - s)});
    }
  }
}

inline void check_shape(std::size_t rows, std::size_t cols, std::size_t er,
                        std::size_t ec, const char* what, int layer,
                        std::vector<Violation>& out) {
  if (rows != er || cols != ec) {
    out.push_back({std::string(what) + " shape mismatch", layer, -1, -1,
                   static_cast<double>(rows * cols)});
  }
}

}  // namespace detail

inline std::vector<Violation> validate_instance(const Instance& in) {
  std::vector<Violation> out;
  const std::size_t k = in.layer_sizes.size();
  if (k < 2) {
    out.push_back({"fewer than two layers", -1, -1, -1, static_cast<double>(k)});
    return out;
  }
  for (std::size_t t = 0; t < k; ++t)
    if (in.layer_sizes[t] == 0)
      out.push_back({"empty layer", static_cast<int>(t), -1, -1, 0.0});
  if (!out.empty()) return out;

  if (in.initial_matrices.size() != k - 1) {
    out.push_back({"wrong number of transition matrices", -1, -1, -1,
                   static_cast<double>(in.initial_matrices.size())});
    return out;
  }
  if (in.malleable.size() != k - 1) {
    out.push_back({"wrong number of malleability masks", -1, -1, -1,
                   static_cast<double>(in.malleable.size())});
    return out;
  }
  bool shapes_ok = true;
  for (std::size_t t = 0; t + 1 < k; ++t) {
    const auto before = out.size();
    detail::check_shape(in.initial_matrices[t].rows(),
                        in.initial_matrices[t].cols(), in.layer_sizes[t + 1],
                        in.layer_sizes[t], "transition", static_cast<int>(t), out);
    detail::check_shape(in.malleable[t].rows(), in.malleable[t].cols(),
                        in.layer_sizes[t + 1], in.layer_sizes[t], "mask",
                        static_cast<int>(t), out);
    if (out.size() != before) shapes_ok = false;
  }
  if (shapes_ok)
    for (std::size_t t = 0; t + 1 < k; ++t)
      detail::check_stochastic(in.initial_matrices[t], static_cast<int>(t), out);

  if (in.rewards.size() != in.layer_sizes[k - 1]) {
    out.push_back({"reward vector length mismatch", -1, -1, -1,
                   static_cast<double>(in.rewards.size())});
  } else {
    for (std::size_t i = 0; i < in.rewards.size(); ++i)
      if (!std::isfinite(in.rewards[i]) || in.rewards[i] < 0.0)
        out.push_back({"negative reward", -1, static_cast<int>(i), -1,
                       in.rewards[i]});
  }

  const auto& d = in.initial_distribution;
  if (d.size() != in.layer_sizes[0]) {
    out.push_back({"initial distribution length mismatch", -1, -1, -1,
                   static_cast<double>(d.size())});
  } else {
    double s = 0.0;
    bool positive = true;
    double worst = 0.0;
    for (double x : d) {
      s += x;
      if (!(x > 0.0)) {
        positive = false;
        worst = std::min(worst, x);
      }
    }
    if (!positive)
      out.push_back({"initial distribution not strictly positive", -1, -1, -1,
                     worst});
    if (std::abs(s - 1.0) > kModelTol)
      out.push_back({"initial distribution does not sum to 1", -1, -1, -1,
                     std::abs(s - 1.0)});
  }

  if (!std::isfinite(in.budget) || in.budget < 0.0)
    out.push_back({"negative budget", -1, -1, -1, in.budget});

  if (in.cost_model.kind == CostKind::kWeightedL1) {
    if (in.cost_model.weights.size() != k - 1) {
      out.push_back({"wrong number of cost weight matrices", -1, -1, -1,
                     static_cast<double>(in.cost_model.weights.size())});
    } else {
      for (std::size_t t = 0; t + 1 < k; ++t) {
        const auto& w = in.cost_model.weights[t];
        const auto before = out.size();
        detail::check_shape(w.rows(), w.cols(), in.layer_sizes[t + 1],
                            in.layer_sizes[t], "cost weights",
                            static_cast<int>(t), out);
        if (out.size() != before) continue;
        for (std::size_t r = 0; r < w.rows(); ++r)
          for (std::size_t c = 0; c < w.cols(); ++c)
            if (!(w(r, c) > 0.0) || !std::isfinite(w(r, c)))
              out.push_back({"non-positive cost weight", static_cast<int>(t),
                             static_cast<int>(r), static_cast<int>(c), w(r, c)});
      }
    }
  }
  return out;
}

// Throws InputError listing all violations.
inline void require_valid(const Instance& in) {
  const auto v = validate_instance(in);
  if (v.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& x : v) msg += "\n  " + x.describe();
  throw InputError(msg);
}

inline double layer_cost(const Instance& in, std::size_t t, const Matrix& m) {
  return cost_model_evaluate(in.cost_model.layer(t), m, in.initial_matrices[t]);
}

inline void require_plan_shapes(const Instance& in, const InterventionPlan& p) {
  if (p.matrices.size() != in.num_transitions())
    throw InputError("plan has " + std::to_string(p.matrices.size()) +
                     " matrices, instance needs " +
                     std::to_string(in.num_transitions()));
  for (std::size_t t = 0; t < p.matrices.size(); ++t)
    require_same_shape(p.matrices[t], in.initial_matrices[t], "plan matrix");
}

// Entry j is R^T M_{k-1} ... M_1 e_j, via backward vector products.
inline std::vector<double> evaluate_population_rewards(
    const Instance& in, const InterventionPlan& p) {
  require_plan_shapes(in, p);
  std::vector<double> rho = in.rewards;
  for (std::size_t t = p.matrices.size(); t-- > 0;) rho = vec_mat(rho, p.matrices[t]);
  return rho;
}

inline double welfare(const Instance& in, const InterventionPlan& p) {
  return dot(evaluate_population_rewards(in, p), in.initial_distribution);
}

inline double maximin_value(const Instance& in, const InterventionPlan& p) {
  const auto r = evaluate_population_rewards(in, p);
  return *std::min_element(r.begin(), r.end());
}

inline InterventionPlan zero_budget_plan(const Instance& in) {
  return {in.initial_matrices, std::vector<double>(in.num_transitions(), 0.0)};
}

inline double initial_welfare(const Instance& in) {
  return welfare(in, zero_budget_plan(in));
}

inline double plan_cost(const Instance& in, const InterventionPlan& p) {
  require_plan_shapes(in, p);
  double acc = 0.0;
  for (std::size_t t = 0; t < p.matrices.size(); ++t)
    acc += layer_cost(in, t, p.matrices[t]);
  return acc;
}

// All feasibility violations of a plan: shapes, stochasticity, frozen
// entries (bitwise), per-layer and total budget.
inline std::vector<Violation> check_plan(const Instance& in,
                                         const InterventionPlan& p) {
  std::vector<Violation> out;
  if (p.matrices.size() != in.num_transitions()) {
    out.push_back({"wrong number of plan matrices", -1, -1, -1,
                   static_cast<double>(p.matrices.size())});
    return out;
  }
  if (p.budget_split.size() != in.num_transitions()) {
    out.push_back({"wrong budget split length", -1, -1, -1,
                   static_cast<double>(p.budget_split.size())});
    return out;
  }
  double total = 0.0;
  for (std::size_t t = 0; t < p.matrices.size(); ++t) {
    const int lt = static_cast<int>(t);
    const auto& m = p.matrices[t];
    const auto& m0 = in.initial_matrices[t];
    if (!m.same_shape(m0)) {
      out.push_back({"plan matrix shape mismatch", lt, -1, -1, 0.0});
      continue;
    }
    detail::check_stochastic(m, lt, out);
    const auto& mask = in.malleable[t];
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (!mask(r, c) && m(r, c) != m0(r, c))
          out.push_back({"non-malleable entry modified", lt, static_cast<int>(r),
                         static_cast<int>(c), std::abs(m(r, c) - m0(r, c))});
    const double bt = p.budget_split[t];
    if (!(bt >= 0.0))
      out.push_back({"negative layer budget", lt, -1, -1, bt});
    total += bt;
    const double c = layer_cost(in, t, m);
    if (c > bt + kModelTol)
      out.push_back({"layer cost exceeds its budget", lt, -1, -1, c - bt});
  }
  if (total > in.budget + kModelTol)
    out.push_back({"budget split exceeds total budget", -1, -1, -1,
                   total - in.budget});
  return out;
}

inline void require_feasible(const Instance& in, const InterventionPlan& p) {
  const auto v = check_plan(in, p);
  if (v.empty()) return;
  std::string msg = "infeasible plan:";
  for (const auto& x : v) msg += "\n  " + x.describe();
  throw InputError(msg);
}

struct MixedEvaluation {
  std::vector<double> per_population_expected;
  double exante_maximin = 0.0;
};

inline MixedEvaluation evaluate_mixed(const Instance& in, const MixedPlan& mp) {
  if (mp.support.empty()) throw InputError("empty mixture");
  double wsum = 0.0;
  for (const auto& e : mp.support) {
    if (!(e.weight >= 0.0)) throw InputError("negative mixture weight");
    wsum += e.weight;
  }
  if (std::abs(wsum - 1.0) > kModelTol)
    throw InputError("mixture weights do not sum to 1");
  MixedEvaluation ev;
  ev.per_population_expected.assign(in.layer_sizes.at(0), 0.0);
  for (const auto& e : mp.support) {
    const auto r = evaluate_population_rewards(in, e.plan);
    for (std::size_t j = 0; j < r.size(); ++j)
      ev.per_population_expected[j] += e.weight * r[j];
  }
  ev.exante_maximin = *std::min_element(ev.per_population_expected.begin(),
                                        ev.per_population_expected.end());
  return ev;
}

inline std::vector<Violation> check_mixed(const Instance& in,
                                          const MixedPlan& mp) {
  std::vector<Violation> out;
  double wsum = 0.0;
  for (std::size_t i = 0; i < mp.support.size(); ++i) {
    const auto& e = mp.support[i];
    if (!(e.weight >= 0.0))
      out.push_back({"negative mixture weight", -1, static_cast<int>(i), -1,
                     e.weight});
    wsum += e.weight;
    for (auto v : check_plan(in, e.plan)) {
      v.what = "support plan " + std::to_string(i) + ": " + v.what;
      out.push_back(std::move(v));
    }
  }
  if (std::abs(wsum - 1.0) > kModelTol)
    out.push_back({"mixture weights do not sum to 1", -1, -1, -1,
                   std::abs(wsum - 1.0)});
  return out;
}

// Builds a report for a deterministic plan under either objective.
enum class Objective { kWelfare, kMaximin };

inline SolveReport make_report(const Instance& in, const InterventionPlan& p,
                               Objective obj) {
  SolveReport rep;
  rep.per_population_rewards = evaluate_population_rewards(in, p);
  rep.objective_value =
      obj == Objective::kWelfare
          ? dot(rep.per_population_rewards, in.initial_distribution)
          : *std::min_element(rep.per_population_rewards.begin(),
                              rep.per_population_rewards.end());
  rep.budget_used = plan_cost(in, p);
  return rep;
}

}  // namespace pipeint

#endif  // PIPEINT_MODEL_HPP_
