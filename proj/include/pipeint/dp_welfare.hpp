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

#ifndef PIPEINT_DP_WELFARE_HPP_
#define PIPEINT_DP_WELFARE_HPP_

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pipeint/detail/dp_engine.hpp"
#include "pipeint/layerlp.hpp"
#include "pipeint/model.hpp"
#include "pipeint/netgrid.hpp"

namespace pipeint {

namespace detail {

// Cells at node layer t >= 1 are simplex-net points over that layer.
class WelfarePolicy {
 public:
  WelfarePolicy(std::shared_ptr<const Instance> in, double eps,
                const DpOptions& opt)
      : in_(std::move(in)), method_(opt.method) {
    const std::size_t k = in_->num_layers();
    points_.resize(k);
    sizes_.assign(k, 1);
    for (std::size_t t = 1; t + 1 < k; ++t) {
      SimplexNet net(in_->layer_sizes[t], eps, opt.cap);
      sizes_[t] = net.size();
      max_net_ = std::max(max_net_, net.size());
      auto& flat = points_[t];
      flat.reserve(net.size() * net.dim());
      auto c = net.first_coords();
      const double n = static_cast<double>(net.resolution());
      for (std::uint64_t i = 0; i < net.size(); ++i) {
        for (auto x : c) flat.push_back(static_cast<double>(x) / n);
        net.advance(c);
      }
    }
  }

  std::uint64_t cells_per_budget(std::size_t t) const { return sizes_[t]; }
  std::uint64_t max_net_size() const { return max_net_; }

  void cell_input(std::size_t t, std::uint64_t c, Matrix& out) const {
    const std::size_t d = in_->layer_sizes[t];
    if (out.rows() != d || out.cols() != 1) out = Matrix(d, 1);
    std::copy_n(points_[t].begin() + static_cast<std::ptrdiff_t>(c * d), d,
                out.data().begin());
  }

  LayerStepResult step(std::size_t t, std::span<const double> rho,
                       const Matrix& input, double beta) const {
    return solve_welfare_step(rho, input.data(), in_->initial_matrices[t],
                              in_->malleable[t], beta,
                              in_->cost_model.layer(t), method_);
  }

 private:
  std::shared_ptr<const Instance> in_;
  StepMethod method_;
  std::vector<std::vector<double>> points_;
  std::vector<std::uint64_t> sizes_;
  std::uint64_t max_net_ = 1;
};

}  // namespace detail

// Layer tables for node layers 1..k-1. They do not depend on the initial
// distribution, so one build serves any number of root solves.
struct WelfareTables {
  std::shared_ptr<const Instance> instance;
  detail::WelfarePolicy policy;
  detail::DpTables tables;
  double build_ms = 0.0;
};

inline WelfareTables build_welfare_tables(const Instance& in, double eps,
                                          const DpOptions& opt = {}) {
  require_valid(in);
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  auto shared = std::make_shared<const Instance>(in);
  detail::WelfarePolicy pol(shared, eps, opt);
  auto tabs = detail::build_tables(*shared, eps, pol, opt);
  const auto t1 = std::chrono::steady_clock::now();
  return {shared, std::move(pol), std::move(tabs),
          std::chrono::duration<double, std::milli>(t1 - t0).count()};
}

struct RootStep {
  InterventionPlan plan;
  double value = 0.0;     // exact welfare of `plan` under the root distribution
  double dp_value = 0.0;  // value recorded by the dynamic program
  std::uint64_t solves = 0;
};

inline RootStep root_step(const WelfareTables& wt, std::span<const double> d1) {
  const Instance& in = *wt.instance;
  if (d1.size() != in.layer_sizes[0])
    throw InputError("root distribution has wrong dimension");
  double s = 0.0;
  for (double x : d1) {
    if (!(x >= 0.0)) throw InputError("root distribution has a negative entry");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9) throw InputError("root distribution does not sum to 1");
  Matrix input(d1.size(), 1);
  std::copy(d1.begin(), d1.end(), input.data().begin());
  auto root = detail::solve_root(in, wt.tables, wt.policy, input);
  RootStep out;
  out.dp_value = root.dp_value;
  out.solves = root.solves;
  out.value = dot(evaluate_population_rewards(in, root.plan), d1);
  out.plan = std::move(root.plan);
  return out;
}

inline SolveMeta welfare_meta(const WelfareTables& wt, std::uint64_t root_solves,
                              double wall_ms) {
  SolveMeta m;
  m.epsilon = wt.tables.epsilon;
  m.cells = wt.tables.cells + 1;
  m.wall_ms = wall_ms;
  m.extra["grid_points"] = static_cast<double>(wt.tables.grid.size());
  m.extra["net_size_max"] = static_cast<double>(wt.policy.max_net_size());
  m.extra["step_solves"] =
      static_cast<double>(wt.tables.step_solves + root_solves);
  return m;
}

// Backward dynamic program over (budget, net point) cells; the reported
// objective is the exact welfare of the reconstructed plan.
inline std::pair<SolveReport, InterventionPlan> solve_social_welfare(
    const Instance& in, double eps, const DpOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  auto wt = build_welfare_tables(in, eps, opt);
  auto rs = root_step(wt, in.initial_distribution);
  auto rep = make_report(in, rs.plan, Objective::kWelfare);
  const auto t1 = std::chrono::steady_clock::now();
  rep.meta = welfare_meta(wt, rs.solves,
                          std::chrono::duration<double, std::milli>(t1 - t0).count());
  rep.meta.extra["dp_value"] = rs.dp_value;
  return {std::move(rep), std::move(rs.plan)};
}

// Welfare optimum with the initial distribution replaced by `d1`.
inline std::pair<double, InterventionPlan> best_response(
    const Instance& in, std::span<const double> d1, double eps,
    const DpOptions& opt = {}) {
  auto wt = build_welfare_tables(in, eps, opt);
  auto rs = root_step(wt, d1);
  return {rs.value, std::move(rs.plan)};
}

}  // namespace pipeint

#endif  // PIPEINT_DP_WELFARE_HPP_
