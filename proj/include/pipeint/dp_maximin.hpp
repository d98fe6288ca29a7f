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

#ifndef PIPEINT_DP_MAXIMIN_HPP_
#define PIPEINT_DP_MAXIMIN_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pipeint/detail/dp_engine.hpp"
#include "pipeint/dp_welfare.hpp"
#include "pipeint/layerlp.hpp"
#include "pipeint/model.hpp"
#include "pipeint/netgrid.hpp"

namespace pipeint {

namespace detail {

// Cells at node layer t >= 1 are tuples of net points, one per population.
class MaximinPolicy {
 public:
  MaximinPolicy(std::shared_ptr<const Instance> in, double eps,
                const DpOptions& opt)
      : in_(std::move(in)), pops_(in_->layer_sizes[0]) {
    const std::size_t k = in_->num_layers();
    points_.resize(k);
    base_.assign(k, 1);
    cells_.assign(k, 1);
    for (std::size_t t = 1; t + 1 < k; ++t) {
      SimplexNet net(in_->layer_sizes[t], eps, opt.cap);
      PopulationNet pn(net.size(), pops_, opt.cap);
      base_[t] = net.size();
      cells_[t] = pn.size();
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

  std::uint64_t cells_per_budget(std::size_t t) const { return cells_[t]; }
  std::uint64_t max_net_size() const { return max_net_; }

  void cell_input(std::size_t t, std::uint64_t c, Matrix& out) const {
    const std::size_t d = in_->layer_sizes[t];
    if (out.rows() != d || out.cols() != pops_) out = Matrix(d, pops_);
    // Mixed radix, first population slowest.
    for (std::size_t j = pops_; j-- > 0;) {
      const std::uint64_t idx = c % base_[t];
      c /= base_[t];
      for (std::size_t r = 0; r < d; ++r) out(r, j) = points_[t][idx * d + r];
    }
  }

  LayerStepResult step(std::size_t t, std::span<const double> rho,
                       const Matrix& input, double beta) const {
    return solve_maximin_step(rho, input, in_->initial_matrices[t],
                              in_->malleable[t], beta, in_->cost_model.layer(t));
  }

 private:
  std::shared_ptr<const Instance> in_;
  std::size_t pops_;
  std::vector<std::vector<double>> points_;
  std::vector<std::uint64_t> base_;
  std::vector<std::uint64_t> cells_;
  std::uint64_t max_net_ = 1;
};

}  // namespace detail

// Backward dynamic program over (budget, population tuple) cells; the root
// tuple is the identity (population j starts at node j). The reported
// objective is the exact maximin value of the reconstructed plan.
inline std::pair<SolveReport, InterventionPlan> solve_expost_maximin(
    const Instance& in, double eps, const DpOptions& opt = {}) {
  require_valid(in);
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  if (in.layer_sizes[0] == 1) {
    auto [rep, plan] = solve_social_welfare(in, eps, opt);
    auto out = make_report(in, plan, Objective::kMaximin);
    out.meta = rep.meta;
    out.meta.extra["delegated_to_welfare"] = 1.0;
    return {std::move(out), std::move(plan)};
  }
  auto shared = std::make_shared<const Instance>(in);
  detail::MaximinPolicy pol(shared, eps, opt);
  auto tabs = detail::build_tables(*shared, eps, pol, opt);
  auto root = detail::solve_root(*shared, tabs, pol,
                                 identity_matrix(in.layer_sizes[0]));
  auto rep = make_report(in, root.plan, Objective::kMaximin);
  const auto t1 = std::chrono::steady_clock::now();
  rep.meta.epsilon = eps;
  rep.meta.cells = tabs.cells + 1;
  rep.meta.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rep.meta.extra["grid_points"] = static_cast<double>(tabs.grid.size());
  rep.meta.extra["net_size_max"] = static_cast<double>(pol.max_net_size());
  rep.meta.extra["step_solves"] = static_cast<double>(tabs.step_solves + root.solves);
  rep.meta.extra["dp_value"] = root.dp_value;
  return {std::move(rep), std::move(root.plan)};
}

}  // namespace pipeint

#endif  // PIPEINT_DP_MAXIMIN_HPP_
