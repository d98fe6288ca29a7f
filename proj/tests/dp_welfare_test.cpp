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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pipeint/bounds.hpp"
#include "pipeint/dp_welfare.hpp"
#include "pipeint/generators.hpp"
#include "support/reference.hpp"

namespace pipeint {
namespace {

TEST(Welfare, Example7IsExact) {
  const auto in = gen_example7(3, 0.1, 1.0);
  const auto [rep, plan] = solve_social_welfare(in, 0.05);
  EXPECT_NEAR(rep.objective_value, 0.40, 1e-12);
  EXPECT_GE(rep.objective_value, 0.40 - 3 * 1 * 0.05);
  EXPECT_TRUE(check_plan(in, plan).empty());
  EXPECT_EQ(rep.meta.epsilon, 0.05);
}

TEST(Welfare, ZeroBudgetGivesInitialWelfare) {
  auto in = gen_random(3, 3, 3, 1.0, 0.0);
  const auto [rep, plan] = solve_social_welfare(in, 0.2);
  EXPECT_EQ(plan.matrices, in.initial_matrices);
  EXPECT_NEAR(rep.objective_value, initial_welfare(in), 1e-15);
}

TEST(Welfare, ReportIsReEvaluatedFromThePlan) {
  const auto in = gen_random(4, 2, 4, 0.7, 0.8);
  const auto [rep, plan] = solve_social_welfare(in, 0.1);
  const auto r = ref::population_rewards(in, plan.matrices);
  EXPECT_NEAR(rep.objective_value, ref::weighted(r, in.initial_distribution), 1e-12);
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_NEAR(rep.per_population_rewards[j], r[j], 1e-12);
  EXPECT_NEAR(rep.budget_used, ref::plan_cost(in, plan.matrices), 1e-12);
}

TEST(Welfare, ApproximationBoundAgainstGridOptimum) {
  for (std::uint64_t seed = 100; seed < 108; ++seed) {
    const double B = seed % 2 ? 0.5 : 1.0;
    const auto in = gen_random(seed, 2, 3, 1.0, B);
    const double eps = 0.05;
    const auto [rep, plan] = solve_social_welfare(in, eps);
    const auto g = ref::grid_optima(in, 0.05);
    EXPECT_GE(rep.objective_value, g.welfare - 3 * 2 * eps * in.reward_norm()) << seed;
    EXPECT_TRUE(check_plan(in, plan).empty());
    EXPECT_LE(rep.objective_value, welfare_upper_bound(in) + 1e-6);
  }
}

TEST(Welfare, PartialMasksAndUnequalWidths) {
  for (std::uint64_t seed = 200; seed < 210; ++seed) {
    const auto in = gen_random_sizes(seed, {2, 3, 2}, 0.6, 0.7);
    const auto [rep, plan] = solve_social_welfare(in, 0.1);
    EXPECT_TRUE(check_plan(in, plan).empty()) << seed;
    const auto g = ref::grid_optima(in, 0.1);
    EXPECT_GE(rep.objective_value, g.welfare - 3 * 2 * 0.1 * in.reward_norm()) << seed;
    EXPECT_GE(rep.objective_value, initial_welfare(in) - 1e-12);
  }
}

TEST(Welfare, WeightedCostModel) {
  auto in = gen_random(301, 2, 3, 1.0, 0.6);
  in.cost_model.kind = CostKind::kWeightedL1;
  std::mt19937_64 rng(5);
  for (std::size_t t = 0; t < in.num_transitions(); ++t) {
    Matrix w(in.layer_sizes[t + 1], in.layer_sizes[t]);
    for (auto& x : w.data()) x = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    in.cost_model.weights.push_back(w);
  }
  const auto [rep, plan] = solve_social_welfare(in, 0.1);
  EXPECT_TRUE(check_plan(in, plan).empty());
  EXPECT_LE(ref::plan_cost(in, plan.matrices), in.budget + 1e-9);
  const auto g = ref::grid_optima(in, 0.05);
  EXPECT_GE(rep.objective_value, g.welfare - 3 * 2 * 0.1 * in.reward_norm());
}

// The budget-rounding construction: shrinking each layer of a plan onto the
// budget grid loses at most (k-1) eps ||R||.
TEST(Welfare, BudgetGridRoundingLoss) {
  for (std::uint64_t seed = 400; seed < 420; ++seed) {
    const auto in = gen_random(seed, 3, 4, 1.0, 0.9);
    const double eps = 0.1;
    std::mt19937_64 rng(seed);
    auto p = zero_budget_plan(in);
    double left = in.budget;
    for (std::size_t t = 0; t < p.matrices.size(); ++t) {
      const auto target = ref::random_stochastic(rng, p.matrices[t].rows(), p.matrices[t].cols());
      const double full = ref::l1(target, in.initial_matrices[t]);
      const double a = std::min(1.0, left / 2 / full);
      for (std::size_t i = 0; i < target.size(); ++i)
        p.matrices[t].data()[i] = (1 - a) * in.initial_matrices[t].data()[i] + a * target.data()[i];
      left -= ref::l1(p.matrices[t], in.initial_matrices[t]);
    }
    auto q = p;
    double total = 0.0;
    for (std::size_t t = 0; t < q.matrices.size(); ++t) {
      const double c = ref::l1(p.matrices[t], in.initial_matrices[t]);
      const double bt = std::floor(c / eps + 1e-12) * eps;
      const double f = c > 0 ? bt / c : 0.0;
      for (std::size_t i = 0; i < q.matrices[t].size(); ++i) {
        const double m0 = in.initial_matrices[t].data()[i];
        q.matrices[t].data()[i] = m0 + f * (p.matrices[t].data()[i] - m0);
      }
      total += bt;
    }
    EXPECT_LE(total, build_budget_grid(in.budget, eps).top() + 1e-12);
    const double wp = ref::weighted(ref::population_rewards(in, p.matrices), in.initial_distribution);
    const double wq = ref::weighted(ref::population_rewards(in, q.matrices), in.initial_distribution);
    EXPECT_GE(wq, wp - 3 * eps * in.reward_norm() - 1e-12);
  }
}

TEST(Welfare, ThreadsDoNotChangeTheResult) {
  const auto in = gen_random(7, 3, 3, 0.8, 1.0);
  DpOptions one, three;
  three.threads = 3;
  const auto a = solve_social_welfare(in, 0.15, one);
  const auto b = solve_social_welfare(in, 0.15, three);
  EXPECT_EQ(a.second, b.second);
  EXPECT_EQ(a.first.objective_value, b.first.objective_value);
  EXPECT_EQ(a.first.meta.cells, b.first.meta.cells);
}

TEST(BestResponse, PointMassMaximizesThatPopulation) {
  const auto in = gen_random(8, 2, 3, 1.0, 0.5);
  const auto g = ref::grid_optima(in, 0.05, true);
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> e(2, 0.0);
    e[j] = 1.0;
    const auto [value, plan] = best_response(in, e, 0.05);
    double best_j = 0.0;
    for (const auto& r : g.all_rewards) best_j = std::max(best_j, r[j]);
    EXPECT_NEAR(value, evaluate_population_rewards(in, plan)[j], 1e-12);
    EXPECT_GE(value, best_j - 3 * 2 * 0.05);
  }
}

TEST(BestResponse, OwnDistributionMatchesWelfareSolve) {
  const auto in = gen_random(9, 3, 3, 1.0, 0.7);
  const auto [rep, plan] = solve_social_welfare(in, 0.2);
  const auto [value, plan2] = best_response(in, in.initial_distribution, 0.2);
  EXPECT_EQ(plan, plan2);
  EXPECT_EQ(value, rep.objective_value);
}

TEST(BestResponse, TwoLayersMatchTheGridOracle) {
  std::mt19937_64 rng(10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto in = gen_random(seed, 2, 2, 1.0, 0.6);
    const auto d = ref::random_distribution(rng, 2);
    const auto [value, plan] = best_response(in, d, 0.05);
    const auto g = ref::grid_optima(in, 0.01, true);
    double best = 0.0;
    for (const auto& r : g.all_rewards) best = std::max(best, ref::weighted(r, d));
    EXPECT_GE(value, best - 1e-9);
    EXPECT_LE(value, best + 0.02);
  }
}

TEST(BestResponse, RejectsBadDistributions) {
  const auto in = gen_random(11, 2, 3, 1.0, 0.7);
  EXPECT_THROW(best_response(in, std::vector<double>{0.5}, 0.1), InputError);
  EXPECT_THROW(best_response(in, std::vector<double>{0.7, 0.7}, 0.1), InputError);
  EXPECT_THROW(solve_social_welfare(in, 0.0), InputError);
}

TEST(Welfare, SizeCapRefusal) {
  const auto in = gen_random(12, 4, 3, 1.0, 1.0);
  DpOptions opt;
  opt.cap = 1000;
  EXPECT_THROW(solve_social_welfare(in, 0.1, opt), SizeCapError);
}

}  // namespace
}  // namespace pipeint
