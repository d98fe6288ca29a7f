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

#include <algorithm>
#include <random>

#include "pipeint/layerlp.hpp"
#include "pipeint/model.hpp"
#include "support/reference.hpp"

namespace pipeint {
namespace {

// A one-transition instance whose grid plans are the candidate step matrices.
Instance step_instance(const Matrix& m0, const Mask& mask, std::vector<double> r,
                       std::vector<double> d, double budget) {
  Instance in;
  in.layer_sizes = {m0.cols(), m0.rows()};
  in.initial_matrices = {m0};
  in.malleable = {mask};
  in.rewards = std::move(r);
  in.initial_distribution = std::move(d);
  in.budget = budget;
  return in;
}

double grid_welfare_max(const Instance& in, double eta) {
  double best = -1.0;
  ref::for_each_grid_plan(in, eta, [&](const std::vector<Matrix>& ms) {
    best = std::max(best, ref::weighted(ref::population_rewards(in, ms), in.initial_distribution));
  });
  return best;
}

// max over grid plans of min_j r^T M a_j.
double grid_maximin_max(const Instance& in, const Matrix& a, double eta) {
  double best = -1.0;
  ref::for_each_grid_plan(in, eta, [&](const std::vector<Matrix>& ms) {
    const auto row = ref::population_rewards(in, ms);
    double lo = 1e300;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t u = 0; u < a.rows(); ++u) s += row[u] * a(u, j);
      lo = std::min(lo, s);
    }
    best = std::max(best, lo);
  });
  return best;
}

void expect_step_feasible(const LayerStepResult& res, const Matrix& m0, const Mask& mask,
                          double budget, const LayerCost& lc = {}) {
  ASSERT_EQ(res.lp_status, LpStatus::kOptimal);
  const Matrix& m = res.matrix;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      EXPECT_GE(m(r, c), 0.0);
      EXPECT_LE(m(r, c), 1.0);
      if (!mask(r, c)) {
        EXPECT_EQ(m(r, c), m0(r, c));
      }
      s += m(r, c);
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  EXPECT_LE(cost_model_evaluate(lc, m, m0), budget + 1e-7);
  EXPECT_NEAR(res.cost, cost_model_evaluate(lc, m, m0), 1e-12);
}

Matrix example7_m0() {
  Matrix m0(2, 3, 0.0);
  for (std::size_t u = 0; u < 3; ++u) m0(1, u) = 1.0;
  return m0;
}

TEST(WelfareStep, ZeroBudgetReturnsInitial) {
  std::mt19937_64 rng(30);
  const auto m0 = ref::random_stochastic(rng, 3, 3);
  const std::vector<double> r{0.2, 1.0, 0.5}, d{0.3, 0.3, 0.4};
  for (auto method : {StepMethod::kAuto, StepMethod::kLp}) {
    const auto res = solve_welfare_step(r, d, m0, Mask(3, 3, 1), 0.0, {}, method);
    EXPECT_EQ(res.matrix, m0);
    EXPECT_NEAR(res.objective, dot(vec_mat(r, m0), d), 1e-15);
  }
}

TEST(WelfareStep, Example7) {
  const std::vector<double> r{1.0, 0.0}, d{0.8, 0.1, 0.1};
  for (auto method : {StepMethod::kAuto, StepMethod::kLp}) {
    const auto res = solve_welfare_step(r, d, example7_m0(), Mask(2, 3, 1), 1.0, {}, method);
    EXPECT_NEAR(res.objective, 0.4, 1e-12);
    EXPECT_NEAR(res.matrix(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(res.matrix(1, 0), 0.5, 1e-12);
    expect_step_feasible(res, example7_m0(), Mask(2, 3, 1), 1.0);
  }
}

TEST(MaximinStep, Example7) {
  const std::vector<double> r{1.0, 0.0};
  const auto res = solve_maximin_step(r, identity_matrix(3), example7_m0(), Mask(2, 3, 1), 1.0);
  EXPECT_NEAR(res.objective, 1.0 / 6.0, 1e-12);
  for (std::size_t u = 0; u < 3; ++u) {
    EXPECT_NEAR(res.matrix(0, u), 1.0 / 6.0, 1e-9);
    EXPECT_NEAR(res.matrix(1, u), 5.0 / 6.0, 1e-9);
  }
  expect_step_feasible(res, example7_m0(), Mask(2, 3, 1), 1.0);
}

TEST(MaximinStep, ZeroBudget) {
  std::mt19937_64 rng(31);
  const auto m0 = ref::random_stochastic(rng, 2, 2);
  const std::vector<double> r{0.3, 0.9};
  const auto res = solve_maximin_step(r, identity_matrix(2), m0, Mask(2, 2, 1), 0.0);
  EXPECT_EQ(res.matrix, m0);
  const auto row = vec_mat(r, m0);
  EXPECT_NEAR(res.objective, std::min(row[0], row[1]), 1e-15);
}

TEST(WelfareStep, RandomTwoByTwoAgainstGrid) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m0 = ref::random_stochastic(rng, 2, 2);
    const std::vector<double> r{U(rng), U(rng)};
    const auto d = ref::random_distribution(rng, 2);
    const double b = 0.05 + U(rng);
    const auto in = step_instance(m0, Mask(2, 2, 1), r, d, b);
    const double grid = grid_welfare_max(in, 0.01);
    for (auto method : {StepMethod::kAuto, StepMethod::kLp}) {
      const auto res = solve_welfare_step(r, d, m0, Mask(2, 2, 1), b, {}, method);
      EXPECT_GE(res.objective, grid - 1e-9);
      EXPECT_LE(res.objective, grid + 0.02);
      expect_step_feasible(res, m0, Mask(2, 2, 1), b);
    }
  }
}

TEST(MaximinStep, RandomTwoPopulationAgainstGrid) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m0 = ref::random_stochastic(rng, 2, 2);
    const std::vector<double> r{U(rng), U(rng)};
    const auto a = ref::random_stochastic(rng, 2, 2);
    const double b = 0.05 + U(rng);
    const auto in = step_instance(m0, Mask(2, 2, 1), r, {0.5, 0.5}, b);
    const double grid = grid_maximin_max(in, a, 0.01);
    const auto res = solve_maximin_step(r, a, m0, Mask(2, 2, 1), b);
    EXPECT_GE(res.objective, grid - 1e-9);
    EXPECT_LE(res.objective, grid + 0.02);
    expect_step_feasible(res, m0, Mask(2, 2, 1), b);
  }
}

TEST(MaximinStep, SinglePopulationIsTheWelfareStep) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m0 = ref::random_stochastic(rng, 3, 3);
    Mask mask(3, 3);
    for (auto& x : mask.data()) x = U(rng) < 0.7;
    const std::vector<double> r{U(rng), U(rng), U(rng)};
    const auto d = ref::random_distribution(rng, 3, true);
    Matrix a(3, 1);
    for (std::size_t i = 0; i < 3; ++i) a(i, 0) = d[i];
    const double b = U(rng);
    const auto w = solve_welfare_step(r, d, m0, mask, b);
    const auto m = solve_maximin_step(r, a, m0, mask, b);
    EXPECT_NEAR(w.objective, m.objective, 1e-9);
  }
}

TEST(WelfareStep, GreedyAgreesWithLpOnPartialMasks) {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 4;
    const auto m0 = ref::random_stochastic(rng, rows, cols);
    Mask mask(rows, cols);
    for (auto& x : mask.data()) x = U(rng) < 0.6;
    std::vector<double> r(rows);
    for (auto& x : r) x = U(rng) < 0.2 ? 0.5 : U(rng);  // some ties
    const auto d = ref::random_distribution(rng, cols, true);
    const double b = U(rng) * 2.5;
    const auto g = solve_welfare_step(r, d, m0, mask, b, {}, StepMethod::kAuto);
    const auto l = solve_welfare_step(r, d, m0, mask, b, {}, StepMethod::kLp);
    EXPECT_NEAR(g.objective, l.objective, 1e-9) << "trial " << trial;
    EXPECT_GE(g.objective, dot(vec_mat(r, m0), d) - 1e-12);
    expect_step_feasible(g, m0, mask, b);
    expect_step_feasible(l, m0, mask, b);
  }
}

TEST(Steps, MonotoneInBudget) {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m0 = ref::random_stochastic(rng, 3, 3);
    const std::vector<double> r{U(rng), U(rng), U(rng)};
    const auto d = ref::random_distribution(rng, 3);
    const auto a = ref::random_stochastic(rng, 3, 2);
    double pw = -1.0, pm = -1.0;
    for (double b = 0.0; b <= 2.0; b += 0.25) {
      const double w = solve_welfare_step(r, d, m0, Mask(3, 3, 1), b).objective;
      const double m = solve_maximin_step(r, a, m0, Mask(3, 3, 1), b).objective;
      EXPECT_GE(w, pw - 1e-12);
      EXPECT_GE(m, pm - 1e-9);
      pw = w;
      pm = m;
    }
  }
}

TEST(Steps, WeightedCostAgainstGrid) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 15; ++trial) {
    const auto m0 = ref::random_stochastic(rng, 3, 2);
    Matrix w(3, 2);
    for (auto& x : w.data()) x = 0.5 + 2.0 * U(rng);
    const std::vector<double> r{U(rng), U(rng), U(rng)};
    const auto d = ref::random_distribution(rng, 2);
    const double b = 0.2 + U(rng);
    auto in = step_instance(m0, Mask(3, 2, 1), r, d, b);
    in.cost_model = {CostKind::kWeightedL1, {w}};
    const LayerCost lc{CostKind::kWeightedL1, &w};
    const double grid = grid_welfare_max(in, 0.02);
    const auto res = solve_welfare_step(r, d, m0, Mask(3, 2, 1), b, lc);
    EXPECT_GE(res.objective, grid - 1e-9);
    EXPECT_LE(res.objective, grid + 0.1);
    expect_step_feasible(res, m0, Mask(3, 2, 1), b, lc);

    const auto a = ref::random_stochastic(rng, 2, 2);
    const double gm = grid_maximin_max(in, a, 0.02);
    const auto mm = solve_maximin_step(r, a, m0, Mask(3, 2, 1), b, lc);
    EXPECT_GE(mm.objective, gm - 1e-9);
    EXPECT_LE(mm.objective, gm + 0.1);
    expect_step_feasible(mm, m0, Mask(3, 2, 1), b, lc);
  }
}

TEST(Steps, UniformWeightTwoHalvesTheBudget) {
  std::mt19937_64 rng(38);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto m0 = ref::random_stochastic(rng, 3, 3);
  const Matrix w(3, 3, 2.0);
  const LayerCost lc{CostKind::kWeightedL1, &w};
  const std::vector<double> r{U(rng), U(rng), U(rng)};
  const auto d = ref::random_distribution(rng, 3);
  const double a = solve_welfare_step(r, d, m0, Mask(3, 3, 1), 0.8, lc).objective;
  const double b = solve_welfare_step(r, d, m0, Mask(3, 3, 1), 0.4).objective;
  EXPECT_NEAR(a, b, 1e-9);
}

TEST(CostModel, Evaluate) {
  std::mt19937_64 rng(39);
  const auto m0 = ref::random_stochastic(rng, 3, 3);
  const Matrix w2(3, 3, 2.0);
  EXPECT_EQ(cost_model_evaluate({}, m0, m0), 0.0);
  EXPECT_EQ(cost_model_evaluate({CostKind::kWeightedL1, &w2}, m0, m0), 0.0);
  Matrix a(2, 1), b(2, 1);
  a(0, 0) = 1.0;
  b(0, 0) = 0.5;
  b(1, 0) = 0.5;
  const Matrix w21(2, 1, 2.0);
  EXPECT_DOUBLE_EQ(cost_model_evaluate({CostKind::kWeightedL1, &w21}, a, b), 2.0);
  for (int i = 0; i < 100; ++i) {
    Matrix w(3, 3);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    for (auto& x : w.data()) x = U(rng);
    const double lmin = *std::min_element(w.data().begin(), w.data().end());
    const auto m = ref::random_stochastic(rng, 3, 3);
    EXPECT_GE(cost_model_evaluate({CostKind::kWeightedL1, &w}, m, m0), lmin * cost(m, m0) - 1e-15);
  }
  Matrix bad(3, 3, 1.0);
  bad(1, 1) = 0.0;
  EXPECT_THROW(cost_model_evaluate({CostKind::kWeightedL1, &bad}, m0, m0), InputError);
}

TEST(Steps, InputErrors) {
  const std::vector<double> r{1.0, 0.0}, d{0.5, 0.5};
  const Matrix m0 = identity_matrix(2);
  EXPECT_THROW(solve_welfare_step(r, d, m0, Mask(2, 2, 1), -0.1), InputError);
  EXPECT_THROW(solve_welfare_step(r, d, m0, Mask(3, 2, 1), 0.1), InputError);
  const std::vector<double> d3{0.2, 0.3, 0.5};
  EXPECT_THROW(solve_welfare_step(r, d3, m0, Mask(2, 2, 1), 0.1), InputError);
  EXPECT_THROW(solve_maximin_step(r, Matrix(2, 0), m0, Mask(2, 2, 1), 0.1), InputError);
}

}  // namespace
}  // namespace pipeint
