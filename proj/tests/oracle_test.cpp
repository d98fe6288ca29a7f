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

#include "pipeint/generators.hpp"
#include "pipeint/oracle.hpp"
#include "support/reference.hpp"

namespace pipeint {
namespace {

TEST(Oracle, Example7) {
  const auto in = gen_example7(3, 0.1, 1.0);
  EXPECT_NEAR(oracle_welfare(in, 0.05).value, 0.40, 1e-12);
  EXPECT_NEAR(oracle_expost_maximin(in, 1.0 / 12.0).value, 1.0 / 6.0, 1e-12);
  // Symmetric populations: mixing does not help.
  EXPECT_NEAR(oracle_exante_maximin(in, 1.0 / 12.0).value, 1.0 / 6.0, 1e-9);
}

TEST(Oracle, ZeroBudget) {
  const auto in = gen_random(1, 3, 3, 1.0, 0.0);
  const auto r = ref::population_rewards(in, in.initial_matrices);
  EXPECT_EQ(oracle_plan_count(in, 0.1), 1u);
  EXPECT_NEAR(oracle_welfare(in, 0.1).value, ref::weighted(r, in.initial_distribution), 1e-15);
  EXPECT_NEAR(oracle_expost_maximin(in, 0.1).value, ref::minimum(r), 1e-15);
  EXPECT_NEAR(oracle_exante_maximin(in, 0.1).value, ref::minimum(r), 1e-12);
}

TEST(Oracle, MatchesBruteForce) {
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    const auto in = seed % 2 ? gen_random(seed, 2, 3, 0.8, 1.0)
                             : gen_random_sizes(seed, {2, 3, 2}, 0.7, 0.8);
    const double eta = 0.1;
    const auto g = ref::grid_optima(in, eta, true);
    const auto ow = oracle_welfare(in, eta);
    const auto om = oracle_expost_maximin(in, eta);
    const auto oe = oracle_exante_maximin(in, eta);
    EXPECT_NEAR(ow.value, g.welfare, 1e-12) << seed;
    EXPECT_NEAR(om.value, g.maximin, 1e-12) << seed;
    EXPECT_NEAR(oe.value, ref::two_population_mixture_optimum(g.all_rewards), 1e-9) << seed;
    EXPECT_EQ(ow.enumerated, g.all_rewards.size());
    EXPECT_EQ(oracle_plan_count(in, eta), g.all_rewards.size());
    EXPECT_TRUE(check_plan(in, ow.plan).empty());
    EXPECT_TRUE(check_plan(in, om.plan).empty());
    EXPECT_TRUE(check_mixed(in, oe.mixture).empty());
    EXPECT_NEAR(oe.value, oe.lp_value, 1e-9);
  }
}

TEST(Oracle, ExanteDominatesExpost) {
  for (std::uint64_t seed = 50; seed < 54; ++seed) {
    const auto in = gen_random(seed, 3, 3, 1.0, 0.7);
    const double m = oracle_expost_maximin(in, 0.1).value;
    const double e = oracle_exante_maximin(in, 0.1).value;
    EXPECT_GE(e, m - 1e-9) << seed;
  }
}

TEST(Oracle, NestedGridsAreMonotone) {
  for (std::uint64_t seed = 60; seed < 63; ++seed) {
    const auto in = gen_random(seed, 2, 3, 1.0, 0.5);
    EXPECT_GE(oracle_welfare(in, 0.05).value, oracle_welfare(in, 0.1).value - 1e-12);
    EXPECT_GE(oracle_expost_maximin(in, 0.05).value, oracle_expost_maximin(in, 0.1).value - 1e-12);
    EXPECT_GE(oracle_exante_maximin(in, 0.05).value,
              oracle_exante_maximin(in, 0.1).value - 1e-9);
  }
}

TEST(Oracle, SeparationFamily) {
  const auto in = gen_separation(0.6);
  EXPECT_GE(oracle_exante_maximin(in, 0.05).value, 0.1705 - 1e-9);
  EXPECT_GE(oracle_welfare(in, 0.05).value, 0.1705 - 1e-9);
}

TEST(Oracle, WeightedCost) {
  auto in = gen_random(70, 2, 3, 1.0, 0.8);
  in.cost_model.kind = CostKind::kWeightedL1;
  for (std::size_t t = 0; t < in.num_transitions(); ++t) {
    Matrix w(in.layer_sizes[t + 1], in.layer_sizes[t]);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = 1.0 + 0.5 * static_cast<double>(i);
    in.cost_model.weights.push_back(w);
  }
  const auto g = ref::grid_optima(in, 0.1);
  EXPECT_NEAR(oracle_welfare(in, 0.1).value, g.welfare, 1e-12);
  EXPECT_NEAR(oracle_expost_maximin(in, 0.1).value, g.maximin, 1e-12);
}

TEST(Oracle, CapRefusal) {
  const auto in = gen_random(71, 3, 3, 1.0, 1.0);
  OracleOptions opt;
  opt.cap = 100;
  EXPECT_GT(oracle_plan_count(in, 0.1, 100), 100u);
  EXPECT_THROW(oracle_welfare(in, 0.1, opt), SizeCapError);
  EXPECT_THROW(oracle_exante_maximin(in, 0.1, opt), SizeCapError);
  EXPECT_THROW(oracle_welfare(in, 0.0), InputError);
}

}  // namespace
}  // namespace pipeint
