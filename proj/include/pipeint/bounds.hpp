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

#ifndef PIPEINT_BOUNDS_HPP_
#define PIPEINT_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pipeint/dp_maximin.hpp"
#include "pipeint/dp_welfare.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/model.hpp"

namespace pipeint {

// min(||R||_inf, W0 + B/2 ||R||_inf)
inline double welfare_upper_bound(const Instance& in) {
  const double rn = in.reward_norm();
  return std::min(rn, initial_welfare(in) + 0.5 * in.budget * rn);
}

// min(1, B / 2w) ||R||_inf with w the widest layer; needs every edge
// malleable.
inline double maximin_lower_bound(const Instance& in) {
  if (!in.all_malleable())
    throw InputError("maximin lower bound requires every edge to be malleable");
  const double w = static_cast<double>(in.width());
  return std::min(1.0, in.budget / (2.0 * w)) * in.reward_norm();
}

// Analytic ceiling on the welfare ratio between the welfare optimum and any
// maximin optimum.
inline double price_of_fairness_upper(double B, std::size_t width) {
  const double w = static_cast<double>(width);
  if (B <= 2.0) return w + 1.0;
  if (B <= 2.0 * w) return 2.0 * w / B;
  return 1.0;
}

struct PofCertificate {
  double epsilon = 0.0;
  double welfare_opt_estimate = 0.0;  // welfare of the welfare plan
  double fair_welfare_proxy = 0.0;    // welfare of the maximin plan
  double fair_maximin_value = 0.0;
  double slack = 0.0;                 // 3 (k-1) eps ||R||_inf
  InterventionPlan welfare_plan;
  InterventionPlan maximin_plan;
  std::string note;
};

struct PofBracket {
  double lower = 0.0;
  double upper = 0.0;
  PofCertificate certificate;
};

// Numerical audit: the ratio of solver welfare to the welfare of the
// solver's maximin plan, next to the analytic ceiling. The maximin plan's
// welfare is a proxy for the welfare of an exact maximin optimum.
inline PofBracket price_of_fairness_bracket(const Instance& in, double eps,
                                            const DpOptions& opt = {}) {
  if (!in.all_malleable())
    throw InputError("price-of-fairness bracket requires every edge to be malleable");
  auto [wrep, wplan] = solve_social_welfare(in, eps, opt);
  auto [mrep, mplan] = solve_expost_maximin(in, eps, opt);
  PofBracket b;
  auto& c = b.certificate;
  c.epsilon = eps;
  c.welfare_opt_estimate = wrep.objective_value;
  c.fair_welfare_proxy = welfare(in, mplan);
  c.fair_maximin_value = mrep.objective_value;
  c.slack = 3.0 * static_cast<double>(in.num_layers() - 1) * eps * in.reward_norm();
  c.welfare_plan = std::move(wplan);
  c.maximin_plan = std::move(mplan);
  c.note =
      "lower = solver welfare / welfare of solver maximin plan; both solutions "
      "carry the slack above, the ratio itself is reported without it";
  if (c.fair_welfare_proxy > 0.0) {
    b.lower = c.welfare_opt_estimate / c.fair_welfare_proxy;
  } else {
    b.lower = c.welfare_opt_estimate > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  b.upper = price_of_fairness_upper(in.budget, in.width());
  return b;
}

struct BoundCheck {
  std::string name;
  bool applicable = false;
  bool passed = true;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

struct PlanAudit {
  std::vector<BoundCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const BoundCheck& c) { return !c.applicable || c.passed; });
  }
  const BoundCheck& get(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw InputError("no audit check named " + name);
  }
};

struct AuditOptions {
  // The plan is an exact maximin optimum (over the search space it came
  // from); enables the maximin-optimum checks.
  bool maximin_optimum = false;
  double value_slack = 0.0;       // subtracted from the maximin floor
  double spend_tolerance = 1e-9;  // |cost - B| allowance for full spending
};

inline PlanAudit check_plan_bounds(const Instance& in, const InterventionPlan& plan,
                                   const AuditOptions& opt = {}) {
  require_feasible(in, plan);
  PlanAudit a;
  const double rn = in.reward_norm();
  const double w0 = initial_welfare(in);
  const auto rewards = evaluate_population_rewards(in, plan);
  const double w = dot(rewards, in.initial_distribution);
  const double mm = *std::min_element(rewards.begin(), rewards.end());
  const bool all_mal = in.all_malleable();

  {
    BoundCheck c{"ub_opt", true, false, w, welfare_upper_bound(in), ""};
    c.passed = c.lhs <= c.rhs + 1e-6;
    c.note = "welfare <= min(||R||, W0 + B/2 ||R||)";
    a.checks.push_back(c);
  }
  {
    BoundCheck c{"lb_maxmin", all_mal && opt.maximin_optimum, true, mm, 0.0, ""};
    c.rhs = all_mal ? maximin_lower_bound(in) - opt.value_slack : 0.0;
    c.passed = c.lhs >= c.rhs;
    c.note = all_mal ? "maximin value >= min(1, B/2w) ||R|| - slack"
                     : "informational: needs every edge malleable";
    if (all_mal && !opt.maximin_optimum) c.note = "informational: plan is not a maximin optimum";
    a.checks.push_back(c);
  }
  {
    BoundCheck c{"lb_maxmin_w0", all_mal && opt.maximin_optimum, true, w, w0 - 1e-9, ""};
    c.passed = c.lhs >= c.rhs;
    c.note = c.applicable ? "welfare of a maximin optimum >= W0"
                          : "informational: needs an all-malleable maximin optimum";
    a.checks.push_back(c);
  }
  {
    const double spent = plan_cost(in, plan);
    const bool app = all_mal && opt.maximin_optimum && w < rn;
    BoundCheck c{"maxmin_equalspending", app, true, spent, in.budget, ""};
    c.passed = std::abs(spent - in.budget) <= opt.spend_tolerance;
    c.note = app ? "a maximin optimum with welfare < ||R|| spends the whole budget"
                 : "informational: needs an all-malleable maximin optimum with welfare < ||R||";
    a.checks.push_back(c);
  }
  return a;
}

}  // namespace pipeint

#endif  // PIPEINT_BOUNDS_HPP_
