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

#ifndef PIPEINT_CLI_HPP_
#define PIPEINT_CLI_HPP_

#include <cstdint>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pipeint/bounds.hpp"
#include "pipeint/dp_maximin.hpp"
#include "pipeint/dp_welfare.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/exante.hpp"
#include "pipeint/generators.hpp"
#include "pipeint/io.hpp"
#include "pipeint/model.hpp"
#include "pipeint/oracle.hpp"

namespace pipeint::cli {

enum ExitCode : int { kOk = 0, kSolverFailure = 1, kBadInput = 2, kTooLarge = 3 };

struct Flags {
  std::string instance;
  double epsilon = 0.05;
  std::size_t rounds = 0;
  double grid = 0.05;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
  int threads = 1;
  std::uint64_t cap = kDefaultSizeCap;
  std::optional<double> br_epsilon;
  std::string objective = "all";
  std::string plan;
  bool bracket = false;

  std::string family;
  std::size_t w = 3;
  double pop_eps = 0.1;
  double B = 1.0;
  std::string graph;
  std::size_t kappa = 2;
  double h_eps = 0.25;
  std::optional<std::size_t> k;
  double malleable_fraction = 1.0;
};

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
  if (!f) throw InputError("failed writing " + path);
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline void write_csv(const std::string& path, const std::vector<double>& rewards) {
  std::ostringstream os;
  write_population_csv(os, rewards);
  write_text(path, os.str());
}

inline DpOptions dp_options(const Flags& f) {
  if (f.threads < 1) throw InputError("--threads must be >= 1");
  DpOptions o;
  o.threads = f.threads;
  o.cap = f.cap;
  return o;
}

inline void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

inline int cmd_validate(const Flags& f, std::ostream& out) {
  const Instance in = parse_instance(f.instance);
  Json j;
  j["valid"] = true;
  j["layers"] = in.layer_sizes;
  j["digest"] = instance_digest(in);
  emit(out, j);
  return kOk;
}

inline int cmd_solve(const Flags& f, std::ostream& out, Objective obj) {
  const Instance in = parse_instance(f.instance);
  auto [rep, plan] = obj == Objective::kWelfare ? solve_social_welfare(in, f.epsilon, dp_options(f))
                                                : solve_expost_maximin(in, f.epsilon, dp_options(f));
  if (!f.out.empty()) write_json(f.out, plan_to_json(plan));
  if (!f.csv.empty()) write_csv(f.csv, rep.per_population_rewards);
  emit(out, report_to_json(rep));
  return kOk;
}

inline int cmd_exante(const Flags& f, std::ostream& out) {
  const Instance in = parse_instance(f.instance);
  ExanteOptions opt;
  opt.rounds = f.rounds;
  opt.br_epsilon = f.br_epsilon;
  opt.dp = dp_options(f);
  auto res = solve_exante_maximin(in, f.epsilon, opt);
  const auto cert = regret_certificate(res.trace);
  auto& ex = res.report.meta.extra;
  ex["regret_average_payoff"] = cert.average_payoff;
  ex["regret_best_fixed_payoff"] = cert.best_fixed_payoff;
  ex["regret_slack"] = cert.slack;
  ex["regret_holds"] = cert.holds ? 1.0 : 0.0;
  if (!f.out.empty()) write_json(f.out, mixture_to_json(res.mixture));
  if (!f.csv.empty()) write_csv(f.csv, res.report.per_population_rewards);
  emit(out, report_to_json(res.report));
  return kOk;
}

inline SolveReport oracle_report(const Instance& in, const InterventionPlan& p, Objective obj,
                                 double eta, std::uint64_t enumerated) {
  SolveReport r = make_report(in, p, obj);
  r.meta.epsilon = eta;
  r.meta.cells = enumerated;
  return r;
}

inline int cmd_oracle(const Flags& f, std::ostream& out) {
  const Instance in = parse_instance(f.instance);
  const std::string& o = f.objective;
  if (o != "all" && o != "welfare" && o != "maximin" && o != "exante")
    throw InputError("--objective must be all, welfare, maximin or exante");
  OracleOptions opt;
  opt.cap = f.cap;
  Json j = Json::object();
  std::vector<double> csv_rows;
  if (o == "all" || o == "welfare") {
    auto r = oracle_welfare(in, f.grid, opt);
    auto rep = oracle_report(in, r.plan, Objective::kWelfare, f.grid, r.enumerated);
    if (o == "welfare") {
      if (!f.out.empty()) write_json(f.out, plan_to_json(r.plan));
      csv_rows = rep.per_population_rewards;
    }
    j["welfare"] = report_to_json(rep);
  }
  if (o == "all" || o == "maximin") {
    auto r = oracle_expost_maximin(in, f.grid, opt);
    auto rep = oracle_report(in, r.plan, Objective::kMaximin, f.grid, r.enumerated);
    if (o == "maximin") {
      if (!f.out.empty()) write_json(f.out, plan_to_json(r.plan));
      csv_rows = rep.per_population_rewards;
    }
    j["expost_maximin"] = report_to_json(rep);
  }
  if (o == "all" || o == "exante") {
    auto r = oracle_exante_maximin(in, f.grid, opt);
    const auto ev = evaluate_mixed(in, r.mixture);
    SolveReport rep;
    rep.objective_value = r.value;
    rep.per_population_rewards = ev.per_population_expected;
    for (const auto& e : r.mixture.support)
      rep.budget_used = std::max(rep.budget_used, plan_cost(in, e.plan));
    rep.meta.epsilon = f.grid;
    rep.meta.cells = r.enumerated;
    rep.meta.extra["lp_value"] = r.lp_value;
    rep.meta.extra["iterations"] = static_cast<double>(r.iterations);
    rep.meta.extra["support_size"] = static_cast<double>(r.mixture.support.size());
    // The mixture is the most informative artifact when everything is asked for.
    if (!f.out.empty()) write_json(f.out, mixture_to_json(r.mixture));
    csv_rows = rep.per_population_rewards;
    j["exante_maximin"] = report_to_json(rep);
  }
  if (!f.csv.empty()) write_csv(f.csv, csv_rows);
  emit(out, j);
  return kOk;
}

inline Json audit_to_json(const PlanAudit& a) {
  Json arr = Json::array();
  for (const auto& c : a.checks) {
    Json x;
    x["name"] = c.name;
    x["applicable"] = c.applicable;
    x["passed"] = c.passed;
    x["lhs"] = c.lhs;
    x["rhs"] = c.rhs;
    x["note"] = c.note;
    arr.push_back(std::move(x));
  }
  return arr;
}

inline int cmd_bounds(const Flags& f, std::ostream& out) {
  const Instance in = parse_instance(f.instance);
  Json j;
  j["initial_welfare"] = initial_welfare(in);
  j["welfare_upper_bound"] = welfare_upper_bound(in);
  if (in.all_malleable())
    j["maximin_lower_bound"] = maximin_lower_bound(in);
  else
    j["maximin_lower_bound"] = nullptr;
  j["price_of_fairness_upper"] = price_of_fairness_upper(in.budget, in.width());
  if (f.bracket) {
    const auto b = price_of_fairness_bracket(in, f.epsilon, dp_options(f));
    Json x;
    x["lower"] = b.lower;
    x["upper"] = b.upper;
    x["epsilon"] = b.certificate.epsilon;
    x["welfare_opt_estimate"] = b.certificate.welfare_opt_estimate;
    x["fair_welfare_proxy"] = b.certificate.fair_welfare_proxy;
    x["fair_maximin_value"] = b.certificate.fair_maximin_value;
    x["slack"] = b.certificate.slack;
    x["note"] = b.certificate.note;
    j["price_of_fairness_bracket"] = std::move(x);
  }
  if (!f.plan.empty()) {
    const auto plan = plan_from_json(read_json_file(f.plan), in);
    j["plan_audit"] = audit_to_json(check_plan_bounds(in, plan));
  }
  emit(out, j);
  return kOk;
}

inline int cmd_gen(const Flags& f, std::ostream& out, std::ostream& err) {
  Instance in;
  Json info = Json::object();
  if (f.family == "example7") {
    in = gen_example7(f.w, f.pop_eps, f.B);
  } else if (f.family == "separation") {
    std::vector<std::string> warnings;
    in = gen_separation(f.B, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
  } else if (f.family == "hardness") {
    Graph g = triangle_graph();
    if (!f.graph.empty()) {
      std::ifstream gf(f.graph);
      if (!gf) throw InputError("cannot open " + f.graph);
      g = parse_edge_list(gf);
    }
    auto hi = gen_hardness(g, f.kappa, f.h_eps, f.k.value_or(15));
    info["threshold"] = hi.threshold;
    info["hardness_budget"] = hi.budget;
    in = std::move(hi.instance);
  } else if (f.family == "random") {
    in = gen_random(f.seed, f.w, f.k.value_or(3), f.malleable_fraction, f.B);
  } else {
    throw InputError("--family must be example7, separation, hardness or random");
  }
  require_valid(in);
  const Json ij = instance_to_json(in);
  if (f.out.empty()) {
    emit(out, ij);
  } else {
    write_json(f.out, ij);
    info["written"] = f.out;
    info["digest"] = instance_digest(in);
    info["layers"] = in.layer_sizes;
    emit(out, info);
  }
  return kOk;
}

}  // namespace detail

// Parses argv-style arguments (without the program name) and runs one
// command. The report goes to `out`, diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budgeted interventions on layered stochastic pipelines", "pipeint"};
  app.require_subcommand(1);
  Flags f;

  auto add_instance = [&](CLI::App* c) {
    c->add_option("--instance", f.instance, "instance JSON")->required();
  };
  auto add_dp = [&](CLI::App* c) {
    c->add_option("--epsilon", f.epsilon, "approximation parameter")->capture_default_str();
    c->add_option("--threads", f.threads, "worker threads")->capture_default_str();
    c->add_option("--cap", f.cap, "size cap on nets, cells and grids")->capture_default_str();
  };
  auto add_outputs = [&](CLI::App* c) {
    c->add_option("--out", f.out, "write plan or mixture JSON here");
    c->add_option("--csv", f.csv, "write per-population rewards CSV here");
  };

  auto* validate = app.add_subcommand("validate", "parse and validate an instance");
  add_instance(validate);

  auto* sw = app.add_subcommand("solve-welfare", "approximate social welfare optimum");
  add_instance(sw);
  add_dp(sw);
  add_outputs(sw);

  auto* sm = app.add_subcommand("solve-maximin", "approximate ex-post maximin optimum");
  add_instance(sm);
  add_dp(sm);
  add_outputs(sm);

  auto* se = app.add_subcommand("solve-exante", "ex-ante maximin via multiplicative weights");
  add_instance(se);
  add_dp(se);
  add_outputs(se);
  se->add_option("--rounds", f.rounds, "rounds T (0 = ceil(2 ln w / eps^2))");
  se->add_option("--br-epsilon", f.br_epsilon, "best-response net parameter");

  auto* orc = app.add_subcommand("oracle", "brute-force grid optimum");
  add_instance(orc);
  add_outputs(orc);
  orc->add_option("--grid", f.grid, "grid step eta")->capture_default_str();
  orc->add_option("--objective", f.objective, "all, welfare, maximin or exante")
      ->capture_default_str();
  orc->add_option("--cap", f.cap, "maximum number of grid plans")->capture_default_str();

  auto* bd = app.add_subcommand("bounds", "analytic bounds and optional plan audit");
  add_instance(bd);
  add_dp(bd);
  bd->add_option("--plan", f.plan, "plan JSON to audit");
  bd->add_flag("--bracket", f.bracket, "also compute the numerical price-of-fairness bracket");

  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("--family", f.family, "example7, separation, hardness or random")->required();
  gen->add_option("--out", f.out, "write the instance here instead of stdout");
  gen->add_option("--w", f.w, "populations (example7) or layer width (random)")
      ->capture_default_str();
  gen->add_option("--pop-eps", f.pop_eps, "example7 population parameter")->capture_default_str();
  gen->add_option("--B", f.B, "budget")->capture_default_str();
  gen->add_option("--graph", f.graph, "edge list for hardness (default: triangle)");
  gen->add_option("--kappa", f.kappa, "cover size for hardness")->capture_default_str();
  gen->add_option("--h-eps", f.h_eps, "hardness hop probability")->capture_default_str();
  gen->add_option("--k", f.k, "path length (hardness, default 15) or layers (random, default 3)");
  gen->add_option("--seed", f.seed, "random seed")->capture_default_str();
  gen->add_option("--malleable-fraction", f.malleable_fraction, "random malleable fraction")
      ->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (validate->parsed()) return detail::cmd_validate(f, out);
    if (sw->parsed()) return detail::cmd_solve(f, out, Objective::kWelfare);
    if (sm->parsed()) return detail::cmd_solve(f, out, Objective::kMaximin);
    if (se->parsed()) return detail::cmd_exante(f, out);
    if (orc->parsed()) return detail::cmd_oracle(f, out);
    if (bd->parsed()) return detail::cmd_bounds(f, out);
    if (gen->parsed()) return detail::cmd_gen(f, out, err);
  } catch (const SizeCapError& e) {
    err << "size cap: " << e.what() << "\n";
    return kTooLarge;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kBadInput;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kBadInput;
}

}  // namespace pipeint::cli

#endif  // PIPEINT_CLI_HPP_
