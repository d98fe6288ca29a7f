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

#ifndef PIPEINT_GENERATORS_HPP_
#define PIPEINT_GENERATORS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pipeint/errors.hpp"
#include "pipeint/matrix.hpp"
#include "pipeint/model.hpp"

namespace pipeint {

namespace detail {

inline Mask full_mask(std::size_t rows, std::size_t cols, bool value = true) {
  return Mask(rows, cols, value ? 1 : 0);
}

}  // namespace detail

// Two layers: w sources, targets (reward 1, reward 0). Every source starts
// on the zero-reward target; the first source holds most of the mass.
inline Instance gen_example7(std::size_t w, double pop_eps, double B) {
  if (w < 2) throw InputError("example7: w must be >= 2");
  if (!(pop_eps > 0.0) || !(pop_eps < 1.0 / static_cast<double>(w - 1)))
    throw InputError("example7: pop_eps must lie in (0, 1/(w-1))");
  if (!(B >= 0.0) || !std::isfinite(B)) throw InputError("example7: budget must be >= 0");
  Instance in;
  in.layer_sizes = {w, 2};
  Matrix m(2, w, 0.0);
  for (std::size_t u = 0; u < w; ++u) m(1, u) = 1.0;
  in.initial_matrices = {m};
  in.malleable = {detail::full_mask(2, w)};
  in.rewards = {1.0, 0.0};
  in.initial_distribution.assign(w, pop_eps);
  in.initial_distribution[0] = 1.0 - static_cast<double>(w - 1) * pop_eps;
  in.budget = B;
  return in;
}

inline constexpr double kSeparationBudgetMax = 0.6;

// Four layers (u1 v1 | u2 v2 x | u3 v3 y | reward z). Each path hop has
// probability 1/2, the rest leaks through x and y into z. Only edges out of
// the path nodes are malleable.
inline Instance gen_separation(double B, std::vector<std::string>* warnings = nullptr) {
  if (!(B > 0.0) || !std::isfinite(B)) throw InputError("separation: budget must be > 0");
  if (B > kSeparationBudgetMax && warnings != nullptr)
    warnings->push_back("separation: budget " + std::to_string(B) +
                        " exceeds 0.6; the ex-ante/ex-post gap is not guaranteed");
  Instance in;
  in.layer_sizes = {2, 3, 3, 2};
  Matrix m1(3, 2, 0.0);
  m1(0, 0) = 0.5; m1(2, 0) = 0.5;  // u1 -> u2, x
  m1(1, 1) = 0.5; m1(2, 1) = 0.5;  // v1 -> v2, x
  Matrix m2(3, 3, 0.0);
  m2(0, 0) = 0.5; m2(2, 0) = 0.5;  // u2 -> u3, y
  m2(1, 1) = 0.5; m2(2, 1) = 0.5;  // v2 -> v3, y
  m2(2, 2) = 1.0;                  // x -> y
  Matrix m3(2, 3, 0.0);
  m3(0, 0) = 0.5; m3(1, 0) = 0.5;  // u3 -> reward, z
  m3(0, 1) = 0.5; m3(1, 1) = 0.5;  // v3 -> reward, z
  m3(1, 2) = 1.0;                  // y -> z
  in.initial_matrices = {m1, m2, m3};
  Mask k1 = detail::full_mask(3, 2);
  Mask k2 = detail::full_mask(3, 3);
  Mask k3 = detail::full_mask(2, 3);
  for (std::size_t v = 0; v < 3; ++v) k2(v, 2) = 0;
  for (std::size_t v = 0; v < 2; ++v) k3(v, 2) = 0;
  in.malleable = {k1, k2, k3};
  in.rewards = {1.0, 0.0};
  in.initial_distribution = {0.5, 0.5};
  in.budget = B;
  return in;
}

// The plan that spends B/3 on each hop of one path (0 = u, 1 = v).
inline InterventionPlan separation_path_plan(const Instance& sep, int path) {
  if (path != 0 && path != 1) throw InputError("separation: path must be 0 or 1");
  InterventionPlan p = zero_budget_plan(sep);
  const double a = sep.budget / 6.0;
  const std::size_t c = static_cast<std::size_t>(path);
  p.matrices[0](c, c) += a;
  p.matrices[0](2, c) -= a;
  p.matrices[1](c, c) += a;
  p.matrices[1](2, c) -= a;
  p.matrices[2](0, c) += a;
  p.matrices[2](1, c) -= a;
  for (std::size_t t = 0; t < 3; ++t) p.budget_split[t] = layer_cost(sep, t, p.matrices[t]);
  return p;
}

struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// One "u v" pair per line, 0-based ids; blank lines and '#' comments are
// skipped.
inline Graph parse_edge_list(std::istream& is) {
  Graph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    long long a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || a < 0 || b < 0)
      throw InputError("edge list: bad line " + std::to_string(lineno));
    std::string rest;
    if (ls >> rest) throw InputError("edge list: trailing data on line " + std::to_string(lineno));
    g.edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    g.n = std::max<std::size_t>(g.n, static_cast<std::size_t>(std::max(a, b)) + 1);
  }
  return g;
}

inline Graph triangle_graph() { return {3, {{0, 1}, {1, 2}, {0, 2}}}; }

struct HardnessInstance {
  Instance instance;
  Graph graph;
  std::size_t path_length = 15;  // number of hops from vertex layer to reward
  std::size_t kappa = 0;
  double h_eps = 0.0;
  double threshold = 0.0;  // (2 h)^k / 4
  double budget = 0.0;     // 2 k kappa h
};

// Vertex-cover reduction. Layers: edges | vertices | (k-1) x (vertex copies
// + leakage) | (y, z). A vertex copy advances with probability h and leaks
// otherwise; the last vertex copies reach y with probability h. Path and
// leakage edges out of vertex copies are malleable, nothing else is.
inline HardnessInstance gen_hardness(const Graph& g, std::size_t kappa, double h,
                                     std::size_t k = 15) {
  if (!(h > 0.0) || !(h < 0.5)) throw InputError("hardness: h_eps must lie in (0, 1/2)");
  if (k < 1) throw InputError("hardness: path length must be >= 1");
  if (g.edges.empty()) throw InputError("hardness: graph has no edges");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : g.edges) {
    if (a >= g.n || b >= g.n) throw InputError("hardness: vertex id out of range");
    if (a == b) throw InputError("hardness: self loop");
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
      throw InputError("hardness: duplicate edge");
  }
  const std::size_t n = g.n;
  const std::size_t m = g.edges.size();
  HardnessInstance hi;
  hi.graph = g;
  hi.path_length = k;
  hi.kappa = kappa;
  hi.h_eps = h;
  hi.threshold = std::pow(2.0 * h, static_cast<double>(k)) / 4.0;
  hi.budget = 2.0 * static_cast<double>(k) * static_cast<double>(kappa) * h;

  Instance& in = hi.instance;
  in.layer_sizes.push_back(m);
  in.layer_sizes.push_back(n);
  for (std::size_t i = 1; i < k; ++i) in.layer_sizes.push_back(n + 1);
  in.layer_sizes.push_back(2);

  Matrix e2v(n, m, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    e2v(g.edges[e].first, e) = 0.5;
    e2v(g.edges[e].second, e) = 0.5;
  }
  in.initial_matrices.push_back(e2v);
  in.malleable.push_back(detail::full_mask(n, m, false));

  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t src = in.layer_sizes[i];
    const std::size_t dst = in.layer_sizes[i + 1];
    const bool last = i == k;
    Matrix mt(dst, src, 0.0);
    Mask mk = detail::full_mask(dst, src, false);
    const std::size_t path_row_leak = last ? 1 : n;  // z or x
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t adv = last ? 0 : v;  // y or next copy
      mt(adv, v) = h;
      mt(path_row_leak, v) = 1.0 - h;
      mk(adv, v) = 1;
      mk(path_row_leak, v) = 1;
    }
    if (src == n + 1) mt(last ? 1 : n, n) = 1.0;  // leakage node is absorbing
    in.initial_matrices.push_back(mt);
    in.malleable.push_back(mk);
  }
  in.rewards = {1.0, 0.0};
  in.initial_distribution.assign(m, 1.0 / static_cast<double>(m));
  in.budget = hi.budget;
  return hi;
}

struct CoverCheck {
  InterventionPlan plan;
  double maximin = 0.0;
  double cost = 0.0;
  bool within_budget = false;
  bool meets_threshold = false;   // maximin >= 2T
  bool equals_threshold = false;  // maximin == 2T exactly
};

// Raises every hop on the paths of the cover vertices by h (taking the mass
// from the paired leakage edge) and evaluates the result exactly.
inline CoverCheck verify_cover_plan(const HardnessInstance& hi,
                                    const std::vector<std::size_t>& cover) {
  const std::size_t n = hi.graph.n;
  std::vector<char> in_cover(n, 0);
  for (auto v : cover) {
    if (v >= n) throw InputError("cover: vertex id out of range");
    in_cover[v] = 1;
  }
  for (auto [a, b] : hi.graph.edges)
    if (!in_cover[a] && !in_cover[b])
      throw InputError("cover: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") is not covered");
  const Instance& in = hi.instance;
  CoverCheck out;
  out.plan = zero_budget_plan(in);
  const std::size_t k = hi.path_length;
  const double h = hi.h_eps;
  for (std::size_t i = 1; i <= k; ++i) {
    Matrix& mt = out.plan.matrices[i];
    const bool last = i == k;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_cover[v]) continue;
      mt(last ? 0 : v, v) += h;
      mt(last ? 1 : n, v) -= h;
    }
  }
  for (std::size_t t = 0; t < out.plan.matrices.size(); ++t)
    out.plan.budget_split[t] = layer_cost(in, t, out.plan.matrices[t]);
  out.cost = plan_cost(in, out.plan);
  out.within_budget = out.cost <= in.budget + kModelTol;
  out.maximin = maximin_value(in, out.plan);
  out.meets_threshold = out.maximin >= 2.0 * hi.threshold;
  out.equals_threshold = out.maximin == 2.0 * hi.threshold;
  return out;
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; identical on every
// platform, unlike std::uniform_real_distribution.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Random instance with the given layer sizes: positive column-stochastic
// matrices, each entry malleable with probability `malleable_fraction`,
// rewards in [0, 1] with maximum exactly 1, strictly positive D_1.
inline Instance gen_random_sizes(std::uint64_t seed, std::vector<std::size_t> sizes,
                                 double malleable_fraction, double budget) {
  if (sizes.size() < 2) throw InputError("random: need at least two layers");
  for (auto s : sizes)
    if (s == 0) throw InputError("random: empty layer");
  if (!(malleable_fraction >= 0.0 && malleable_fraction <= 1.0))
    throw InputError("random: malleable fraction must lie in [0, 1]");
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw InputError("random: budget must be >= 0");
  std::mt19937_64 rng(seed);
  Instance in;
  in.layer_sizes = std::move(sizes);
  for (std::size_t t = 0; t + 1 < in.layer_sizes.size(); ++t) {
    const std::size_t r = in.layer_sizes[t + 1];
    const std::size_t c = in.layer_sizes[t];
    Matrix m(r, c);
    Mask mk(r, c, 0);
    for (std::size_t u = 0; u < c; ++u) {
      double s = 0.0;
      for (std::size_t v = 0; v < r; ++v) {
        m(v, u) = 0.05 + detail::u01(rng);
        s += m(v, u);
      }
      double acc = 0.0;
      for (std::size_t v = 0; v + 1 < r; ++v) {
        m(v, u) /= s;
        acc += m(v, u);
      }
      m(r - 1, u) = 1.0 - acc;
    }
    for (std::size_t i = 0; i < mk.size(); ++i)
      mk.data()[i] = detail::u01(rng) < malleable_fraction ? 1 : 0;
    in.initial_matrices.push_back(std::move(m));
    in.malleable.push_back(std::move(mk));
  }
  const std::size_t sk = in.layer_sizes.back();
  in.rewards.resize(sk);
  for (auto& x : in.rewards) x = detail::u01(rng);
  const auto top = std::max_element(in.rewards.begin(), in.rewards.end());
  const double mx = *top;
  for (auto& x : in.rewards) x = mx > 0.0 ? x / mx : 0.0;
  *top = 1.0;
  const std::size_t s1 = in.layer_sizes.front();
  in.initial_distribution.resize(s1);
  double s = 0.0;
  for (auto& x : in.initial_distribution) {
    x = 0.1 + detail::u01(rng);
    s += x;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < s1; ++i) {
    in.initial_distribution[i] /= s;
    acc += in.initial_distribution[i];
  }
  in.initial_distribution[s1 - 1] = 1.0 - acc;
  in.budget = budget;
  return in;
}

// Every layer has width w.
inline Instance gen_random(std::uint64_t seed, std::size_t w, std::size_t k,
                           double malleable_fraction, double budget) {
  if (w < 1 || k < 2) throw InputError("random: need w >= 1 and k >= 2");
  return gen_random_sizes(seed, std::vector<std::size_t>(k, w), malleable_fraction, budget);
}

}  // namespace pipeint

#endif  // PIPEINT_GENERATORS_HPP_
