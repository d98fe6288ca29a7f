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

#ifndef PIPEINT_SIMPLEX_HPP_
#define PIPEINT_SIMPLEX_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pipeint/errors.hpp"

namespace pipeint {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "OPTIMAL";
    case LpStatus::kInfeasible: return "INFEASIBLE";
    case LpStatus::kUnbounded: return "UNBOUNDED";
  }
  return "?";
}

enum class Sense { kLe, kGe, kEq };

// maximize c^T x  subject to  rows, x >= 0.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, double>> coeffs;
    Sense sense = Sense::kLe;
    double rhs = 0.0;
  };

  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> rows;

  explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(n, 0.0) {}

  void add_row(std::vector<std::pair<std::size_t, double>> coeffs, Sense s,
               double rhs) {
    rows.push_back({std::move(coeffs), s, rhs});
  }
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

namespace detail {

// Dense tableau with an explicit basis. Column `cols` holds the RHS.
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n)
      : m_(m), n_(n), a_((m + 1) * (n + 1), 0.0), basis_(m, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  // Row m_ is the objective row holding reduced costs (maximization form:
  // a negative entry means the column improves the objective).
  double& obj(std::size_t c) { return at(m_, c); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = n_ + 1;
    double* prow = &a_[pr * w];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      double* row = &a_[r * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Runs primal simplex on the current objective row over columns
  // [0, allowed). Returns false if unbounded.
  bool optimize(std::size_t allowed, double tol, std::size_t& pivots,
                std::size_t max_pivots) {
    std::size_t degenerate_run = 0;
    constexpr std::size_t kBlandAfter = 50;
    for (;;) {
      const bool bland = degenerate_run >= kBlandAfter;
      std::size_t pc = allowed;
      double best = -tol;
      for (std::size_t c = 0; c < allowed; ++c) {
        const double rc = at(m_, c);
        if (rc < best) {
          pc = c;
          if (bland) break;
          best = rc;
        }
      }
      if (pc == allowed) return true;

      std::size_t pr = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double v = at(r, pc);
        if (v > tol) {
          const double q = at(r, n_) / v;
          if (q < ratio - 1e-12 ||
              (q <= ratio + 1e-12 && pr < m_ && basis_[r] < basis_[pr])) {
            ratio = q;
            pr = r;
          }
        }
      }
      if (pr == m_) return false;
      degenerate_run = (ratio <= tol) ? degenerate_run + 1 : 0;
      pivot(pr, pc);
      if (++pivots > max_pivots)
        throw SolverError("simplex: pivot limit exceeded");
    }
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

// Two-phase dense tableau simplex. Dantzig pricing with lowest-index ties,
// falling back to Bland's rule after a run of degenerate pivots.
inline LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-10) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();
  if (lp.objective.size() != n) throw InputError("lp: objective size mismatch");

  // Column layout: structural | slack/surplus | artificial.
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  std::vector<int> flip(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    Sense s = lp.rows[i].sense;
    if (lp.rows[i].rhs < 0.0) {
      flip[i] = -1;
      if (s == Sense::kLe) s = Sense::kGe;
      else if (s == Sense::kGe) s = Sense::kLe;
    }
    if (s != Sense::kEq) ++n_slack;
    if (s != Sense::kLe) ++n_art;
  }
  const std::size_t art0 = n + n_slack;
  const std::size_t total = art0 + n_art;
  detail::Tableau tab(m, total);

  std::size_t si = n;
  std::size_t ai = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const double f = flip[i];
    for (const auto& [j, v] : row.coeffs) {
      if (j >= n) throw InputError("lp: variable index out of range");
      tab.at(i, j) += f * v;
    }
    tab.rhs(i) = f * row.rhs;
    Sense s = row.sense;
    if (f < 0) {
      if (s == Sense::kLe) s = Sense::kGe;
      else if (s == Sense::kGe) s = Sense::kLe;
    }
    if (s == Sense::kLe) {
      tab.at(i, si) = 1.0;
      tab.basis()[i] = si++;
    } else if (s == Sense::kGe) {
      tab.at(i, si++) = -1.0;
      tab.at(i, ai) = 1.0;
      tab.basis()[i] = ai++;
    } else {
      tab.at(i, ai) = 1.0;
      tab.basis()[i] = ai++;
    }
  }

  LpSolution sol;
  const std::size_t max_pivots = 50 * (m + total) + 1000;

  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials); reduced costs after pricing out
    // the basic artificials.
    for (std::size_t c = 0; c <= total; ++c) tab.obj(c) = 0.0;
    for (std::size_t c = art0; c < total; ++c) tab.obj(c) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] >= art0) {
        for (std::size_t c = 0; c <= total; ++c) tab.obj(c) -= tab.at(i, c);
      }
    }
    tab.optimize(total, tol, sol.pivots, max_pivots);
    if (-tab.obj(total) > 1e-7) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < art0) continue;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(tab.at(i, c)) > 1e-9) {
          tab.pivot(i, c);
          break;
        }
      }
    }
  }

  // Phase 2 objective row: reduced costs = -c + c_B B^{-1} A.
  for (std::size_t c = 0; c <= total; ++c) tab.obj(c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) tab.obj(j) = -lp.objective[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis()[i];
    const double cb = b < n ? lp.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= total; ++c) tab.obj(c) += cb * tab.at(i, c);
  }
  // Artificial columns never re-enter.
  if (!tab.optimize(art0, tol, sol.pivots, max_pivots)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis()[i];
    if (b < n) sol.x[b] = tab.rhs(i);
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * sol.x[j];
  sol.objective = obj;
  return sol;
}

}  // namespace pipeint

#endif  // PIPEINT_SIMPLEX_HPP_
