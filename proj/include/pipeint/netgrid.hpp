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

#ifndef PIPEINT_NETGRID_HPP_
#define PIPEINT_NETGRID_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pipeint/errors.hpp"

namespace pipeint {

inline constexpr std::uint64_t kDefaultSizeCap = 10'000'000;

// Budget grid {0, eps, 2 eps, ...} intersected with [0, B].
class BudgetGrid {
 public:
  BudgetGrid(double cap, double step) : step_(step), cap_(cap) {
    if (!(step > 0.0) || !std::isfinite(step))
      throw InputError("budget grid step must be positive");
    if (!(cap >= 0.0) || !std::isfinite(cap))
      throw InputError("budget grid cap must be non-negative");
    const double q = std::floor(cap / step + 1e-9);
    if (q > 1e8) throw SizeCapError("budget grid has more than 1e8 points");
    count_ = static_cast<std::size_t>(q) + 1;
  }

  double step() const { return step_; }
  double cap() const { return cap_; }
  std::size_t size() const { return count_; }
  // i * eps, clamped so rounding never pushes a point above B.
  double point(std::size_t i) const { return std::min(i * step_, cap_); }
  double top() const { return point(count_ - 1); }
  std::size_t top_index() const { return count_ - 1; }

  std::vector<double> points() const {
    std::vector<double> p(count_);
    for (std::size_t i = 0; i < count_; ++i) p[i] = point(i);
    return p;
  }

 private:
  double step_;
  double cap_;
  std::size_t count_ = 1;
};

inline BudgetGrid build_budget_grid(double B, double eps) {
  return BudgetGrid(B, eps);
}

namespace detail {

// C(n, r) saturating at `limit + 1`.
inline std::uint64_t binom_capped(std::uint64_t n, std::uint64_t r,
                                  std::uint64_t limit) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > limit) return limit + 1;
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace detail

// Grid net on the d-simplex: all vectors whose coordinates are multiples of
// 1/n with n = ceil(1/delta), delta = eps / (2 max(d-1, 1)). Points are the
// compositions of n into d parts, ordered lexicographically by the first
// d-1 coordinates.
class SimplexNet {
 public:
  SimplexNet(std::size_t d, double eps, std::uint64_t cap = kDefaultSizeCap)
      : d_(d), eps_(eps) {
    if (d < 1) throw InputError("simplex net dimension must be >= 1");
    if (!(eps > 0.0) || eps > 2.0 || !std::isfinite(eps))
      throw InputError("simplex net radius must lie in (0, 2]");
    delta_ = eps / (2.0 * static_cast<double>(std::max<std::size_t>(d - 1, 1)));
    const double inv = std::ceil(1.0 / delta_ - 1e-9);
    if (inv > 1e12) throw SizeCapError("simplex net resolution too fine");
    n_ = static_cast<std::uint64_t>(inv);
    size_ = detail::binom_capped(n_ + d - 1, d - 1, cap);
    if (size_ > cap)
      throw SizeCapError("simplex net (d=" + std::to_string(d) +
                         ", eps=" + std::to_string(eps) + ") exceeds cap of " +
                         std::to_string(cap) + " points");
  }

  std::size_t dim() const { return d_; }
  double radius() const { return eps_; }
  double delta() const { return delta_; }
  std::uint64_t resolution() const { return n_; }
  std::uint64_t size() const { return size_; }

  // Integer coordinates (summing to resolution()) of point `index`.
  std::vector<std::uint32_t> coords(std::uint64_t index) const {
    if (index >= size_) throw InputError("simplex net index out of range");
    std::vector<std::uint32_t> c(d_, 0);
    std::uint64_t rem = n_;
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      const std::uint64_t parts = d_ - 1 - i;  // parts after coordinate i
      std::uint64_t x = 0;
      for (;; ++x) {
        const std::uint64_t block = count(rem - x, parts);
        if (index < block) break;
        index -= block;
      }
      c[i] = static_cast<std::uint32_t>(x);
      rem -= x;
    }
    c[d_ - 1] = static_cast<std::uint32_t>(rem);
    return c;
  }

  std::uint64_t index_of(std::span<const std::uint32_t> c) const {
    if (c.size() != d_) throw InputError("simplex net coordinate size mismatch");
    std::uint64_t idx = 0;
    std::uint64_t rem = n_;
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      const std::uint64_t parts = d_ - 1 - i;
      if (c[i] > rem) throw InputError("simplex net coordinates exceed resolution");
      // Compositions with a smaller i-th coordinate (hockey-stick sum).
      idx += detail::binom_capped(rem + parts, parts, ~0ull >> 1) -
             detail::binom_capped(rem - c[i] + parts, parts, ~0ull >> 1);
      rem -= c[i];
    }
    if (c[d_ - 1] != rem) throw InputError("simplex net coordinates do not sum to resolution");
    return idx;
  }

  std::vector<double> point(std::uint64_t index) const {
    return to_point(coords(index));
  }

  void point_into(std::uint64_t index, std::span<double> out) const {
    const auto c = coords(index);
    for (std::size_t i = 0; i < d_; ++i)
      out[i] = static_cast<double>(c[i]) / static_cast<double>(n_);
  }

  std::vector<double> to_point(std::span<const std::uint32_t> c) const {
    std::vector<double> p(d_);
    for (std::size_t i = 0; i < d_; ++i)
      p[i] = static_cast<double>(c[i]) / static_cast<double>(n_);
    return p;
  }

  std::vector<std::vector<double>> points() const {
    std::vector<std::vector<double>> all;
    all.reserve(size_);
    std::vector<std::uint32_t> c(d_, 0);
    c[d_ - 1] = static_cast<std::uint32_t>(n_);
    for (std::uint64_t i = 0; i < size_; ++i) {
      all.push_back(to_point(c));
      advance(c);
    }
    return all;
  }

  // First point in enumeration order.
  std::vector<std::uint32_t> first_coords() const {
    std::vector<std::uint32_t> c(d_, 0);
    c[d_ - 1] = static_cast<std::uint32_t>(n_);
    return c;
  }

  // Advance to the lexicographic successor; no-op past the last point.
  void advance(std::vector<std::uint32_t>& c) const {
    if (d_ == 1) return;
    for (std::size_t i = d_ - 1; i-- > 0;) {
      std::uint64_t tail = 0;
      for (std::size_t j = i + 1; j < d_; ++j) tail += c[j];
      if (tail > 0) {
        ++c[i];
        for (std::size_t j = i + 1; j < d_; ++j) c[j] = 0;
        c[d_ - 1] = static_cast<std::uint32_t>(tail - 1);
        return;
      }
    }
  }

  // Rounds the first d-1 coordinates down; the last takes the remainder.
  std::pair<std::uint64_t, double> nearest(std::span<const double> D) const {
    if (D.size() != d_) throw InputError("nearest_net_point: dimension mismatch");
    std::vector<std::uint32_t> c(d_, 0);
    std::uint64_t used = 0;
    for (std::size_t i = 0; i + 1 < d_; ++i) {
      double f = std::floor(D[i] * static_cast<double>(n_) + 1e-9);
      if (f < 0.0) f = 0.0;
      std::uint64_t x = static_cast<std::uint64_t>(f);
      x = std::min<std::uint64_t>(x, n_ - used);
      c[i] = static_cast<std::uint32_t>(x);
      used += x;
    }
    c[d_ - 1] = static_cast<std::uint32_t>(n_ - used);
    double dist = 0.0;
    for (std::size_t i = 0; i < d_; ++i)
      dist += std::abs(D[i] - static_cast<double>(c[i]) / static_cast<double>(n_));
    return {index_of(c), dist};
  }

 private:
  // Compositions of m into `parts` non-negative parts.
  static std::uint64_t count(std::uint64_t m, std::uint64_t parts) {
    return detail::binom_capped(m + parts - 1, parts - 1, ~0ull >> 1);
  }

  std::size_t d_;
  double eps_;
  double delta_ = 0.0;
  std::uint64_t n_ = 1;
  std::uint64_t size_ = 1;
};

inline SimplexNet build_simplex_net(std::size_t d, double eps,
                                    std::uint64_t cap = kDefaultSizeCap) {
  return SimplexNet(d, eps, cap);
}

inline std::pair<std::uint64_t, double> nearest_net_point(
    const SimplexNet& net, std::span<const double> D) {
  return net.nearest(D);
}

// Tuples of `populations` net indices, lexicographic with the first
// component varying slowest.
class PopulationNet {
 public:
  PopulationNet(std::uint64_t net_size, std::size_t populations,
                std::uint64_t cap = kDefaultSizeCap)
      : base_(net_size), pops_(populations) {
    if (populations < 1) throw InputError("population count must be >= 1");
    if (net_size < 1) throw InputError("empty simplex net");
    unsigned __int128 s = 1;
    for (std::size_t j = 0; j < populations; ++j) {
      s *= net_size;
      if (s > cap)
        throw SizeCapError("population net of " + std::to_string(net_size) +
                           "^" + std::to_string(populations) +
                           " tuples exceeds cap of " + std::to_string(cap));
    }
    size_ = static_cast<std::uint64_t>(s);
  }

  std::uint64_t size() const { return size_; }
  std::uint64_t base() const { return base_; }
  std::size_t populations() const { return pops_; }

  std::vector<std::uint64_t> decode(std::uint64_t index) const {
    std::vector<std::uint64_t> t(pops_);
    for (std::size_t j = pops_; j-- > 0;) {
      t[j] = index % base_;
      index /= base_;
    }
    return t;
  }

  std::uint64_t encode(std::span<const std::uint64_t> tuple) const {
    if (tuple.size() != pops_) throw InputError("population tuple size mismatch");
    std::uint64_t idx = 0;
    for (auto x : tuple) {
      if (x >= base_) throw InputError("population tuple component out of range");
      idx = idx * base_ + x;
    }
    return idx;
  }

  class iterator {
   public:
    using value_type = std::vector<std::uint64_t>;
    using difference_type = std::ptrdiff_t;
    using reference = const value_type&;
    using pointer = const value_type*;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    iterator(const PopulationNet* net, std::uint64_t pos)
        : net_(net), pos_(pos), cur_(net->pops_, 0) {}

    reference operator*() const { return cur_; }
    pointer operator->() const { return &cur_; }
    iterator& operator++() {
      ++pos_;
      for (std::size_t j = cur_.size(); j-- > 0;) {
        if (++cur_[j] < net_->base_) break;
        cur_[j] = 0;
      }
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    bool operator==(const iterator& o) const { return pos_ == o.pos_; }

   private:
    const PopulationNet* net_ = nullptr;
    std::uint64_t pos_ = 0;
    value_type cur_;
  };

  iterator begin() const { return iterator(this, 0); }
  iterator end() const { return iterator(this, size_); }

 private:
  std::uint64_t base_;
  std::size_t pops_;
  std::uint64_t size_ = 1;
};

inline PopulationNet enumerate_population_net(
    const SimplexNet& net, std::size_t populations,
    std::uint64_t cap = kDefaultSizeCap) {
  return PopulationNet(net.size(), populations, cap);
}

}  // namespace pipeint

#endif  // PIPEINT_NETGRID_HPP_
