/*
 Copyright 2026 The symvar authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>

#include "symvar/core.hpp"

namespace symvar {

struct InvalidMetric : Error {
  using Error::Error;
};
struct InvalidAction : HypothesisError {
  using HypothesisError::HypothesisError;
};

/// Finite metric space with a permutation group acting isometrically on the
/// point indices. Construction validates the metric axioms (triangle
/// inequality exhaustively for n <= 500) and that every permutation
/// preserves d exactly.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(int n, std::vector<double> dist, std::vector<std::vector<int>> perms)
      : n_(n), d_(std::move(dist)) {
    if (n_ <= 0 || static_cast<std::size_t>(n_) * n_ != d_.size())
      throw InvalidMetric("FiniteMetricSpace: bad distance matrix size");
    validate_metric();
    if (perms.empty()) {
      std::vector<int> id(n_);
      std::iota(id.begin(), id.end(), 0);
      perms.push_back(std::move(id));
    }
    action_ = close_group(std::move(perms));
    validate_action();
    for (int i = 0; i < n_; ++i) {
      bool fixed = true;
      for (const auto& p : action_) fixed = fixed && p[i] == i;
      if (fixed) invariant_.push_back(i);
    }
  }

  static FiniteMetricSpace path(int n, std::vector<std::vector<int>> perms = {}) {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i) * n + j] = std::abs(i - j);
    return FiniteMetricSpace(n, std::move(d), std::move(perms));
  }

  static FiniteMetricSpace grid(int rows, int cols, std::vector<std::vector<int>> perms = {}) {
    const int n = rows * cols;
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[static_cast<std::size_t>(i) * n + j] =
            std::abs(i / cols - j / cols) + std::abs(i % cols - j % cols);
    return FiniteMetricSpace(n, std::move(d), std::move(perms));
  }

  /// Random symmetric weights repaired into a metric by shortest-path
  /// closure, then averaged over the group orbit so the action is isometric.
  static FiniteMetricSpace random_repaired(int n, Rng& rng,
                                           std::vector<std::vector<int>> perms = {}) {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double w = rng.uniform(0.5, 2.0);
        d[static_cast<std::size_t>(i) * n + j] = w;
        d[static_cast<std::size_t>(j) * n + i] = w;
      }
    // Floyd-Warshall repair.
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double via = d[static_cast<std::size_t>(i) * n + k] +
                             d[static_cast<std::size_t>(k) * n + j];
          double& dij = d[static_cast<std::size_t>(i) * n + j];
          if (via < dij) dij = via;
        }
    if (!perms.empty()) {
      // Average over the group one pair-orbit at a time and write the same
      // double to every pair in the orbit, so the action preserves the
      // averaged metric bit for bit.
      auto group = close_group(perms);
      std::vector<double> avg(static_cast<std::size_t>(n) * n, 0.0);
      std::vector<char> done(static_cast<std::size_t>(n) * n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (done[static_cast<std::size_t>(i) * n + j] || i == j) continue;
          double mean = 0.0;
          for (const auto& p : group)
            mean += d[static_cast<std::size_t>(p[i]) * n + p[j]] / group.size();
          for (const auto& p : group) {
            const int a = p[i], b = p[j];
            avg[static_cast<std::size_t>(a) * n + b] = mean;
            avg[static_cast<std::size_t>(b) * n + a] = mean;
            done[static_cast<std::size_t>(a) * n + b] = 1;
            done[static_cast<std::size_t>(b) * n + a] = 1;
          }
        }
      d = std::move(avg);
    }
    return FiniteMetricSpace(n, std::move(d), std::move(perms));
  }

  int size() const { return n_; }
  double dist(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<std::vector<int>>& action() const { return action_; }
  const std::vector<int>& invariant_points() const { return invariant_; }
  bool is_invariant(int i) const {
    return std::binary_search(invariant_.begin(), invariant_.end(), i);
  }

  double diameter(std::span<const int> subset) const {
    double m = 0.0;
    for (std::size_t a = 0; a < subset.size(); ++a)
      for (std::size_t b = a + 1; b < subset.size(); ++b)
        m = std::max(m, dist(subset[a], subset[b]));
    return m;
  }

 private:
  /// Closure of the generating permutations (identity always included).
  static std::vector<std::vector<int>> close_group(std::vector<std::vector<int>> gens) {
    const int n = static_cast<int>(gens.front().size());
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int>> group{id};
    const auto contains = [&](const std::vector<int>& p) {
      return std::find(group.begin(), group.end(), p) != group.end();
    };
    for (auto& g : gens) {
      if (static_cast<int>(g.size()) != n) throw InvalidAction("action: mixed sizes");
      std::vector<char> seen(n, 0);
      for (int v : g) {
        if (v < 0 || v >= n || seen[v]) throw InvalidAction("action: not a permutation");
        seen[v] = 1;
      }
      if (!contains(g)) group.push_back(std::move(g));
    }
    for (std::size_t head = 0; head < group.size(); ++head) {
      if (group.size() > 4096) throw InvalidAction("action: group closure too large");
      for (std::size_t other = 0; other < group.size(); ++other) {
        std::vector<int> comp(n);
        for (int i = 0; i < n; ++i) comp[i] = group[head][group[other][i]];
        if (!contains(comp)) group.push_back(std::move(comp));
      }
    }
    return group;
  }

  void validate_metric() const {
    for (int i = 0; i < n_; ++i) {
      if (dist(i, i) != 0.0) throw InvalidMetric("metric: nonzero diagonal at " + std::to_string(i));
      for (int j = 0; j < n_; ++j) {
        if (!std::isfinite(dist(i, j)) || dist(i, j) < 0.0)
          throw InvalidMetric("metric: invalid entry");
        if (dist(i, j) != dist(j, i)) throw InvalidMetric("metric: not symmetric");
        if (i != j && dist(i, j) <= 0.0)
          throw InvalidMetric("metric: zero distance between distinct points");
      }
    }
    if (n_ <= 500) {
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
          const double dik = dist(i, k);
          for (int j = 0; j < n_; ++j)
            if (dist(i, j) > dik + dist(k, j) + 1e-12)
              throw InvalidMetric("metric: triangle inequality fails at (" + std::to_string(i) +
                                  "," + std::to_string(j) + "," + std::to_string(k) + ")");
        }
    }
  }

  void validate_action() const {
    for (const auto& p : action_)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          if (dist(p[i], p[j]) != dist(i, j))
            throw InvalidAction("action: permutation does not preserve d at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
  }

  int n_;
  std::vector<double> d_;
  std::vector<std::vector<int>> action_;
  std::vector<int> invariant_;  // sorted
};

/// Values of a proper, bounded-below objective; +inf marks points outside
/// the domain.
struct ScalarObjective {
  std::vector<double> f;

  bool proper() const {
    return std::any_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
  }
};

inline bool objective_is_invariant(const FiniteMetricSpace& m, const ScalarObjective& obj,
                                   double tol = 0.0) {
  for (const auto& p : m.action())
    for (int i = 0; i < m.size(); ++i) {
      const double a = obj.f[i], b = obj.f[p[i]];
      if (std::isinf(a) || std::isinf(b)) {
        if (a != b) return false;
      } else if (std::abs(a - b) > tol) {
        return false;
      }
    }
  return true;
}

/// Tabulated bifunction f(x, y) with zero diagonal and the triangle property
/// f(x,y) <= f(x,z) + f(z,y).
struct Bifunction {
  int n = 0;
  std::vector<double> f;  // row-major n*n

  double operator()(int i, int j) const { return f[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return f[static_cast<std::size_t>(i) * n + j]; }

  static Bifunction zeros(int n) {
    return Bifunction{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  }
  /// f(i, j) = phi(j) - phi(i) + scale * d(i, j); satisfies the axioms for
  /// any potential phi and scale >= 0.
  static Bifunction from_potential(const FiniteMetricSpace& m, std::span<const double> phi,
                                   double scale = 0.0) {
    Bifunction b = zeros(m.size());
    for (int i = 0; i < m.size(); ++i)
      for (int j = 0; j < m.size(); ++j)
        b.at(i, j) = phi[j] - phi[i] + scale * m.dist(i, j);
    return b;
  }
};

struct BifunctionViolation {
  std::string what;
  int i = -1, j = -1, k = -1;
};

/// Checks the standing bifunction assumptions on the table: zero diagonal,
/// the triangle property (slack tol for rounded inputs) and G-invariance in
/// both coordinates.
inline std::optional<BifunctionViolation> validate_bifunction(const FiniteMetricSpace& m,
                                                              const Bifunction& b,
                                                              double tol = 1e-12) {
  if (b.n != m.size()) return BifunctionViolation{"size mismatch"};
  for (int i = 0; i < b.n; ++i)
    if (b(i, i) != 0.0) return BifunctionViolation{"nonzero diagonal", i, i};
  for (int i = 0; i < b.n; ++i)
    for (int k = 0; k < b.n; ++k)
      for (int j = 0; j < b.n; ++j)
        if (b(i, j) > b(i, k) + b(k, j) + tol)
          return BifunctionViolation{"triangle property fails", i, j, k};
  for (const auto& p : m.action())
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.n; ++j)
        if (std::abs(b(p[i], p[j]) - b(i, j)) > tol)
          return BifunctionViolation{"not G-invariant", i, j};
  return std::nullopt;
}

}  // namespace symvar
