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
#include <sstream>

#include "symvar/core.hpp"

namespace symvar {

struct MissingIdentity : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct NotClosed : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct NotIsometry : HypothesisError {
  using HypothesisError::HypothesisError;
};

/// A linear action on R^n: either a coordinate permutation (index i is sent
/// to image[i]) or a dense n x n matrix. Permutations compose exactly;
/// matrices are compared entrywise with a small tolerance.
class Action {
 public:
  static Action permutation(std::vector<int> image) {
    Action a;
    a.perm_ = std::move(image);
    a.dim_ = static_cast<int>(a.perm_->size());
    std::vector<char> seen(a.perm_->size(), 0);
    for (int v : *a.perm_) {
      if (v < 0 || v >= a.dim_ || seen[v]) throw Error("Action: not a permutation");
      seen[v] = 1;
    }
    return a;
  }
  static Action matrix(std::vector<std::vector<double>> m) {
    Action a;
    const int n = static_cast<int>(m.size());
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != n) throw Error("Action: matrix not square");
    a.mat_ = std::move(m);
    a.dim_ = n;
    return a;
  }
  static Action identity_for(int dim) {
    std::vector<int> img(dim);
    std::iota(img.begin(), img.end(), 0);
    return permutation(std::move(img));
  }

  int dimension() const { return dim_; }
  bool is_permutation() const { return perm_.has_value(); }
  const std::vector<int>& perm_image() const { return *perm_; }

  void apply(std::span<const double> x, std::span<double> out) const {
    if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("Action::apply");
    if (perm_) {
      for (int i = 0; i < dim_; ++i) out[(*perm_)[i]] = x[i];
    } else {
      for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += (*mat_)[i][j] * x[j];
        out[i] = s;
      }
    }
  }
  Vector apply(const Vector& x) const {
    std::vector<double> out(x.size());
    apply(x.span(), out);
    return Vector(std::move(out), x.norm_tag());
  }

  /// (this o other)(x) = this(other(x)).
  Action compose(const Action& other) const {
    if (dim_ != other.dim_) throw DimensionMismatch("Action::compose");
    if (perm_ && other.perm_) {
      std::vector<int> img(dim_);
      for (int i = 0; i < dim_; ++i) img[i] = (*perm_)[(*other.perm_)[i]];
      return permutation(std::move(img));
    }
    // Fall back to matrix form when either side is a matrix.
    const auto a = to_matrix(), b = other.to_matrix();
    std::vector<std::vector<double>> m(dim_, std::vector<double>(dim_, 0.0));
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < dim_; ++k) {
        const double aik = a[i][k];
        if (aik == 0.0) continue;
        for (int j = 0; j < dim_; ++j) m[i][j] += aik * b[k][j];
      }
    return matrix(std::move(m));
  }

  bool is_identity(double tol = 1e-12) const {
    if (perm_) {
      for (int i = 0; i < dim_; ++i)
        if ((*perm_)[i] != i) return false;
      return true;
    }
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (std::abs((*mat_)[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
    return true;
  }

  bool equals(const Action& other, double tol = 1e-12) const {
    if (dim_ != other.dim_) return false;
    if (perm_ && other.perm_) return *perm_ == *other.perm_;
    const auto a = to_matrix(), b = other.to_matrix();
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (std::abs(a[i][j] - b[i][j]) > tol) return false;
    return true;
  }

  std::vector<std::vector<double>> to_matrix() const {
    if (mat_) return *mat_;
    std::vector<std::vector<double>> m(dim_, std::vector<double>(dim_, 0.0));
    for (int i = 0; i < dim_; ++i) m[(*perm_)[i]][i] = 1.0;
    return m;
  }

  std::string describe() const {
    std::ostringstream os;
    if (perm_) {
      os << "perm[";
      for (int i = 0; i < dim_; ++i) os << (i ? " " : "") << (*perm_)[i] + 1;
      os << "]";
    } else {
      os << "matrix(" << dim_ << "x" << dim_ << ")";
    }
    return os.str();
  }

 private:
  int dim_ = 0;
  std::optional<std::vector<int>> perm_;
  std::optional<std::vector<std::vector<double>>> mat_;
};

/// Finite group of isometries with the uniform probability weights (the
/// finite Haar measure). Validated by check_group.
struct FiniteGroup {
  int dimension = 0;
  Norm norm_tag = Norm::L2;
  std::vector<Action> elements;
  std::vector<double> weights;  // uniform, sums to 1

  std::size_t order() const { return elements.size(); }
  bool all_permutations() const {
    return std::all_of(elements.begin(), elements.end(),
                       [](const Action& a) { return a.is_permutation(); });
  }
};

struct GroupCheckOptions {
  int isometry_samples = 32;
  double tol = 1e-12;
  std::uint64_t seed = 20260808;
};

/// Validates closure, identity, inverses and isometry of every element for
/// the declared norm, and attaches uniform weights.
inline FiniteGroup check_group(std::vector<Action> elements, Norm norm_tag = Norm::L2,
                               const GroupCheckOptions& opt = {}) {
  if (elements.empty()) throw Error("check_group: empty element list");
  const int dim = elements[0].dimension();
  for (const auto& e : elements)
    if (e.dimension() != dim) throw DimensionMismatch("check_group: mixed dimensions");

  const auto find = [&](const Action& a) -> int {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].equals(a, opt.tol)) return static_cast<int>(i);
    return -1;
  };

  bool has_id = false;
  for (const auto& e : elements) has_id = has_id || e.is_identity(opt.tol);
  if (!has_id) throw MissingIdentity("check_group: identity element missing");

  // Isometry first: a distorting element would otherwise surface as a
  // confusing closure failure.
  Rng rng(opt.seed);
  std::vector<double> x(dim), y(dim), gx(dim), gy(dim);
  for (int s = 0; s < opt.isometry_samples; ++s) {
    for (int k = 0; k < dim; ++k) {
      x[k] = rng.uniform(-1.0, 1.0);
      y[k] = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> diff(dim);
    for (int k = 0; k < dim; ++k) diff[k] = x[k] - y[k];
    const double d = norm_of(diff, norm_tag);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      elements[i].apply(x, gx);
      elements[i].apply(y, gy);
      for (int k = 0; k < dim; ++k) diff[k] = gx[k] - gy[k];
      if (std::abs(norm_of(diff, norm_tag) - d) > opt.tol)
        throw NotIsometry("check_group: element " + std::to_string(i) + " (" +
                          elements[i].describe() + ") distorts a sampled pair under the " +
                          std::string(norm_name(norm_tag)) + " norm");
    }
  }

  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = 0; j < elements.size(); ++j) {
      const Action c = elements[i].compose(elements[j]);
      if (find(c) < 0)
        throw NotClosed("check_group: product of elements " + std::to_string(i) + " and " +
                        std::to_string(j) + " (" + elements[i].describe() + " o " +
                        elements[j].describe() + ") is not in the set");
    }
  // Closure of a finite set containing the identity implies inverses, but the
  // table check is cheap so verify directly.
  for (std::size_t i = 0; i < elements.size(); ++i) {
    bool has_inverse = false;
    for (std::size_t j = 0; j < elements.size() && !has_inverse; ++j)
      has_inverse = elements[i].compose(elements[j]).is_identity(opt.tol);
    if (!has_inverse)
      throw NotClosed("check_group: element " + std::to_string(i) + " has no inverse in the set");
  }

  FiniteGroup g;
  g.dimension = dim;
  g.norm_tag = norm_tag;
  g.weights.assign(elements.size(), 1.0 / static_cast<double>(elements.size()));
  g.elements = std::move(elements);
  return g;
}

/// Orbit average sum_g w_g g(x) — the symmetrization point of x.
inline Vector symmetrize(const Vector& x, const FiniteGroup& g) {
  if (static_cast<int>(x.size()) != g.dimension)
    throw DimensionMismatch("symmetrize: vector dimension " + std::to_string(x.size()) +
                            " vs group dimension " + std::to_string(g.dimension));
  std::vector<double> acc(x.size(), 0.0), tmp(x.size());
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    g.elements[i].apply(x.span(), tmp);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g.weights[i] * tmp[k];
  }
  return Vector(std::move(acc), x.norm_tag());
}

inline bool is_invariant_point(const Vector& x, const FiniteGroup& g, double tol = 1e-12) {
  std::vector<double> gx(x.size()), diff(x.size());
  for (const auto& a : g.elements) {
    a.apply(x.span(), gx);
    for (std::size_t k = 0; k < gx.size(); ++k) diff[k] = gx[k] - x[k];
    if (norm_of(diff, x.norm_tag()) > tol) return false;
  }
  return true;
}

/// s_G(x) = min over g with g(x) != x of d(x, g(x)); +inf when x is invariant
/// (infimum over the empty set).
inline double separation(const Vector& x, const FiniteGroup& g, double equal_tol = 1e-12) {
  double best = kInf;
  std::vector<double> gx(x.size()), diff(x.size());
  for (const auto& a : g.elements) {
    a.apply(x.span(), gx);
    for (std::size_t k = 0; k < gx.size(); ++k) diff[k] = gx[k] - x[k];
    const double d = norm_of(diff, x.norm_tag());
    if (d > equal_tol) best = std::min(best, d);
  }
  return best;
}

struct ConvexityReport {
  bool convex = true;
  double worst_slack = kInf;  // min over samples of avg_g phi(g x) - phi(xbar)
  Vector worst_sample;
};

/// Tests phi(xbar) <= sum_g w_g phi(g(x)) on every sample (slack >= -1e-9).
template <typename Fn>
ConvexityReport is_convex_wrt_group(Fn&& phi, const FiniteGroup& g,
                                    std::span<const Vector> samples, double tol = 1e-9) {
  ConvexityReport rep;
  for (const Vector& x : samples) {
    const Vector xbar = symmetrize(x, g);
    double avg = 0.0;
    for (std::size_t i = 0; i < g.elements.size(); ++i)
      avg += g.weights[i] * phi(g.elements[i].apply(x));
    const double slack = avg - phi(xbar);
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_sample = x;
    }
  }
  rep.convex = samples.empty() || rep.worst_slack >= -tol;
  return rep;
}

/// Orthonormal basis of the fixed subspace Fix(G) = {x : g(x) = x for all g}.
/// Permutation groups get the exact coordinate-orbit basis; matrix groups go
/// through the symmetrization projector P = sum_g w_g g (idempotent,
/// symmetric for isometry groups) followed by modified Gram-Schmidt.
class InvariantBasis {
 public:
  explicit InvariantBasis(const FiniteGroup& g) : n_(g.dimension) {
    if (g.all_permutations()) {
      build_orbits(g);
    } else {
      build_dense(g);
    }
  }

  int full_dim() const { return n_; }
  int invariant_dim() const { return k_; }
  const std::vector<std::vector<int>>& orbits() const { return orbits_; }

  void to_invariant(std::span<const double> x, std::span<double> z) const {
    if (!orbits_.empty()) {
      for (int c = 0; c < k_; ++c) {
        double s = 0.0;
        for (int i : orbits_[c]) s += x[i];
        z[c] = s * inv_sqrt_[c];
      }
      return;
    }
    for (int c = 0; c < k_; ++c) {
      double s = 0.0;
      for (int i = 0; i < n_; ++i) s += q_[c][i] * x[i];
      z[c] = s;
    }
  }

  void to_full(std::span<const double> z, std::span<double> x) const {
    std::fill(x.begin(), x.end(), 0.0);
    if (!orbits_.empty()) {
      for (int c = 0; c < k_; ++c)
        for (int i : orbits_[c]) x[i] = z[c] * inv_sqrt_[c];
      return;
    }
    for (int c = 0; c < k_; ++c)
      for (int i = 0; i < n_; ++i) x[i] += q_[c][i] * z[c];
  }

  /// Orthogonal projection onto Fix(G).
  void project(std::span<const double> x, std::span<double> out) const {
    std::vector<double> z(k_);
    to_invariant(x, z);
    to_full(z, out);
  }

 private:
  void build_orbits(const FiniteGroup& g) {
    std::vector<int> owner(n_, -1);
    for (int i = 0; i < n_; ++i) {
      if (owner[i] >= 0) continue;
      // Orbit closure of coordinate i under the whole group.
      std::vector<int> orbit{i};
      owner[i] = static_cast<int>(orbits_.size());
      for (std::size_t head = 0; head < orbit.size(); ++head)
        for (const auto& a : g.elements) {
          const int j = a.perm_image()[orbit[head]];
          if (owner[j] < 0) {
            owner[j] = owner[i];
            orbit.push_back(j);
          }
        }
      std::sort(orbit.begin(), orbit.end());
      orbits_.push_back(std::move(orbit));
    }
    k_ = static_cast<int>(orbits_.size());
    inv_sqrt_.resize(k_);
    for (int c = 0; c < k_; ++c)
      inv_sqrt_[c] = 1.0 / std::sqrt(static_cast<double>(orbits_[c].size()));
  }

  void build_dense(const FiniteGroup& g) {
    std::vector<std::vector<double>> p(n_, std::vector<double>(n_, 0.0));
    for (std::size_t e = 0; e < g.elements.size(); ++e) {
      const auto m = g.elements[e].to_matrix();
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) p[i][j] += g.weights[e] * m[i][j];
    }
    // Columns of the projector span Fix(G); modified Gram-Schmidt with one
    // re-orthogonalization pass.
    for (int c = 0; c < n_; ++c) {
      std::vector<double> v(n_);
      for (int i = 0; i < n_; ++i) v[i] = p[i][c];
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : q_) {
          double proj = 0.0;
          for (int i = 0; i < n_; ++i) proj += q[i] * v[i];
          for (int i = 0; i < n_; ++i) v[i] -= proj * q[i];
        }
      const double nv = norm_of(v, Norm::L2);
      if (nv > 1e-10) {
        for (double& t : v) t /= nv;
        q_.push_back(std::move(v));
      }
    }
    k_ = static_cast<int>(q_.size());
  }

  int n_ = 0;
  int k_ = 0;
  std::vector<std::vector<int>> orbits_;   // permutation path
  std::vector<double> inv_sqrt_;           // 1/sqrt(|orbit|)
  std::vector<std::vector<double>> q_;     // dense path, rows are basis vectors
};

// Common construction helpers used across tests and the CLI.

inline FiniteGroup trivial_group(int dim, Norm tag = Norm::L2) {
  return check_group({Action::identity_for(dim)}, tag);
}

/// {Id, sigma} with sigma swapping coordinates i and j.
inline FiniteGroup swap_group(int dim, int i = 0, int j = 1, Norm tag = Norm::L2) {
  std::vector<int> img(dim);
  std::iota(img.begin(), img.end(), 0);
  std::swap(img[i], img[j]);
  return check_group({Action::identity_for(dim), Action::permutation(img)}, tag);
}

/// Cyclic shift group of order dim acting on R^dim.
inline FiniteGroup cyclic_group(int dim, Norm tag = Norm::L2) {
  std::vector<Action> els;
  std::vector<int> shift(dim);
  for (int i = 0; i < dim; ++i) shift[i] = (i + 1) % dim;
  Action gen = Action::permutation(shift);
  Action cur = Action::identity_for(dim);
  for (int k = 0; k < dim; ++k) {
    els.push_back(cur);
    cur = gen.compose(cur);
  }
  return check_group(std::move(els), tag);
}

}  // namespace symvar
