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

#include <map>

#include "symvar/metric.hpp"

namespace symvar {

struct NoInvariantPoint : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct NotInvariantObjective : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct NoEkelandPoint : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct EmptyInvariantSlice : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct HypothesisViolated : HypothesisError {
  using HypothesisError::HypothesisError;
};

/// Certificate for the two variational inequalities at the returned point a:
///   slack1 = min over x != a of f(x) + gamma d(x, a) - f(a)   (> 0)
///   slack2 = f(x0) - gamma d(a, x0) - f(a)                    (>= 0)
struct EkelandCertificate {
  int a = -1;
  double slack1 = 0.0;
  double slack2 = 0.0;
  int candidates_scanned = 0;
  struct Rejection {
    int candidate;
    int witness;       // point violating the strict inequality
    double violation;  // f(witness) + gamma d - f(candidate) (<= 0)
  };
  std::vector<Rejection> trace;
};

/// Certified invariant variational point on a finite metric space: the
/// lowest-index a in M_G with f(a) + gamma d(a, x0) <= f(x0) whose strict
/// inequality survives the exhaustive scan over all of M. Greedy invariant
/// descent is not complete here (an invariant certified point can exist off
/// the greedy chain), so candidates are enumerated outright.
inline EkelandCertificate ekeland_point(const FiniteMetricSpace& m, const ScalarObjective& obj,
                                        double gamma, int x0) {
  if (gamma <= 0.0) throw Error("ekeland_point: gamma must be positive");
  if (static_cast<int>(obj.f.size()) != m.size())
    throw Error("ekeland_point: objective size mismatch");
  if (!obj.proper()) throw NoInvariantPoint("ekeland_point: objective is nowhere finite");
  if (!objective_is_invariant(m, obj)) throw NotInvariantObjective("ekeland_point: f is not G-invariant");
  bool has_finite_invariant = false;
  for (int i : m.invariant_points()) has_finite_invariant |= std::isfinite(obj.f[i]);
  if (!has_finite_invariant)
    throw NoInvariantPoint(m.invariant_points().empty()
                               ? "ekeland_point: M_G is empty"
                               : "ekeland_point: M_G does not meet dom f");
  if (x0 < 0 || x0 >= m.size() || !m.is_invariant(x0))
    throw NotInvariantStart("ekeland_point: x0 = " + std::to_string(x0) + " is not G-invariant");
  if (!std::isfinite(obj.f[x0]))
    throw NotInvariantStart("ekeland_point: f(x0) is not finite");

  EkelandCertificate cert;
  for (int a : m.invariant_points()) {
    if (!std::isfinite(obj.f[a])) continue;
    if (obj.f[a] + gamma * m.dist(a, x0) > obj.f[x0]) continue;  // inequality (2)
    ++cert.candidates_scanned;
    double slack1 = kInf;
    int witness = -1;
    for (int x = 0; x < m.size(); ++x) {
      if (x == a) continue;
      const double s = obj.f[x] + gamma * m.dist(x, a) - obj.f[a];
      if (s < slack1) {
        slack1 = s;
        witness = x;
      }
    }
    if (slack1 > 0.0) {
      cert.a = a;
      cert.slack1 = slack1;
      cert.slack2 = obj.f[x0] - gamma * m.dist(a, x0) - obj.f[a];
      return cert;
    }
    cert.trace.push_back({a, witness, slack1});
  }
  std::string msg = "ekeland_point: no G-invariant point satisfies both inequalities";
  if (!cert.trace.empty()) {
    const auto& best = *std::max_element(
        cert.trace.begin(), cert.trace.end(),
        [](const auto& l, const auto& r) { return l.violation < r.violation; });
    msg += " (best candidate " + std::to_string(best.candidate) + ", witness " +
           std::to_string(best.witness) + ", violation " + std::to_string(best.violation) + ")";
  }
  throw NoEkelandPoint(msg);
}

/// Trace of the recursive construction: invariant iterates x_n, the sets
/// S_n = { x : f(x_n, x) + d(x_n, x) <= 0 } and their diameters.
struct BifunctionIteration {
  std::vector<int> sequence;  // x_0, x_1, ..., x_hat
  int limit = -1;
  std::vector<std::vector<int>> s_sets;
  std::vector<double> s_diameters;
};

namespace detail {
inline std::vector<int> s_set(const FiniteMetricSpace& m, const Bifunction& f, int center) {
  std::vector<int> s;
  for (int x = 0; x < m.size(); ++x)
    if (f(center, x) + m.dist(center, x) <= 0.0) s.push_back(x);
  return s;
}
}  // namespace detail

/// Recursive invariant selection: x_n is the exact argmin of f(x_{n-1}, .)
/// over S_{n-1} ∩ M_G (lowest index on ties), which satisfies the 1/n slack
/// of the construction automatically. Stops when S(x_n) ∩ M_G = {x_n}.
inline BifunctionIteration iterate_bifunction(const FiniteMetricSpace& m, const Bifunction& f,
                                              int x0, int max_n = -1) {
  if (f.n != m.size()) throw Error("iterate_bifunction: size mismatch");
  if (x0 < 0 || x0 >= m.size() || !m.is_invariant(x0))
    throw NotInvariantStart("iterate_bifunction: x0 is not G-invariant");
  if (max_n < 0) max_n = m.size() + 1;

  BifunctionIteration out;
  int cur = x0;
  out.sequence.push_back(cur);
  for (int n = 0; n < max_n; ++n) {
    const auto s = detail::s_set(m, f, cur);
    out.s_sets.push_back(s);
    out.s_diameters.push_back(m.diameter(s));
    int best = -1;
    double best_val = kInf;
    bool slice_nonempty = false;
    for (int x : s) {
      if (!m.is_invariant(x)) continue;
      slice_nonempty = true;
      if (f(cur, x) < best_val) {
        best_val = f(cur, x);
        best = x;
      }
    }
    if (!slice_nonempty)
      throw EmptyInvariantSlice(
          "iterate_bifunction: S_n ∩ M_G is empty at n = " + std::to_string(n) +
          " (discrete convexity-with-respect-to-G surrogate fails)");
    if (best == cur || best_val >= 0.0) {
      // min of f(cur, .) over the slice is attained at cur (value 0):
      // membership in S forces d <= -f <= 0, so the slice is {cur}.
      out.limit = cur;
      return out;
    }
    cur = best;
    out.sequence.push_back(cur);
  }
  throw Error("iterate_bifunction: exceeded max_n without stabilizing");
}

/// Multivalued map on indices: T[i] lists the members of T(i).
using MultiMap = std::vector<std::vector<int>>;

struct CaristiResult {
  int fixed_point = -1;
  BifunctionIteration iteration;
};

/// Invariant Caristi-Kirk fixed point x̂ ∈ T(x̂), driven by the recursive
/// construction. The hypothesis — an invariant x ∈ T(y) with
/// f(y, x) + d(y, x) <= 0 — is checked for every invariant y ∈ S_0;
/// non-invariant members of S_0 have no symmetrization in a finite space and
/// are consulted only when `proxy` designates an invariant stand-in for them.
inline CaristiResult caristi_fixed_point(const FiniteMetricSpace& m, const Bifunction& f,
                                         const MultiMap& t, int x0,
                                         const std::map<int, int>* proxy = nullptr) {
  if (static_cast<int>(t.size()) != m.size()) throw Error("caristi_fixed_point: T size mismatch");
  if (x0 < 0 || x0 >= m.size() || !m.is_invariant(x0))
    throw NotInvariantStart("caristi_fixed_point: x0 is not G-invariant");

  const auto hypothesis_holds = [&](int ybar, const std::vector<int>& t_of_y) {
    for (int x : t_of_y)
      if (m.is_invariant(x) && f(ybar, x) + m.dist(ybar, x) <= 0.0) return true;
    return false;
  };
  for (int y : detail::s_set(m, f, x0)) {
    if (m.is_invariant(y)) {
      if (!hypothesis_holds(y, t[y]))
        throw HypothesisViolated("caristi_fixed_point: no invariant x in T(y) with f(y,x)+d(y,x) <= 0 at y = " +
                                 std::to_string(y));
    } else if (proxy) {
      const auto it = proxy->find(y);
      if (it == proxy->end() || !m.is_invariant(it->second))
        throw HypothesisViolated("caristi_fixed_point: y = " + std::to_string(y) +
                                 " is not invariant and has no designated invariant proxy");
      if (!hypothesis_holds(it->second, t[y]))
        throw HypothesisViolated("caristi_fixed_point: designated proxy for y = " +
                                 std::to_string(y) + " fails the hypothesis");
    }
  }

  CaristiResult res;
  res.iteration = iterate_bifunction(m, f, x0);
  const int xh = res.iteration.limit;
  if (std::find(t[xh].begin(), t[xh].end(), xh) == t[xh].end())
    throw HypothesisViolated("caristi_fixed_point: limit " + std::to_string(xh) +
                             " is not a fixed point of T (hypothesis fails at the limit)");
  res.fixed_point = xh;
  return res;
}

struct TakahashiResult {
  int minimizer = -1;
  double min_over_invariant = 0.0;  // min over x in M_G of f(x̂, x)
  BifunctionIteration iteration;
};

/// Invariant Takahashi point: f(x̂, x) >= 0 for every invariant x, certified
/// by scan. Hypothesis (checked on the invariant slice of S_0): whenever
/// min over M_G of f(y, .) is negative there is an invariant x != y with
/// f(y, x) + d(y, x) <= 0.
inline TakahashiResult takahashi_minimizer(const FiniteMetricSpace& m, const Bifunction& f,
                                           int x0 = -1) {
  if (x0 < 0) {
    if (m.invariant_points().empty())
      throw NoInvariantPoint("takahashi_minimizer: M_G is empty");
    x0 = m.invariant_points().front();
  }
  if (!m.is_invariant(x0)) throw NotInvariantStart("takahashi_minimizer: x0 is not G-invariant");

  for (int y : detail::s_set(m, f, x0)) {
    if (!m.is_invariant(y)) continue;
    double min_val = kInf;
    for (int x : m.invariant_points()) min_val = std::min(min_val, f(y, x));
    if (min_val >= 0.0) continue;
    bool ok = false;
    for (int x : m.invariant_points())
      if (x != y && f(y, x) + m.dist(y, x) <= 0.0) ok = true;
    if (!ok)
      throw HypothesisViolated("takahashi_minimizer: invariant y = " + std::to_string(y) +
                               " has negative invariant descent but no invariant x with f+d <= 0");
  }

  TakahashiResult res;
  res.iteration = iterate_bifunction(m, f, x0);
  res.minimizer = res.iteration.limit;
  res.min_over_invariant = kInf;
  for (int x : m.invariant_points())
    res.min_over_invariant = std::min(res.min_over_invariant, f(res.minimizer, x));
  if (res.min_over_invariant < 0.0)
    throw HypothesisViolated("takahashi_minimizer: certification scan failed at the limit");
  return res;
}

struct StrongEkelandResult {
  int point = -1;
  double min_slack = kInf;  // min over x != x̂ of f(x̂, x) + d(x̂, x)
  BifunctionIteration iteration;
};

/// Strong variational point of the bifunction: f(x̂, x) + d(x̂, x) > 0 for
/// every x != x̂ in all of M, certified by scan. Failure of the scan means
/// the instance lacks the invariant-improver property the equivalence rests
/// on, and is reported as a hypothesis violation with the witness.
inline StrongEkelandResult strong_ekeland_bifunction(const FiniteMetricSpace& m,
                                                     const Bifunction& f, int x0) {
  StrongEkelandResult res;
  res.iteration = iterate_bifunction(m, f, x0);
  const int xh = res.iteration.limit;
  int witness = -1;
  for (int x = 0; x < m.size(); ++x) {
    if (x == xh) continue;
    const double s = f(xh, x) + m.dist(xh, x);
    if (s < res.min_slack) {
      res.min_slack = s;
      witness = x;
    }
  }
  if (m.size() > 1 && res.min_slack <= 0.0)
    throw HypothesisViolated(
        "strong_ekeland_bifunction: x = " + std::to_string(witness) +
        " improves the invariant limit (no invariant improver existed; discrete "
        "convexity-with-respect-to-G hypothesis fails)");
  res.point = xh;
  return res;
}

}  // namespace symvar
