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

#include <optional>

#include "symvar/group.hpp"

namespace symvar {

struct FocusInsideSet : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct ApexNotInSet : HypothesisError {
  using HypothesisError::HypothesisError;
};

/// P_gamma(a, b) = { x : gamma d(a,x) + d(b,x) <= d(a,b) }.
struct Petal {
  Vector a;  // apex
  Vector b;  // focus
  double gamma = 1.0;

  Petal(Vector apex, Vector focus, double g) : a(std::move(apex)), b(std::move(focus)), gamma(g) {
    if (gamma <= 0.0) throw Error("Petal: gamma must be positive");
    if (a.size() != b.size()) throw DimensionMismatch("Petal: apex/focus dimensions differ");
  }
};

struct Ball {
  Vector center;
  double radius = 0.0;

  Ball(Vector c, double r) : center(std::move(c)), radius(r) {
    if (radius < 0.0) throw Error("Ball: negative radius");
  }
};

/// D(a, B) = { a + t(b - a) : t in [0,1], b in B }, B a closed ball.
struct Drop {
  Vector apex;
  Ball ball;
};

/// Finite point cloud standing in for a closed set C; d(x, C) by enumeration.
struct PointCloud {
  std::vector<Vector> points;

  explicit PointCloud(std::vector<Vector> pts) : points(std::move(pts)) {
    if (points.empty()) throw Error("PointCloud: empty");
  }
};

inline double distance_to_cloud(const Vector& x, const PointCloud& c) {
  double best = kInf;
  for (const auto& p : c.points) best = std::min(best, distance(x, p));
  return best;
}

inline bool petal_contains(const Petal& p, const Vector& x, double tol = 1e-12) {
  if (x.size() != p.a.size()) throw DimensionMismatch("petal_contains");
  return p.gamma * distance(p.a, x) + distance(p.b, x) <= distance(p.a, p.b) + tol;
}

/// Membership in D(a, B) in closed form: min over t in [0,1] of
/// ||x - a - t(c - a)|| - t r, a convex 1-D function, via golden-section.
inline bool drop_contains(const Drop& d, const Vector& x, double tol = 1e-10) {
  const Vector dir = d.ball.center - d.apex;
  const auto value = [&](double t) {
    return distance(x, d.apex + t * dir) - t * d.ball.radius;
  };
  double lo = 0.0, hi = 1.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
  double f1 = value(m1), f2 = value(m2);
  for (int it = 0; it < 120; ++it) {
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - gr * (hi - lo);
      f1 = value(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + gr * (hi - lo);
      f2 = value(m2);
    }
  }
  const double best = std::min({value(0.0), value(1.0), f1, f2});
  return best <= tol;
}

struct CheckResult {
  bool ok = true;
  std::optional<Vector> witness;
};

namespace detail {
/// Parallel sample sweep: verdicts land in per-index slots, the first
/// violator is then picked sequentially, so SYMVAR_THREADS never changes the
/// reported witness.
template <typename Fn>
CheckResult sweep(std::span<const Vector> samples, Fn&& consistent_at) {
  std::vector<char> ok(samples.size(), 1);
  parallel_for(samples.size(), [&](std::size_t i) { ok[i] = consistent_at(samples[i]); });
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!ok[i]) return {false, samples[i]};
  return {};
}
}  // namespace detail

/// g(P_gamma(a,b)) = P_gamma(g(a), g(b)): membership of x in the original
/// petal must match membership of g(x) in the mapped petal on every sample.
inline CheckResult petal_equivariance_check(const Petal& p, const Action& g,
                                            std::span<const Vector> samples,
                                            double tol = 1e-12) {
  if (g.dimension() != static_cast<int>(p.a.size()))
    throw DimensionMismatch("petal_equivariance_check");
  const Petal mapped(g.apply(p.a), g.apply(p.b), p.gamma);
  return detail::sweep(samples, [&](const Vector& x) {
    return petal_contains(p, x, tol) == petal_contains(mapped, g.apply(x), tol);
  });
}

inline CheckResult drop_equivariance_check(const Drop& d, const Action& g,
                                           std::span<const Vector> samples,
                                           double tol = 1e-10) {
  const Drop mapped{g.apply(d.apex), Ball(g.apply(d.ball.center), d.ball.radius)};
  return detail::sweep(samples, [&](const Vector& x) {
    return drop_contains(d, x, tol) == drop_contains(mapped, g.apply(x), tol);
  });
}

/// A sampled set is G-invariant when member(x) == member(g(x)) for every
/// sample and group element.
template <typename MemberFn>
CheckResult set_invariance_check(MemberFn&& member, const FiniteGroup& g,
                                 std::span<const Vector> samples) {
  return detail::sweep(samples, [&](const Vector& x) {
    const bool mx = member(x);
    for (const auto& a : g.elements)
      if (member(a.apply(x)) != mx) return false;
    return true;
  });
}

enum class FlowerVerdict { DisjointCertified, DisjointSampled, Intersecting };

struct FlowerPairReport {
  std::size_t g = 0, g_prime = 0;
  double focus_distance = 0.0;        // d(g(b), g'(b))
  double separation_threshold = 0.0;  // 2 d(b, C)
  bool condition_met = false;         // focus_distance > threshold
  bool ball_bound = false;            // focus_distance > 2 max(d(a,b), r)
  FlowerVerdict verdict = FlowerVerdict::DisjointSampled;
  std::optional<Vector> intersection_witness;
};

struct FlowerMemberReport {
  std::size_t g = 0;
  std::size_t cloud_members = 0;  // |C ∩ P_gamma(g(a), g(b))|
  bool singleton_at_image = false;
};

struct FlowerReport {
  bool drops = false;  // petal flower when false
  double focus_set_distance = 0.0;  // d(b, C)
  double apex_focus_distance = 0.0; // d(a, b)
  double radius = 0.0;              // drop mode only
  std::vector<FlowerPairReport> pairs;           // pairs meeting the 2 d(b,C) condition
  std::vector<FlowerPairReport> flagged_pairs;   // g(b) != g'(b) but condition unmet
  std::vector<FlowerMemberReport> members;       // per-element C ∩ set census
  bool all_certified_disjoint = true;
};

struct FlowerOptions {
  std::size_t sample_count = 10000;
  std::uint64_t seed = 1;
  bool drops = false;
  double drop_radius = -1.0;  // < 0: 0.9 d(b, C)
  double tol = 1e-12;
};

/// Orbit-of-petals (or drops) disjointness report. Pairs (g, g') with
/// d(g(b), g'(b)) > 2 d(b, C) are certified disjoint by the triangle bound
/// when it applies and by a dense membership sweep otherwise; pairs with
/// distinct foci that miss the condition are flagged (the broader
/// quantification stated alongside it is reported, never assumed).
inline FlowerReport flower_disjointness(const Vector& a, const Vector& b, const PointCloud& c,
                                        double gamma, const FiniteGroup& g,
                                        const FlowerOptions& opt = {}) {
  FlowerReport rep;
  rep.drops = opt.drops;
  rep.focus_set_distance = distance_to_cloud(b, c);
  if (rep.focus_set_distance <= 0.0)
    throw FocusInsideSet("flower_disjointness: focus b lies in C (d(b,C) = 0)");
  rep.apex_focus_distance = distance(a, b);
  rep.radius = opt.drops ? (opt.drop_radius >= 0.0 ? opt.drop_radius
                                                   : 0.9 * rep.focus_set_distance)
                         : 0.0;

  const std::size_t m = g.order();
  std::vector<Vector> ga(m, a), gb(m, b);
  for (std::size_t i = 0; i < m; ++i) {
    ga[i] = g.elements[i].apply(a);
    gb[i] = g.elements[i].apply(b);
  }

  const auto member = [&](std::size_t i, const Vector& x) {
    if (opt.drops) return drop_contains(Drop{ga[i], Ball(gb[i], rep.radius)}, x, opt.tol);
    return petal_contains(Petal(ga[i], gb[i], gamma), x, opt.tol);
  };

  for (std::size_t i = 0; i < m; ++i) {
    FlowerMemberReport mr;
    mr.g = i;
    for (const auto& p : c.points)
      if (member(i, p)) ++mr.cloud_members;
    mr.singleton_at_image = mr.cloud_members == 1 && distance_to_cloud(ga[i], c) == 0.0 &&
                            member(i, ga[i]);
    rep.members.push_back(mr);
  }

  // Bounding box for the sampling sweep: orbit points + cloud, padded.
  const std::size_t dim = a.size();
  std::vector<double> lo(dim, kInf), hi(dim, -kInf);
  const auto absorb = [&](const Vector& v) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  };
  for (std::size_t i = 0; i < m; ++i) {
    absorb(ga[i]);
    absorb(gb[i]);
  }
  for (const auto& p : c.points) absorb(p);
  const double pad = 0.5 * (rep.apex_focus_distance + 1.0);
  for (std::size_t k = 0; k < dim; ++k) {
    lo[k] -= pad;
    hi[k] += pad;
  }

  Rng rng(opt.seed);
  std::vector<Vector> samples;
  samples.reserve(opt.sample_count);
  for (std::size_t s = 0; s < opt.sample_count; ++s) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = rng.uniform(lo[k], hi[k]);
    samples.emplace_back(std::move(x), a.norm_tag());
  }
  // Membership masks per group element, filled by a parallel sample sweep;
  // pair verdicts are then read off sequentially.
  std::vector<std::vector<char>> mask(m, std::vector<char>(samples.size(), 0));
  parallel_for(samples.size(), [&](std::size_t s) {
    for (std::size_t i = 0; i < m; ++i) mask[i][s] = member(i, samples[s]);
  });

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double focus_dist = distance(gb[i], gb[j]);
      if (focus_dist <= opt.tol) continue;  // g(b) == g'(b): pair excluded
      FlowerPairReport pr;
      pr.g = i;
      pr.g_prime = j;
      pr.focus_distance = focus_dist;
      pr.separation_threshold = 2.0 * rep.focus_set_distance;
      pr.condition_met = focus_dist > pr.separation_threshold;
      const double reach = opt.drops ? std::max(rep.apex_focus_distance, rep.radius)
                                     : rep.apex_focus_distance;
      pr.ball_bound = focus_dist > 2.0 * reach;
      if (pr.ball_bound) {
        pr.verdict = FlowerVerdict::DisjointCertified;
      } else {
        pr.verdict = FlowerVerdict::DisjointSampled;
        for (std::size_t s = 0; s < samples.size(); ++s)
          if (mask[i][s] && mask[j][s]) {
            pr.verdict = FlowerVerdict::Intersecting;
            pr.intersection_witness = samples[s];
            break;
          }
      }
      if (pr.condition_met) {
        if (pr.verdict == FlowerVerdict::Intersecting) rep.all_certified_disjoint = false;
        rep.pairs.push_back(std::move(pr));
      } else {
        rep.flagged_pairs.push_back(std::move(pr));
      }
    }
  return rep;
}

struct ConeReport {
  double estimate = kInf;  // min over the grid of d(a + t v, C) / t
  bool excluded = false;   // estimate >= threshold
  double threshold = 1e-3;
  std::vector<std::pair<double, double>> grid;  // (t, ratio)
};

/// Liminf estimate of t^{-1} d(a + t v, C) over a declared decreasing grid;
/// "excluded" reproduces y ∉ a + K_C(a) at the sampled level.
inline ConeReport contingent_cone_excludes(const PointCloud& c, const Vector& a, const Vector& v,
                                           std::span<const double> t_grid,
                                           double threshold = 1e-3) {
  if (distance_to_cloud(a, c) > 1e-12)
    throw ApexNotInSet("contingent_cone_excludes: apex is not a point of C");
  ConeReport rep;
  rep.threshold = threshold;
  double prev = kInf;
  for (double t : t_grid) {
    if (t <= 0.0 || t >= prev)
      throw Error("contingent_cone_excludes: t grid must be positive and decreasing");
    prev = t;
    const double ratio = distance_to_cloud(a + t * v, c) / t;
    rep.grid.emplace_back(t, ratio);
    rep.estimate = std::min(rep.estimate, ratio);
  }
  rep.excluded = rep.estimate >= threshold;
  return rep;
}

inline std::vector<double> default_cone_grid(int k_max = 20) {
  std::vector<double> g;
  double t = 0.5;
  for (int k = 0; k < k_max; ++k, t *= 0.5) g.push_back(t);
  return g;
}

}  // namespace symvar
