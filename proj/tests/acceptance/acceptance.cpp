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
// Acceptance suite: one line per criterion, exit 0 only if all pass.

#include <chrono>
#include <iostream>

#include <json.hpp>

#include "symvar/control.hpp"
#include "symvar/io.hpp"
#include "symvar/pde.hpp"
#include "symvar/smooth.hpp"
#include "symvar/svg.hpp"
#include "symvar/variational.hpp"

#include "../pde_oracles.hpp"

using namespace symvar;
using nlohmann::json;

namespace {

struct Criterion {
  Criterion(int id_, std::string name_) : id(id_), name(std::move(name_)) {}
  int id;
  std::string name;
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random group of the declared kinds as index permutations on n points.
std::vector<std::vector<int>> random_action(Rng& rng, int n) {
  const int kind = rng.uniform_int(0, 2);
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  if (kind == 1) {  // one involution: disjoint swaps on a strict subset
    const int pairs = rng.uniform_int(1, std::max(1, (n - 1) / 2));
    for (int k = 0; k < pairs && 2 * k + 1 < n - 1; ++k) std::swap(p[2 * k], p[2 * k + 1]);
    return {p};
  }
  if (kind == 2 && n >= 4) {  // C3 on three indices, at least one point stays fixed
    const int base = rng.uniform_int(0, n - 4);
    p[base] = base + 1;
    p[base + 1] = base + 2;
    p[base + 2] = base;
    return {p};
  }
  return {};  // trivial
}

ScalarObjective random_invariant_objective(Rng& rng, const FiniteMetricSpace& m) {
  std::vector<double> f(m.size());
  for (double& v : f) v = rng.uniform(0.0, 4.0);
  for (const auto& p : m.action())
    for (int i = 0; i < m.size(); ++i) f[p[i]] = f[i];
  return ScalarObjective{std::move(f)};
}

// ---------------------------------------------------------------------------
// Criterion 1: Ekeland certification on 100 random instances.

json run_criterion1(std::uint64_t seed, bool& pass, std::string& detail) {
  Rng rng(seed);
  json rep;
  rep["criterion"] = 1;
  rep["seed"] = seed;
  int escalations = 0;
  double min_slack1 = kInf, min_slack2 = kInf;

  for (int inst = 0; inst < 100; ++inst) {
    const int n = 5 + rng.uniform_int(0, 195);
    auto gens = random_action(rng, n);
    const auto m = FiniteMetricSpace::random_repaired(n, rng, gens);
    if (m.invariant_points().empty()) {
      --inst;  // resample: the start must be invariant
      continue;
    }
    const auto f = random_invariant_objective(rng, m);
    const int x0 = m.invariant_points()[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(m.invariant_points().size()) - 1))];

    // gamma at the instance's scale, doubled until the instance admits an
    // invariant certified point (the effective hypothesis class).
    double gamma = rng.uniform(0.1, 1.0);
    for (int esc = 0;; ++esc) {
      try {
        const EkelandCertificate cert = ekeland_point(m, f, gamma, x0);
        // Independent exhaustive verification of both inequalities.
        double slack1 = kInf;
        for (int x = 0; x < m.size(); ++x)
          if (x != cert.a)
            slack1 = std::min(slack1, f.f[x] + gamma * m.dist(x, cert.a) - f.f[cert.a]);
        const double slack2 = f.f[x0] - gamma * m.dist(cert.a, x0) - f.f[cert.a];
        if (!(slack1 > 0.0) || !(slack2 >= 0.0) || !m.is_invariant(cert.a)) {
          pass = false;
          detail = "instance " + std::to_string(inst) + " failed re-verification";
        }
        min_slack1 = std::min(min_slack1, slack1);
        min_slack2 = std::min(min_slack2, slack2);
        break;
      } catch (const NoEkelandPoint&) {
        gamma *= 2.0;
        ++escalations;
        if (esc > 60) {
          pass = false;
          detail = "gamma escalation did not terminate";
          break;
        }
      }
    }
  }
  rep["instances"] = 100;
  rep["gamma_escalations"] = escalations;
  rep["min_slack1"] = min_slack1;
  rep["min_slack2"] = min_slack2;
  return rep;
}

// ---------------------------------------------------------------------------
// Criterion 2: recursive bifunction iteration, Caristi and Takahashi conclusions.

json run_criterion2(std::uint64_t seed, bool& pass, std::string& detail) {
  Rng rng(seed);
  json rep;
  rep["criterion"] = 2;
  rep["seed"] = seed;
  int caristi_ok = 0, takahashi_ok = 0, iteration_ok = 0;

  for (int inst = 0; inst < 50; ++inst) {
    const int n = 5 + rng.uniform_int(0, 95);
    auto gens = random_action(rng, n);
    const auto m = FiniteMetricSpace::random_repaired(n, rng, gens);
    if (m.invariant_points().empty()) {
      --inst;
      continue;
    }
    // Potential d(., star) + invariant noise vanishing at star: the
    // invariant-improver hypothesis holds at every point with witness star.
    const int star = m.invariant_points()[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(m.invariant_points().size()) - 1))];
    std::vector<double> phi(n);
    for (int i = 0; i < n; ++i) phi[i] = m.dist(i, star) + rng.uniform(0.0, 1.0);
    phi[star] = 0.0;
    for (const auto& p : m.action())
      for (int i = 0; i < n; ++i) phi[p[i]] = phi[i];
    const auto f = Bifunction::from_potential(m, phi);
    if (validate_bifunction(m, f)) {
      pass = false;
      detail = "bifunction axioms failed at instance " + std::to_string(inst);
      break;
    }
    const int x0 = m.invariant_points().front();

    const auto it = iterate_bifunction(m, f, x0);
    bool ok = true;
    for (std::size_t k = 1; k < it.s_sets.size(); ++k) {
      ok = ok && it.s_diameters[k] <= it.s_diameters[k - 1] + 1e-15;
      for (int x : it.s_sets[k])
        ok = ok && std::find(it.s_sets[k - 1].begin(), it.s_sets[k - 1].end(), x) !=
                       it.s_sets[k - 1].end();
    }
    // Full-scan certificate at the limit: no invariant x != x_hat survives.
    for (int x : m.invariant_points())
      if (x != it.limit) ok = ok && f(it.limit, x) + m.dist(it.limit, x) > 0.0;
    iteration_ok += ok;

    // Caristi: invariant argmin map.
    MultiMap t(n);
    for (int y = 0; y < n; ++y) {
      int best = -1;
      double bv = kInf;
      for (int x : m.invariant_points()) {
        const double v = f(y, x) + m.dist(y, x);
        if (v < bv) {
          bv = v;
          best = x;
        }
      }
      t[y] = {best};
    }
    const auto car = caristi_fixed_point(m, f, t, x0);
    caristi_ok += std::find(t[car.fixed_point].begin(), t[car.fixed_point].end(),
                            car.fixed_point) != t[car.fixed_point].end();

    // Takahashi: conclusion verified exhaustively over the invariant slice.
    const auto tak = takahashi_minimizer(m, f, x0);
    bool tok = m.is_invariant(tak.minimizer);
    for (int x : m.invariant_points()) tok = tok && f(tak.minimizer, x) >= 0.0;
    takahashi_ok += tok;
  }

  rep["iteration_certified"] = iteration_ok;
  rep["caristi_verified"] = caristi_ok;
  rep["takahashi_verified"] = takahashi_ok;
  if (iteration_ok != 50 || caristi_ok != 50 || takahashi_ok != 50) {
    pass = false;
    detail = "certified " + std::to_string(iteration_ok) + "/" + std::to_string(caristi_ok) +
             "/" + std::to_string(takahashi_ok) + " of 50";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Criterion 3: symmetrization algebra on three groups.

FiniteGroup d4_on_ring8() {
  // Positions: the 8 boundary cells of a 3x3 grid in clockwise ring order;
  // the rotation shifts by two, the diagonal reflection reverses the ring.
  std::vector<Action> els;
  for (int k = 0; k < 4; ++k) {
    std::vector<int> rot(8), refl(8);
    for (int i = 0; i < 8; ++i) rot[i] = (i + 2 * k) % 8;
    // reflection t = [0,7,6,5,4,3,2,1] composed with the rotation
    for (int i = 0; i < 8; ++i) refl[i] = (8 - rot[i]) % 8;
    els.push_back(Action::permutation(rot));
    els.push_back(Action::permutation(refl));
  }
  return check_group(std::move(els));
}

json run_criterion3(std::uint64_t seed, bool& pass, std::string& detail) {
  json rep;
  rep["criterion"] = 3;
  rep["seed"] = seed;
  const std::vector<std::pair<std::string, FiniteGroup>> groups = {
      {"swap_R2", swap_group(2)}, {"C3_R3", cyclic_group(3)}, {"D4_R8", d4_on_ring8()}};
  double worst = 0.0;
  for (const auto& [name, g] : groups) {
    Rng rng(seed + std::hash<std::string>{}(name) % 1000);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> xv(g.dimension), yv(g.dimension);
      for (double& v : xv) v = rng.uniform(-3.0, 3.0);
      for (double& v : yv) v = rng.uniform(-3.0, 3.0);
      const Vector x(xv), y(yv);
      const Vector xbar = symmetrize(x, g);
      worst = std::max(worst, distance(symmetrize(xbar, g), xbar));
      const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
      worst = std::max(worst, distance(symmetrize(a * x + b * y, g),
                                       a * xbar + b * symmetrize(y, g)));
      for (const auto& act : g.elements)
        worst = std::max(worst, distance(symmetrize(act.apply(x), g), xbar));
      for (const Norm tag : {Norm::L1, Norm::L2, Norm::Linf})
        worst = std::max(worst, norm_of(xbar.span(), tag) - norm_of(x.span(), tag));
    }
  }
  rep["groups"] = {"swap_R2", "C3_R3", "D4_R8"};
  rep["worst_deviation"] = worst;
  if (worst > 1e-12) {
    pass = false;
    detail = "worst deviation " + std::to_string(worst);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Criterion 4: geometry equivariance and the two classical counterexamples.

json run_criterion4(std::uint64_t seed, bool& pass, std::string& detail) {
  Rng rng(seed);
  json rep;
  rep["criterion"] = 4;
  rep["seed"] = seed;
  const FiniteGroup swap = swap_group(2);

  int scenes_ok = 0;
  for (int scene = 0; scene < 20; ++scene) {
    const Vector a{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vector b{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double gamma = rng.uniform(0.2, 2.0);
    const double radius = rng.uniform(0.2, 1.5);
    std::vector<Vector> samples;
    for (int s = 0; s < 1000; ++s)
      samples.push_back(Vector{rng.uniform(-6, 6), rng.uniform(-6, 6)});
    bool ok = true;
    for (const auto& g : swap.elements) {
      ok = ok && petal_equivariance_check(Petal(a, b, gamma), g, samples).ok;
      ok = ok && drop_equivariance_check(Drop{a, Ball(b, radius)}, g, samples).ok;
    }
    scenes_ok += ok;
  }
  rep["equivariant_scenes"] = scenes_ok;

  // Counterexample: a petal with non-invariant apex is flagged, with a witness.
  std::vector<Vector> samples{Vector{2.0, 0.0}, Vector{0.0, 2.0}};
  for (int s = 0; s < 1000; ++s)
    samples.push_back(Vector{rng.uniform(-4, 4), rng.uniform(-4, 4)});
  const Petal petal26(Vector{2.0, 0.0}, Vector{0.0, 0.0}, 1.0);
  const auto inv26 = set_invariance_check(
      [&](const Vector& x) { return petal_contains(petal26, x); }, swap, samples);
  rep["petal_noninvariant_apex_flagged"] = !inv26.ok;

  // Counterexample pair: the drop of a near apex over an invariant ball is the
  // ball itself (invariant); a far apex breaks invariance with itself as witness.
  const Ball ball(Vector{0.0, 0.0}, 2.0);
  const auto inv_ball = set_invariance_check(
      [&](const Vector& x) { return drop_contains(Drop{Vector{0.0, 1.0}, ball}, x); }, swap,
      samples);
  rep["drop_near_apex_invariant"] = inv_ball.ok;

  std::vector<Vector> samples_with_apex{Vector{5.0, 0.0}};
  samples_with_apex.insert(samples_with_apex.end(), samples.begin(), samples.end());
  const auto inv_far = set_invariance_check(
      [&](const Vector& x) { return drop_contains(Drop{Vector{5.0, 0.0}, ball}, x); }, swap,
      samples_with_apex);
  const bool witness_is_apex =
      !inv_far.ok && inv_far.witness && distance(*inv_far.witness, Vector{5.0, 0.0}) == 0.0;
  rep["drop_far_apex_flagged"] = witness_is_apex;

  if (scenes_ok != 20 || !(!inv26.ok) || !inv_ball.ok || !witness_is_apex) {
    pass = false;
    detail = "scenes " + std::to_string(scenes_ok) + "/20, counterexamples " +
             std::to_string(!inv26.ok) + "/" + std::to_string(inv_ball.ok) + "/" +
             std::to_string(witness_is_apex);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Criterion 5: Palais-Smale descent and the dense-range probe.

bool run_criterion5(std::string& detail) {
  const FiniteGroup swap = swap_group(2);
  SmoothFunctional phi;
  phi.dimension = 2;
  phi.group = &swap;
  phi.value = [](std::span<const double> x) {
    const double a = x[0] - x[1], b = x[0] + x[1] - 2.0;
    return a * a + b * b;
  };
  phi.gradient = [](std::span<const double> x, std::span<double> o) {
    const double a = x[0] - x[1], b = x[0] + x[1] - 2.0;
    o[0] = 2.0 * a + 2.0 * b;
    o[1] = -2.0 * a + 2.0 * b;
  };
  PSOptions opt;
  opt.grad_tol = 1e-8;
  opt.k_max = 10000;
  const auto seq = palais_smale(phi, Vector{0.0, 0.0}, opt);
  if (!seq.converged || seq.final_proj_grad > 1e-8) {
    detail = "descent did not reach 1e-8 in 1e4 iterations";
    return false;
  }
  if (std::abs(seq.final_x[0] - 1.0) > 1e-6 || std::abs(seq.final_x[1] - 1.0) > 1e-6) {
    detail = "limit missed (1,1)";
    return false;
  }

  SmoothFunctional quad;
  quad.dimension = 2;
  quad.group = &swap;
  quad.value = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  quad.gradient = [](std::span<const double> x, std::span<double> o) {
    o[0] = 2.0 * x[0];
    o[1] = 2.0 * x[1];
  };
  Rng rng(505);
  for (int t = 0; t < 20; ++t) {
    const double c = rng.uniform(-3.0, 3.0);
    const Vector target{c, c};
    const auto res = dense_range_probe(quad, target, 10.0, 1e-9);
    if (std::abs(res.x[0] - c / 2.0) > 1e-8 || std::abs(res.x[1] - c / 2.0) > 1e-8) {
      detail = "probe missed T/2 at target scale " + std::to_string(c);
      return false;
    }
  }
  detail = "descent + 20 probe targets within tolerance";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 6: Plateau solves.

bool run_criterion6(std::string& detail) {
  {  // (a) m = 33, affine boundary, zero load.
    const auto t0 = std::chrono::steady_clock::now();
    const SymmetricGrid g(33, "transpose");
    const GridField v0 = GridField::from_function(g, [](double x, double y) { return x + y; });
    PlateauOptions opt;
    opt.tol = 1e-10;
    const auto [u, rep] = solve_plateau(g, v0, GridField(33), opt);
    double sup = 0.0;
    for (int i = 0; i < 33; ++i)
      for (int j = 0; j < 33; ++j) sup = std::max(sup, std::abs(u(i, j) - v0(i, j)));
    if (sup > 1e-8 || rep.residual_sup > 1e-10 || rep.symmetry_residual > 1e-10) {
      detail = "affine case: sup " + std::to_string(sup) + ", residual " +
               std::to_string(rep.residual_sup);
      return false;
    }
    if (seconds_since(t0) > 30.0) {
      detail = "affine case exceeded 30 s";
      return false;
    }
  }
  {  // (b) m = 17, zero boundary, symmetric bump load, Newton oracle.
    const auto t0 = std::chrono::steady_clock::now();
    const SymmetricGrid g(17, "transpose");
    GridField t = GridField::from_function(g, [](double x, double y) {
      return std::exp(-50.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
    });
    for (int i = 0; i < 17; ++i)
      for (int j = 0; j < 17; ++j)
        if (!g.interior(i, j)) t.at(i, j) = 0.0;
    PlateauOptions opt;
    opt.tol = 1e-10;
    const auto [u, rep] = solve_plateau(g, GridField(17), t, opt);
    const GridField ref = oracle::newton_plateau(17, t, 1e-12);
    double sup = 0.0;
    for (std::size_t k = 0; k < u.v.size(); ++k) sup = std::max(sup, std::abs(u.v[k] - ref.v[k]));
    if (sup > 1e-6) {
      detail = "bump case: sup distance to Newton " + std::to_string(sup);
      return false;
    }
    if (rep.symmetry_residual > 1e-10) {
      detail = "bump case: symmetry residual " + std::to_string(rep.symmetry_residual);
      return false;
    }
    if (seconds_since(t0) > 30.0) {
      detail = "bump case exceeded 30 s";
      return false;
    }
  }
  detail = "affine exact, Newton oracle matched, symmetry held";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 7: p-Laplacian descent.

bool run_criterion7(std::string& detail) {
  {  // p = 2 against the dense linear solve, m = 17.
    const SymmetricGrid g(17, "transpose");
    const GridField bc = GridField::from_function(g, [](double x, double y) { return x * y; });
    PLapOptions opt;
    opt.tol = 1e-10;
    const auto [u, rep] = p_energy_descent(g, 2.0, 0.0, bc, opt);
    const GridField ref = oracle::laplace_solve_dense(17, bc);
    double sup = 0.0;
    for (int nd : g.interior_nodes()) sup = std::max(sup, std::abs(u.v[nd] - ref.v[nd]));
    if (sup > 1e-8) {
      detail = "p=2 sup distance to the linear solve " + std::to_string(sup);
      return false;
    }
  }
  {  // p = 4, m = 9: monotone energy, dual norm <= 1e-4 within 1e5 iterations.
    const SymmetricGrid g(9, "transpose");
    const GridField bc = GridField::from_function(g, [](double x, double y) { return x * y; });
    PLapOptions opt;
    opt.tol = 1e-4;
    opt.max_iters = 100000;
    const auto [u, rep] = p_energy_descent(g, 4.0, 0.0, bc, opt);
    for (std::size_t k = 1; k < rep.energy_trace.size(); ++k)
      if (rep.energy_trace[k] > rep.energy_trace[k - 1] + 1e-12) {
        detail = "p=4 energy not monotone";
        return false;
      }
    if (!rep.converged || rep.dual_norm > 1e-4) {
      detail = "p=4 dual norm " + std::to_string(rep.dual_norm);
      return false;
    }
  }
  detail = "p=2 oracle matched, p=4 monotone with dual norm <= 1e-4";
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 8: control descent against exhaustive oracles.

json run_criterion8(std::uint64_t seed, bool& pass, std::string& detail) {
  json rep;
  rep["criterion"] = 8;
  rep["seed"] = seed;
  const auto t0 = std::chrono::steady_clock::now();

  {  // Scalar problem vs the 3^8 oracle.
    FiniteGroup triv = trivial_group(1);
    ControlProblem p;
    p.state_dim = 1;
    p.control_dim = 1;
    p.horizon = 1.0;
    p.x0 = {1.0};
    p.f = [](double, std::span<const double>, std::span<const double> u, std::span<double> o) {
      o[0] = u[0];
    };
    p.dfdx = [](double, std::span<const double>, std::span<const double>, std::span<double> o) {
      o[0] = 0.0;
    };
    p.h = [](std::span<const double> x) { return x[0] * x[0]; };
    p.dh = [](std::span<const double> x, std::span<double> o) { o[0] = 2.0 * x[0]; };
    // K = {-1, 0, 1}, listed worst-first so the needle descent is exercised.
    p.candidates = {Vector{1.0}, Vector{0.0}, Vector{-1.0}};
    p.group = &triv;

    const double eps = 1e-3;
    const auto res = epsilon_optimal(p, eps, 8);

    double best = kInf;
    std::vector<int> pick(8, 0);
    for (;;) {
      ControlSignal s;
      s.horizon = 1.0;
      for (int c = 0; c < 8; ++c) s.cells.push_back(p.candidates[pick[c]]);
      best = std::min(best, p.h(simulate(p, s).terminal()));
      int c = 0;
      for (; c < 8; ++c) {
        if (++pick[c] < 3) break;
        pick[c] = 0;
      }
      if (c == 8) break;
    }
    rep["scalar_terminal_cost"] = res.terminal_cost;
    rep["scalar_oracle_cost"] = best;
    rep["scalar_max_slack"] = res.max_slack;
    if (res.terminal_cost > best + eps || !res.verified || res.max_slack > eps) {
      pass = false;
      detail = "scalar problem missed the oracle or the needle condition";
    }
  }

  {  // Symmetric R^2 problem: values must stay in K_G.
    FiniteGroup swap = swap_group(2);
    ControlProblem p;
    p.state_dim = 2;
    p.control_dim = 2;
    p.horizon = 1.0;
    p.x0 = {1.0, 1.0};
    p.f = [](double, std::span<const double>, std::span<const double> u, std::span<double> o) {
      o[0] = u[0];
      o[1] = u[1];
    };
    p.dfdx = [](double, std::span<const double>, std::span<const double>, std::span<double> o) {
      std::fill(o.begin(), o.end(), 0.0);
    };
    p.h = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    p.dh = [](std::span<const double> x, std::span<double> o) {
      o[0] = 2.0 * x[0];
      o[1] = 2.0 * x[1];
    };
    p.candidates = {Vector{-1.0, -1.0}, Vector{1.0, 1.0}, Vector{-1.0, 1.0}, Vector{1.0, -1.0}};
    p.group = &swap;

    const auto res = epsilon_optimal(p, 1e-3, 8);
    const auto kg = invariant_candidates(p);
    bool in_kg = true;
    for (const auto& c : res.signal.cells) {
      bool found = false;
      for (const auto& k : kg) found = found || c == k;
      in_kg = in_kg && found;
    }
    rep["r2_terminal_cost"] = res.terminal_cost;
    rep["r2_values_in_kg"] = in_kg;
    rep["r2_max_slack"] = res.max_slack;
    if (!in_kg || !res.verified) {
      pass = false;
      detail = "R^2 problem left the invariant candidate set";
    }
  }

  const double secs = seconds_since(t0);
  if (secs > 5.0) {
    pass = false;
    detail = "runtime " + std::to_string(secs) + " s exceeded 5 s";
  }
  return rep;
}

// Deterministic byte stream standing in for the p = 2 field artifact.
std::string plap_field_bytes() {
  const SymmetricGrid g(9, "transpose");
  const GridField bc = GridField::from_function(g, [](double x, double y) { return x * y; });
  PLapOptions opt;
  opt.tol = 1e-8;
  const auto [u, rep] = p_energy_descent(g, 2.0, 0.0, bc, opt);
  return csv_of_field(u);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> results;
  // Default pinned seed; an argument overrides it for robustness sweeps.
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20260808;

  {  // 1
    Criterion c{1, "Ekeland certification on 100 random finite metric spaces"};
    const auto t0 = std::chrono::steady_clock::now();
    const json rep = run_criterion1(seed, c.pass, c.detail);
    const double secs = seconds_since(t0);
    if (secs >= 10.0) {
      c.pass = false;
      c.detail = "runtime " + std::to_string(secs) + " s exceeded 10 s";
    }
    if (c.pass)
      c.detail = "100/100 certified, min slack1 " +
                 std::to_string(rep["min_slack1"].get<double>()) + ", " +
                 std::to_string(secs).substr(0, 4) + " s";
    results.push_back(c);
  }
  {  // 2
    Criterion c{2, "Recursive bifunction iteration, Caristi and Takahashi conclusions"};
    const json rep = run_criterion2(seed + 1, c.pass, c.detail);
    if (c.pass) c.detail = "50/50 instances certified for each conclusion";
    results.push_back(c);
  }
  {  // 3
    Criterion c{3, "Symmetrization algebra at 1e-12 on swap/C3/D4"};
    const json rep = run_criterion3(seed + 2, c.pass, c.detail);
    if (c.pass)
      c.detail = "worst deviation " + std::to_string(rep["worst_deviation"].get<double>());
    results.push_back(c);
  }
  {  // 4
    Criterion c{4, "Geometry equivariance and the two counterexamples"};
    run_criterion4(seed + 3, c.pass, c.detail);
    if (c.pass) c.detail = "20/20 scenes, both counterexamples reproduced";
    results.push_back(c);
  }
  {  // 5
    Criterion c{5, "Palais-Smale descent and dense-range probe"};
    c.pass = run_criterion5(c.detail);
    results.push_back(c);
  }
  {  // 6
    Criterion c{6, "Plateau: affine exactness and the Newton oracle"};
    c.pass = run_criterion6(c.detail);
    results.push_back(c);
  }
  {  // 7
    Criterion c{7, "p-Laplacian: linear-solve oracle and p = 4 descent"};
    c.pass = run_criterion7(c.detail);
    results.push_back(c);
  }
  {  // 8
    Criterion c{8, "Control: exhaustive oracle and needle condition"};
    run_criterion8(seed + 4, c.pass, c.detail);
    if (c.pass) c.detail = "oracle matched, slacks within epsilon, values in K_G";
    results.push_back(c);
  }
  {  // 9: byte-identical reports under a fixed seed.
    Criterion c{9, "Determinism: byte-identical seeded reports"};
    bool p1 = true, p2 = true;
    std::string d;
    const auto once = [&](std::uint64_t s) {
      json all;
      all["c1"] = run_criterion1(s, p1, d);
      all["c2"] = run_criterion2(s + 1, p1, d);
      all["c3"] = run_criterion3(s + 2, p1, d);
      all["c4"] = run_criterion4(s + 3, p1, d);
      all["c8"] = run_criterion8(s + 4, p2, d);
      return report_to_string(all) + plap_field_bytes();
    };
    const std::string first = once(seed);
    const std::string second = once(seed);
    c.pass = first == second;
    c.detail = c.pass ? "two seeded runs produced identical bytes (" +
                            std::to_string(first.size()) + " bytes compared)"
                      : "reports differ between reruns";
    results.push_back(c);
  }

  bool all = true;
  for (const auto& c : results) {
    all = all && c.pass;
    std::cout << (c.pass ? "PASS" : "FAIL") << " — criterion " << c.id << ": " << c.name << " ("
              << c.detail << ")\n";
  }
  std::cout << (all ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: FAILURES PRESENT") << "\n";
  return all ? 0 : 1;
}
