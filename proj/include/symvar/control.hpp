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

#include "symvar/group.hpp"

namespace symvar {

struct GridMismatch : Error {
  using Error::Error;
};
struct Blowup : Error {
  using Error::Error;
};
struct HypothesesViolated : HypothesisError {
  using HypothesisError::HypothesisError;
};

/// Terminal-cost control problem dx/dt = f(t, x, u), x(0) = x0, with a
/// finite G-invariant candidate set K for the control values. The group acts
/// on control coordinates.
struct ControlProblem {
  int state_dim = 0;
  int control_dim = 0;
  double horizon = 1.0;
  std::vector<double> x0;

  // f(t, x, u) -> out (state_dim)
  std::function<void(double, std::span<const double>, std::span<const double>, std::span<double>)> f;
  // Jacobian d f_i / d x_j, row-major state_dim x state_dim; optional.
  std::function<void(double, std::span<const double>, std::span<const double>, std::span<double>)> dfdx;
  // terminal cost and its gradient
  std::function<double(std::span<const double>)> h;
  std::function<void(std::span<const double>, std::span<double>)> dh;  // optional

  std::vector<Vector> candidates;  // K as a finite list
  const FiniteGroup* group = nullptr;

  double blowup_guard = 1e9;

  void eval_dfdx(double t, std::span<const double> x, std::span<const double> u,
                 std::span<double> out) const {
    if (dfdx) {
      dfdx(t, x, u, out);
      return;
    }
    std::vector<double> xp(x.begin(), x.end()), fp(state_dim), fm(state_dim);
    const double step = 1e-6 * (1.0 + norm_of(x, Norm::L2));
    for (int j = 0; j < state_dim; ++j) {
      const double xj = xp[j];
      xp[j] = xj + step;
      f(t, xp, u, fp);
      xp[j] = xj - step;
      f(t, xp, u, fm);
      xp[j] = xj;
      for (int i = 0; i < state_dim; ++i)
        out[static_cast<std::size_t>(i) * state_dim + j] = (fp[i] - fm[i]) / (2.0 * step);
    }
  }

  void eval_dh(std::span<const double> x, std::span<double> out) const {
    if (dh) {
      dh(x, out);
      return;
    }
    std::vector<double> xp(x.begin(), x.end());
    const double step = 1e-6 * (1.0 + norm_of(x, Norm::L2));
    for (int j = 0; j < state_dim; ++j) {
      const double xj = xp[j];
      xp[j] = xj + step;
      const double hp = h(xp);
      xp[j] = xj - step;
      const double hm = h(xp);
      xp[j] = xj;
      out[j] = (hp - hm) / (2.0 * step);
    }
  }
};

/// Sampled validation of the standing hypotheses: Jacobian vs central
/// differences (1e-5), the coercivity bound <x, f> <= C (1 + |x|^2), and
/// invariance of the candidate set under the group.
inline void validate_problem(const ControlProblem& p, double coercivity_c = 1e6,
                             int samples = 16, std::uint64_t seed = 3) {
  if (!p.group) throw Error("ControlProblem: group reference missing");
  if (p.candidates.empty()) throw HypothesesViolated("ControlProblem: empty candidate set K");
  for (const auto& k : p.candidates) {
    if (static_cast<int>(k.size()) != p.control_dim)
      throw DimensionMismatch("ControlProblem: candidate dimension");
    for (const auto& g : p.group->elements) {
      const Vector gk = g.apply(k);
      bool found = false;
      for (const auto& other : p.candidates)
        found = found || distance(gk, other) <= 1e-10;
      if (!found)
        throw HypothesesViolated("ControlProblem: K is not G-invariant (image of a candidate missing)");
    }
  }
  Rng rng(seed);
  std::vector<double> x(p.state_dim), u(p.control_dim), fx(p.state_dim);
  std::vector<double> jac(static_cast<std::size_t>(p.state_dim) * p.state_dim);
  std::vector<double> jfd(jac.size());
  for (int s = 0; s < samples; ++s) {
    const double t = rng.uniform(0.0, p.horizon);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const Vector& k = p.candidates[static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<int>(p.candidates.size()) - 1))];
    std::copy(k.coords().begin(), k.coords().end(), u.begin());

    p.f(t, x, u, fx);
    double xdotf = 0.0, x2 = 0.0;
    for (int i = 0; i < p.state_dim; ++i) {
      xdotf += x[i] * fx[i];
      x2 += x[i] * x[i];
    }
    if (xdotf > coercivity_c * (1.0 + x2))
      throw HypothesesViolated("ControlProblem: <x, f(t,x,u)> exceeds C(1+|x|^2) at a sample");

    if (p.dfdx) {
      p.dfdx(t, x, u, jac);
      ControlProblem fd = p;
      fd.dfdx = nullptr;
      fd.eval_dfdx(t, x, u, jfd);
      for (std::size_t i = 0; i < jac.size(); ++i)
        if (std::abs(jac[i] - jfd[i]) > 1e-5 * (1.0 + std::abs(jfd[i])))
          throw HypothesesViolated("ControlProblem: Jacobian disagrees with finite differences");
    }
  }
}

/// Piecewise-constant control on N equal cells of [0, T].
struct ControlSignal {
  double horizon = 1.0;
  std::vector<Vector> cells;

  int n_cells() const { return static_cast<int>(cells.size()); }
  double cell_width() const { return horizon / n_cells(); }
};

/// Disagreement metric: (T/N) * #{cells where the values differ}.
inline double control_distance(const ControlSignal& a, const ControlSignal& b) {
  if (a.cells.empty() || a.n_cells() != b.n_cells() || a.horizon != b.horizon)
    throw GridMismatch("control_distance: signals live on different grids");
  int diff = 0;
  for (int i = 0; i < a.n_cells(); ++i)
    if (!(a.cells[i] == b.cells[i])) ++diff;
  return a.cell_width() * static_cast<double>(diff);
}

/// Dense trajectory at substep resolution; f values stored for Hermite
/// interpolation inside the adjoint pass.
struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> fy;
  int substeps_per_cell = 4;

  const std::vector<double>& terminal() const { return y.back(); }
};

/// Classical RK4 per cell with fixed substeps (global error O((T/N)^4)).
inline Trajectory simulate(const ControlProblem& p, const ControlSignal& sig, int substeps = 4) {
  if (sig.cells.empty()) throw GridMismatch("simulate: signal has no cells");
  const int n = sig.n_cells();
  const double dt = sig.cell_width() / substeps;
  Trajectory traj;
  traj.substeps_per_cell = substeps;
  std::vector<double> x = p.x0;
  std::vector<double> k1(p.state_dim), k2(p.state_dim), k3(p.state_dim), k4(p.state_dim),
      tmp(p.state_dim), fx(p.state_dim);

  const auto record = [&](double t) {
    p.f(t, x, sig.cells[std::min<int>(static_cast<int>(t / sig.cell_width()), n - 1)].span(), fx);
    traj.t.push_back(t);
    traj.y.push_back(x);
    traj.fy.push_back(fx);
  };
  const auto guard = [&] {
    if (norm_of(x, Norm::L2) > p.blowup_guard)
      throw Blowup("simulate: state norm exceeded the blow-up guard");
  };

  record(0.0);
  for (int c = 0; c < n; ++c) {
    const auto u = sig.cells[c].span();
    for (int s = 0; s < substeps; ++s) {
      const double t = c * sig.cell_width() + s * dt;
      p.f(t, x, u, k1);
      for (int i = 0; i < p.state_dim; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
      p.f(t + 0.5 * dt, tmp, u, k2);
      for (int i = 0; i < p.state_dim; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
      p.f(t + 0.5 * dt, tmp, u, k3);
      for (int i = 0; i < p.state_dim; ++i) tmp[i] = x[i] + dt * k3[i];
      p.f(t + dt, tmp, u, k4);
      for (int i = 0; i < p.state_dim; ++i)
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      guard();
      record(t + dt);
    }
  }
  return traj;
}

/// Adjoint state p(t) on the trajectory's grid: backward RK4 on
/// dp/dt = -(df/dx)^T p from p(T) = h'(y(T)), with 4th-order Hermite
/// interpolation of y at substep midpoints.
struct AdjointState {
  std::vector<double> t;
  std::vector<std::vector<double>> p;

  /// Adjoint at time tt (grid lookup; the grid is uniform).
  const std::vector<double>& at_time(double tt) const {
    const double dt = t[1] - t[0];
    int k = static_cast<int>(std::llround((tt - t[0]) / dt));
    k = std::max(0, std::min<int>(k, static_cast<int>(t.size()) - 1));
    return p[k];
  }
};

inline AdjointState adjoint(const ControlProblem& prob, const Trajectory& traj,
                            const ControlSignal& sig) {
  const int steps = static_cast<int>(traj.t.size());
  AdjointState adj;
  adj.t = traj.t;
  adj.p.assign(steps, std::vector<double>(prob.state_dim, 0.0));

  std::vector<double> p(prob.state_dim);
  prob.eval_dh(traj.y.back(), p);
  adj.p[steps - 1] = p;

  std::vector<double> jac(static_cast<std::size_t>(prob.state_dim) * prob.state_dim);
  std::vector<double> k1(prob.state_dim), k2(prob.state_dim), k3(prob.state_dim),
      k4(prob.state_dim), tmp(prob.state_dim), ymid(prob.state_dim), f0(prob.state_dim),
      f1(prob.state_dim);

  const auto rhs = [&](double t, std::span<const double> y, std::span<const double> u,
                       std::span<const double> pv, std::span<double> out) {
    prob.eval_dfdx(t, y, u, jac);
    for (int i = 0; i < prob.state_dim; ++i) {
      double s = 0.0;
      for (int j = 0; j < prob.state_dim; ++j)
        s += jac[static_cast<std::size_t>(j) * prob.state_dim + i] * pv[j];
      out[i] = -s;
    }
  };

  const double cell_w = sig.cell_width();
  for (int k = steps - 1; k > 0; --k) {
    const double t1 = traj.t[k], t0 = traj.t[k - 1];
    const double dt = t1 - t0;
    const int cell = std::min<int>(static_cast<int>((t0 + 0.5 * dt) / cell_w), sig.n_cells() - 1);
    const auto u = sig.cells[cell].span();
    // Cubic Hermite midpoint of y over [t0, t1] keeps the backward pass 4th
    // order; slopes are recomputed with the interval's own control so cell
    // boundaries stay consistent.
    prob.f(t0, traj.y[k - 1], u, f0);
    prob.f(t1, traj.y[k], u, f1);
    for (int i = 0; i < prob.state_dim; ++i)
      ymid[i] = 0.5 * (traj.y[k - 1][i] + traj.y[k][i]) + dt / 8.0 * (f0[i] - f1[i]);

    rhs(t1, traj.y[k], u, p, k1);
    for (int i = 0; i < prob.state_dim; ++i) tmp[i] = p[i] - 0.5 * dt * k1[i];
    rhs(t1 - 0.5 * dt, ymid, u, tmp, k2);
    for (int i = 0; i < prob.state_dim; ++i) tmp[i] = p[i] - 0.5 * dt * k2[i];
    rhs(t1 - 0.5 * dt, ymid, u, tmp, k3);
    for (int i = 0; i < prob.state_dim; ++i) tmp[i] = p[i] - dt * k3[i];
    rhs(t0, traj.y[k - 1], u, tmp, k4);
    for (int i = 0; i < prob.state_dim; ++i)
      p[i] -= dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    adj.p[k - 1] = p;
  }
  return adj;
}

/// Invariant members of K: fixed candidates plus deduplicated orbit averages
/// that land back in K (exact for convex sampled boxes).
inline std::vector<Vector> invariant_candidates(const ControlProblem& p, double tol = 1e-10) {
  std::vector<Vector> out;
  const auto push_unique = [&](const Vector& v) {
    for (const auto& o : out)
      if (distance(o, v) <= tol) return;
    out.push_back(v);
  };
  for (const auto& k : p.candidates) {
    const Vector kbar = symmetrize(k, *p.group);
    if (distance(kbar, k) <= tol) push_unique(k);
  }
  return out;
}

struct NeedleCellReport {
  int cell = 0;
  double time = 0.0;          // cell midpoint used for the check
  double hamiltonian = 0.0;   // <f(t, y, v), p>
  double invariant_min = 0.0; // min over K_G of <f(t, y, u), p>
  double slack = 0.0;         // hamiltonian - invariant_min
  bool ok = false;            // slack <= epsilon
};

struct EpsilonOptimalResult {
  ControlSignal signal;
  Trajectory trajectory;
  AdjointState adjoint_state;
  double terminal_cost = 0.0;
  int needle_steps = 0;
  int sweeps = 0;
  std::vector<double> cost_trace;       // after each accepted needle
  std::vector<double> step_distances;   // disagreement moved per accepted needle
  std::vector<NeedleCellReport> verification;
  double max_slack = 0.0;
  bool verified = false;  // every cell's slack <= epsilon
};

struct EpsilonOptimalOptions {
  int substeps = 4;
  int max_needles = 100000;
  bool validate = true;
};

/// Descent over the disagreement metric by single-cell needle replacements:
/// a needle (cell, invariant candidate) is accepted when it improves the
/// terminal cost by more than eps * (T/N) — the variational slope bound —
/// best improvement first, ties broken by earliest cell then lowest
/// candidate index. On termination the pointwise approximate minimum
/// principle is verified cell by cell against the adjoint state.
inline EpsilonOptimalResult epsilon_optimal(const ControlProblem& prob, double eps, int n_cells,
                                            const EpsilonOptimalOptions& opt = {}) {
  if (eps <= 0.0) throw Error("epsilon_optimal: eps must be positive");
  if (opt.validate) validate_problem(prob);
  const std::vector<Vector> kg = invariant_candidates(prob);
  if (kg.empty())
    throw HypothesesViolated("epsilon_optimal: K has no G-invariant candidates");

  EpsilonOptimalResult res;
  res.signal.horizon = prob.horizon;
  res.signal.cells.assign(n_cells, kg.front());
  const double cell_w = res.signal.cell_width();
  const double accept_threshold = eps * cell_w;

  const auto cost_of = [&](const ControlSignal& s) {
    return prob.h(simulate(prob, s, opt.substeps).terminal());
  };

  double cur_cost = cost_of(res.signal);
  res.cost_trace.push_back(cur_cost);

  for (int step = 0; step < opt.max_needles; ++step) {
    double best_cost = cur_cost;
    int best_cell = -1;
    std::size_t best_k = 0;
    for (int c = 0; c < n_cells; ++c) {
      const Vector original = res.signal.cells[c];
      for (std::size_t k = 0; k < kg.size(); ++k) {
        if (kg[k] == original) continue;
        res.signal.cells[c] = kg[k];
        const double trial = cost_of(res.signal);
        if (trial < best_cost && cur_cost - trial > accept_threshold) {
          best_cost = trial;
          best_cell = c;
          best_k = k;
        }
      }
      res.signal.cells[c] = original;
    }
    ++res.sweeps;
    if (best_cell < 0) break;
    const ControlSignal before = res.signal;
    res.signal.cells[best_cell] = kg[best_k];
    res.step_distances.push_back(control_distance(before, res.signal));
    cur_cost = best_cost;
    res.cost_trace.push_back(cur_cost);
    ++res.needle_steps;
  }

  res.trajectory = simulate(prob, res.signal, opt.substeps);
  res.adjoint_state = adjoint(prob, res.trajectory, res.signal);
  res.terminal_cost = prob.h(res.trajectory.terminal());

  // Pointwise verification at cell midpoints.
  std::vector<double> fv(prob.state_dim);
  res.verified = true;
  for (int c = 0; c < n_cells; ++c) {
    NeedleCellReport rep;
    rep.cell = c;
    // Cell representative: the substep node nearest the midpoint.
    const int idx = c * opt.substeps + opt.substeps / 2;
    rep.time = res.trajectory.t[idx];
    const auto& y = res.trajectory.y[idx];
    const auto& pv = res.adjoint_state.p[idx];
    prob.f(rep.time, y, res.signal.cells[c].span(), fv);
    double hv = 0.0;
    for (int i = 0; i < prob.state_dim; ++i) hv += fv[i] * pv[i];
    rep.hamiltonian = hv;
    rep.invariant_min = kInf;
    for (const auto& k : kg) {
      prob.f(rep.time, y, k.span(), fv);
      double hk = 0.0;
      for (int i = 0; i < prob.state_dim; ++i) hk += fv[i] * pv[i];
      rep.invariant_min = std::min(rep.invariant_min, hk);
    }
    rep.slack = rep.hamiltonian - rep.invariant_min;
    rep.ok = rep.slack <= eps;
    res.max_slack = std::max(res.max_slack, rep.slack);
    res.verified = res.verified && rep.ok;
    res.verification.push_back(rep);
  }
  return res;
}

}  // namespace symvar
