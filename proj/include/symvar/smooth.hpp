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

struct NotBoundedBelowSuspected : Error {
  using Error::Error;
};
struct InvarianceViolated : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct TargetOutsideBall : HypothesisError {
  using HypothesisError::HypothesisError;
};
struct CoercivityViolated : HypothesisError {
  using HypothesisError::HypothesisError;
};

/// G-invariant, Gateaux differentiable functional on R^n. The gradient is
/// optional; central differences stand in when it is absent.
struct SmoothFunctional {
  int dimension = 0;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;  // may be empty
  const FiniteGroup* group = nullptr;  // required
  double floor = -1e12;                // descent below this flags unboundedness

  double operator()(std::span<const double> x) const { return value(x); }

  void grad(std::span<const double> x, std::span<double> out) const {
    if (gradient) {
      gradient(x, out);
      return;
    }
    std::vector<double> xs(x.begin(), x.end());
    const double h = 1e-6 * (1.0 + norm_of(x, Norm::L2));
    for (int i = 0; i < dimension; ++i) {
      const double xi = xs[i];
      xs[i] = xi + h;
      const double fp = value(xs);
      xs[i] = xi - h;
      const double fm = value(xs);
      xs[i] = xi;
      out[i] = (fp - fm) / (2.0 * h);
    }
  }
};

/// Max over samples of ||grad_analytic - grad_fd|| / (1 + ||grad_fd||),
/// central differences with step 1e-6 (1 + ||x||).
inline double gradient_check(const SmoothFunctional& phi, std::span<const Vector> samples) {
  if (!phi.gradient) throw Error("gradient_check: no analytic gradient present");
  double worst = 0.0;
  std::vector<double> ga(phi.dimension), gfd(phi.dimension), xs(phi.dimension);
  for (const Vector& x : samples) {
    phi.gradient(x.span(), ga);
    std::copy(x.coords().begin(), x.coords().end(), xs.begin());
    const double h = 1e-6 * (1.0 + norm_of(x.span(), Norm::L2));
    for (int i = 0; i < phi.dimension; ++i) {
      const double xi = xs[i];
      xs[i] = xi + h;
      const double fp = phi.value(xs);
      xs[i] = xi - h;
      const double fm = phi.value(xs);
      xs[i] = xi;
      gfd[i] = (fp - fm) / (2.0 * h);
    }
    double diff2 = 0.0;
    for (int i = 0; i < phi.dimension; ++i) diff2 += (ga[i] - gfd[i]) * (ga[i] - gfd[i]);
    worst = std::max(worst, std::sqrt(diff2) / (1.0 + norm_of(gfd, Norm::L2)));
  }
  return worst;
}

/// Sampled validation of the Lemma hypotheses: invariance of the values
/// (1e-9), convexity with respect to the group, and gradient consistency
/// (1e-5 relative) when an analytic gradient is present.
inline void validate_functional(const SmoothFunctional& phi, int samples = 24,
                                std::uint64_t seed = 7) {
  if (!phi.group) throw Error("SmoothFunctional: group reference missing");
  Rng rng(seed);
  std::vector<Vector> xs;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(phi.dimension);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    xs.emplace_back(std::move(x), phi.group->norm_tag);
  }
  for (const Vector& x : xs) {
    const double fx = phi.value(x.span());
    for (const auto& g : phi.group->elements) {
      const Vector gx = g.apply(x);
      if (std::abs(phi.value(gx.span()) - fx) > 1e-9 * (1.0 + std::abs(fx)))
        throw InvarianceViolated("SmoothFunctional: phi(g(x)) != phi(x) at a sampled point");
    }
  }
  const auto rep = is_convex_wrt_group([&](const Vector& v) { return phi.value(v.span()); },
                                       *phi.group, xs);
  if (!rep.convex)
    throw InvarianceViolated("SmoothFunctional: phi is not convex with respect to G at a sample");
  if (phi.gradient && gradient_check(phi, xs) > 1e-5)
    throw Error("SmoothFunctional: analytic gradient disagrees with central differences");
}

struct PSOptions {
  double grad_tol = 1e-8;
  int k_max = 100000;
  double armijo_c = 1e-4;
  double initial_step = 1.0;
  bool sequence_mode = false;  // record the gamma_n = 1/n milestone iterates
  bool validate = true;
  int invariance_check_stride = 16;
};

struct PSMilestone {
  int n = 0;         // tolerance index: ||proj grad|| <= 1/n
  int iteration = 0;
  double value = 0.0;
  double grad_norm = 0.0;
};

/// Minimizing sequence restricted to Fix(G): values non-increasing, iterates
/// invariant by construction, projected gradient norms reported per step.
struct PSSequence {
  std::vector<double> values;
  std::vector<double> proj_grad_norms;
  std::vector<double> full_grad_norms;
  std::vector<double> invariance_residuals;
  Vector final_x;
  double final_value = 0.0;
  double final_proj_grad = 0.0;
  double final_full_grad = 0.0;
  int iterations = 0;
  bool converged = false;
  bool x0_symmetrized = false;
  std::vector<PSMilestone> milestones;
};

/// Projected gradient descent with Armijo backtracking on the invariant
/// subspace; the constructive realization of the minimizing-sequence lemma.
inline PSSequence palais_smale(const SmoothFunctional& phi, const Vector& x0,
                               const PSOptions& opt = {}) {
  if (!phi.group) throw Error("palais_smale: group reference missing");
  if (static_cast<int>(x0.size()) != phi.dimension)
    throw DimensionMismatch("palais_smale: x0 dimension");
  if (opt.validate) validate_functional(phi);

  const InvariantBasis basis(*phi.group);
  const int n = phi.dimension, k = basis.invariant_dim();

  PSSequence seq;
  Vector start = x0;
  if (!is_invariant_point(x0, *phi.group, 1e-12)) {
    start = symmetrize(x0, *phi.group);
    seq.x0_symmetrized = true;
  }

  std::vector<double> z(k), x(n), g(n), gz(k), z_trial(k), x_trial(n);
  basis.to_invariant(start.span(), z);
  basis.to_full(z, x);

  const auto eval = [&](const std::vector<double>& zz, std::vector<double>& xx) {
    basis.to_full(zz, xx);
    return phi.value(xx);
  };

  double fx = phi.value(x);
  double step = opt.initial_step;
  int next_milestone = 1;

  for (int it = 0; it < opt.k_max; ++it) {
    phi.grad(x, g);
    basis.to_invariant(g, gz);
    const double pg = norm_of(gz, Norm::L2);
    const double fg = norm_of(g, Norm::L2);

    double inv_res = 0.0;
    if (opt.invariance_check_stride > 0 && it % opt.invariance_check_stride == 0) {
      std::vector<double> gx(n);
      for (const auto& a : phi.group->elements) {
        a.apply(x, gx);
        for (int i = 0; i < n; ++i) inv_res = std::max(inv_res, std::abs(gx[i] - x[i]));
      }
    }

    seq.values.push_back(fx);
    seq.proj_grad_norms.push_back(pg);
    seq.full_grad_norms.push_back(fg);
    seq.invariance_residuals.push_back(inv_res);

    if (opt.sequence_mode) {
      // The 1/n tolerance schedule, recorded at doubling n so the log stays
      // compact; milestones below the stopping tolerance are unreachable.
      while (pg <= 1.0 / next_milestone && 1.0 / next_milestone >= opt.grad_tol) {
        seq.milestones.push_back({next_milestone, it, fx, pg});
        next_milestone *= 2;
      }
    }

    if (pg <= opt.grad_tol) {
      seq.converged = true;
      seq.iterations = it;
      break;
    }

    // Armijo backtracking along the projected steepest descent direction.
    double alpha = std::min(step * 2.0, 1e8);
    bool moved = false;
    const double pg2 = pg * pg;
    for (int bt = 0; bt < 60; ++bt) {
      for (int c = 0; c < k; ++c) z_trial[c] = z[c] - alpha * gz[c];
      const double ft = eval(z_trial, x_trial);
      if (ft <= fx - opt.armijo_c * alpha * pg2) {
        z.swap(z_trial);
        x.swap(x_trial);
        fx = ft;
        step = alpha;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) {
      // Stuck at machine precision; report what was reached.
      seq.iterations = it;
      seq.converged = pg <= opt.grad_tol;
      break;
    }
    if (fx < phi.floor)
      throw NotBoundedBelowSuspected("palais_smale: objective fell below the declared floor " +
                                     std::to_string(phi.floor));
    seq.iterations = it + 1;
  }

  phi.grad(x, g);
  basis.to_invariant(g, gz);
  seq.final_x = Vector(x, phi.group->norm_tag);
  seq.final_value = fx;
  seq.final_proj_grad = norm_of(gz, Norm::L2);
  seq.final_full_grad = norm_of(g, Norm::L2);
  seq.converged = seq.converged || seq.final_proj_grad <= opt.grad_tol;
  return seq;
}

struct ProbeResult {
  Vector x;
  double residual = 0.0;  // projected gradient of the tilted functional
  PSSequence sequence;
};

/// Inverts the gradient map near a dual target T inside the coercivity ball:
/// minimizes phi - <T, .> over Fix(G) and returns the approximate preimage.
inline ProbeResult dense_range_probe(const SmoothFunctional& phi, const Vector& target, double k,
                                     double eps, const PSOptions& opt_in = {}) {
  if (!phi.group) throw Error("dense_range_probe: group reference missing");
  if (static_cast<int>(target.size()) != phi.dimension)
    throw DimensionMismatch("dense_range_probe: target dimension");
  const double dual = norm_of(target.span(), dual_norm(phi.group->norm_tag));
  if (dual >= k)
    throw TargetOutsideBall("dense_range_probe: ||T||_* = " + std::to_string(dual) +
                            " >= k = " + std::to_string(k));
  if (!is_invariant_point(target, *phi.group, 1e-10))
    throw InvarianceViolated("dense_range_probe: target T is not G-invariant");

  // Coercivity phi(x) >= k ||x|| + c spot-checked on rays.
  {
    Rng rng(11);
    for (int s = 0; s < 8; ++s) {
      std::vector<double> u(phi.dimension);
      for (double& v : u) v = rng.uniform(-1.0, 1.0);
      const double nu = norm_of(u, phi.group->norm_tag);
      if (nu == 0.0) continue;
      for (double& v : u) v /= nu;
      const double t = 1e4;
      std::vector<double> xu(u);
      for (double& v : xu) v *= t;
      const double lower_slope = (phi.value(xu) - phi.value(std::vector<double>(phi.dimension, 0.0))) / t;
      if (lower_slope < k - 1e-6)
        throw CoercivityViolated("dense_range_probe: sampled ray slope " +
                                 std::to_string(lower_slope) + " below k = " + std::to_string(k));
    }
  }

  SmoothFunctional tilted = phi;
  tilted.value = [&phi, target](std::span<const double> x) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += target[i] * x[i];
    return phi.value(x) - t;
  };
  if (phi.gradient) {
    tilted.gradient = [&phi, target](std::span<const double> x, std::span<double> out) {
      phi.gradient(x, out);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= target[i];
    };
  } else {
    tilted.gradient = nullptr;
  }

  if (opt_in.validate) validate_functional(phi);
  PSOptions opt = opt_in;
  opt.grad_tol = eps;
  opt.validate = false;  // base functional already validated above
  ProbeResult res;
  res.sequence = palais_smale(tilted, Vector::zeros(phi.dimension, phi.group->norm_tag), opt);
  res.x = res.sequence.final_x;
  res.residual = res.sequence.final_proj_grad;
  return res;
}

}  // namespace symvar
