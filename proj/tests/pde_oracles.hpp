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

// Test-side numerical oracles, written independently of the library's
// assembly code paths: a centered-difference area integral, a damped Newton
// solver for the discrete minimal-surface system (finite-difference Jacobian
// plus dense Gaussian elimination) and a dense Dirichlet-Laplace solve.

#include <cmath>
#include <vector>

#include "symvar/pde.hpp"

namespace oracle {

using symvar::GridField;

/// Area of the graph with centered interior differences (one-sided at the
/// edges) and nodal quadrature — a different discretization of the same
/// integral, agreeing with the cell form to O(h).
inline double centered_area_energy(const GridField& w, double h) {
  const int m = w.m;
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int ip = std::min(i + 1, m - 1), im = std::max(i - 1, 0);
      const int jp = std::min(j + 1, m - 1), jm = std::max(j - 1, 0);
      const double gx = (w(ip, j) - w(im, j)) / ((ip - im) * h);
      const double gy = (w(i, jp) - w(i, jm)) / ((jp - jm) * h);
      // Trapezoid-style weights: corners 1/4, edges 1/2, interior 1.
      double wgt = 1.0;
      if (i == 0 || i == m - 1) wgt *= 0.5;
      if (j == 0 || j == m - 1) wgt *= 0.5;
      acc += wgt * h * h * std::sqrt(1.0 + gx * gx + gy * gy);
    }
  return acc;
}

/// Forward-difference minimal-surface residual on the full unit square with
/// zero boundary values, re-assembled node-centrically (not shared with the
/// library's cell loop).
inline void plateau_residual(const std::vector<double>& u, const GridField& load, int m,
                             std::vector<double>& r) {
  const double h = 1.0 / (m - 1);
  const auto at = [&](int i, int j) -> double {
    if (i <= 0 || j <= 0 || i >= m - 1 || j >= m - 1) return 0.0;
    return u[(i - 1) * (m - 2) + (j - 1)];
  };
  const auto flux0 = [&](int i, int j) {  // cell (i,j), derivative direction i
    const double g0 = (at(i + 1, j) - at(i, j)) / h;
    const double g1 = (at(i, j + 1) - at(i, j)) / h;
    return g0 / std::sqrt(1.0 + g0 * g0 + g1 * g1);
  };
  const auto flux1 = [&](int i, int j) {
    const double g0 = (at(i + 1, j) - at(i, j)) / h;
    const double g1 = (at(i, j + 1) - at(i, j)) / h;
    return g1 / std::sqrt(1.0 + g0 * g0 + g1 * g1);
  };
  for (int i = 1; i < m - 1; ++i)
    for (int j = 1; j < m - 1; ++j) {
      const double div = (flux0(i, j) - flux0(i - 1, j)) / h + (flux1(i, j) - flux1(i, j - 1)) / h;
      r[(i - 1) * (m - 2) + (j - 1)] = -div - load(i, j);
    }
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[piv * n + col])) piv = row;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    const double d = a[col * n + col];
    for (int row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / d;
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int k = row + 1; k < n; ++k) s -= a[row * n + k] * x[k];
    x[row] = s / a[row * n + row];
  }
  return x;
}

/// Damped Newton on the nonlinear minimal-surface system (zero boundary,
/// interior load), finite-difference Jacobian.
inline GridField newton_plateau(int m, const GridField& load, double tol = 1e-12) {
  const int n = (m - 2) * (m - 2);
  std::vector<double> u(n, 0.0), r(n), rp(n), rm(n), jac(static_cast<std::size_t>(n) * n);

  const auto norm_inf = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };

  plateau_residual(u, load, m, r);
  for (int it = 0; it < 60 && norm_inf(r) > tol; ++it) {
    const double delta = 1e-7;
    for (int k = 0; k < n; ++k) {
      const double uk = u[k];
      u[k] = uk + delta;
      plateau_residual(u, load, m, rp);
      u[k] = uk - delta;
      plateau_residual(u, load, m, rm);
      u[k] = uk;
      for (int row = 0; row < n; ++row)
        jac[static_cast<std::size_t>(row) * n + k] = (rp[row] - rm[row]) / (2.0 * delta);
    }
    std::vector<double> rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = -r[k];
    const std::vector<double> step = solve_dense(jac, rhs);
    double alpha = 1.0;
    const double base = norm_inf(r);
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> trial = u;
      for (int k = 0; k < n; ++k) trial[k] += alpha * step[k];
      plateau_residual(trial, load, m, rp);
      if (norm_inf(rp) < base) {
        u = std::move(trial);
        r = rp;
        break;
      }
      alpha *= 0.5;
    }
  }

  GridField out(m);
  for (int i = 1; i < m - 1; ++i)
    for (int j = 1; j < m - 1; ++j) out.at(i, j) = u[(i - 1) * (m - 2) + (j - 1)];
  return out;
}

/// Dense 5-point Dirichlet Laplace solve: interior u with boundary values
/// taken from bc.
inline GridField laplace_solve_dense(int m, const GridField& bc) {
  const int n = (m - 2) * (m - 2);
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0), b(n, 0.0);
  const auto idx = [m](int i, int j) { return (i - 1) * (m - 2) + (j - 1); };
  for (int i = 1; i < m - 1; ++i)
    for (int j = 1; j < m - 1; ++j) {
      const int row = idx(i, j);
      a[static_cast<std::size_t>(row) * n + row] = 4.0;
      const int ni[4] = {i - 1, i + 1, i, i};
      const int nj[4] = {j, j, j - 1, j + 1};
      for (int k = 0; k < 4; ++k) {
        if (ni[k] == 0 || ni[k] == m - 1 || nj[k] == 0 || nj[k] == m - 1)
          b[row] += bc(ni[k], nj[k]);
        else
          a[static_cast<std::size_t>(row) * n + idx(ni[k], nj[k])] = -1.0;
      }
    }
  const std::vector<double> u = solve_dense(std::move(a), std::move(b));
  GridField out = bc;
  for (int i = 1; i < m - 1; ++i)
    for (int j = 1; j < m - 1; ++j) out.at(i, j) = u[idx(i, j)];
  return out;
}

}  // namespace oracle
