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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "symvar/control.hpp"
#include "symvar/expr.hpp"
#include "symvar/geometry.hpp"
#include "symvar/metric.hpp"
#include "symvar/pde.hpp"
#include "symvar/variational.hpp"

namespace symvar {

using json = nlohmann::json;

struct ConfigParse : Error {
  using Error::Error;
};

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParse("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigParse(path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

/// Reports are serialized with sorted keys and no volatile fields; repeated
/// runs with the same seed are byte-identical. Timings go to a side file.
inline std::string report_to_string(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Group description files.
// { "dimension": 2, "norm": "l2",
//   "elements": [ {"perm": [2,1]}, {"cycles": [[1,2]]}, {"matrix": [[...]]} ] }
// Permutations are 1-indexed (full images or disjoint cycles).

inline Action parse_action(const json& je, int dim) {
  if (je.contains("perm")) {
    const auto v = je.at("perm").get<std::vector<int>>();
    if (static_cast<int>(v.size()) != dim) throw ConfigParse("perm: wrong length");
    std::vector<int> img(dim);
    for (int i = 0; i < dim; ++i) {
      if (v[i] < 1 || v[i] > dim) throw ConfigParse("perm: entries are 1-indexed images");
      img[i] = v[i] - 1;
    }
    return Action::permutation(std::move(img));
  }
  if (je.contains("cycles")) {
    std::vector<int> img(dim);
    std::iota(img.begin(), img.end(), 0);
    for (const auto& cyc : je.at("cycles")) {
      const auto c = cyc.get<std::vector<int>>();
      for (std::size_t i = 0; i < c.size(); ++i) {
        const int from = c[i] - 1, to = c[(i + 1) % c.size()] - 1;
        if (from < 0 || from >= dim || to < 0 || to >= dim)
          throw ConfigParse("cycles: index out of range");
        img[from] = to;
      }
    }
    return Action::permutation(std::move(img));
  }
  if (je.contains("matrix")) {
    auto m = je.at("matrix").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(m.size()) != dim) throw ConfigParse("matrix: wrong shape");
    return Action::matrix(std::move(m));
  }
  throw ConfigParse("group element needs one of: perm, cycles, matrix");
}

inline FiniteGroup load_group(const json& j) {
  const int dim = j.at("dimension").get<int>();
  const Norm tag = norm_from_name(j.value("norm", "l2"));
  std::vector<Action> els;
  for (const auto& je : j.at("elements")) els.push_back(parse_action(je, dim));
  return check_group(std::move(els), tag);
}

inline FiniteGroup load_group_ref(const json& j, const std::string& key = "group") {
  if (!j.contains(key)) throw ConfigParse("missing '" + key + "'");
  const auto& jg = j.at(key);
  if (jg.is_string()) return load_group(load_json_file(jg.get<std::string>()));
  return load_group(jg);
}

// ---------------------------------------------------------------------------
// Finite-metric-space instance files.
// { "n": 5, "metric": {"kind": "path"}, "permutations": [[2,1,4,3,5]],
//   "f": [...]  or  "bifunction": [[...], ...],
//   "map": {"kind": "descent-argmin"} | {"kind": "table", "sets": [[...],...]} }

struct EkelandInstance {
  std::shared_ptr<FiniteMetricSpace> space;
  std::optional<ScalarObjective> objective;
  std::optional<Bifunction> bifunction;
  std::optional<MultiMap> map;
};

inline EkelandInstance load_ekeland_instance(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<std::vector<int>> perms;
  if (j.contains("permutations"))
    for (const auto& jp : j.at("permutations")) {
      const auto v = jp.get<std::vector<int>>();
      if (static_cast<int>(v.size()) != n) throw ConfigParse("permutation: wrong length");
      std::vector<int> p(n);
      for (int i = 0; i < n; ++i) {
        if (v[i] < 1 || v[i] > n) throw ConfigParse("permutation: entries are 1-indexed");
        p[i] = v[i] - 1;
      }
      perms.push_back(std::move(p));
    }

  EkelandInstance inst;
  const auto& jm = j.at("metric");
  const std::string kind = jm.at("kind").get<std::string>();
  if (kind == "path") {
    inst.space = std::make_shared<FiniteMetricSpace>(FiniteMetricSpace::path(n, perms));
  } else if (kind == "grid") {
    inst.space = std::make_shared<FiniteMetricSpace>(
        FiniteMetricSpace::grid(jm.at("rows").get<int>(), jm.at("cols").get<int>(), perms));
  } else if (kind == "random") {
    Rng rng(jm.value("seed", 1));
    inst.space =
        std::make_shared<FiniteMetricSpace>(FiniteMetricSpace::random_repaired(n, rng, perms));
  } else if (kind == "matrix") {
    const auto rows = jm.at("d").get<std::vector<std::vector<double>>>();
    std::vector<double> d;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != n) throw ConfigParse("metric matrix: wrong shape");
      d.insert(d.end(), r.begin(), r.end());
    }
    inst.space = std::make_shared<FiniteMetricSpace>(n, std::move(d), perms);
  } else {
    throw ConfigParse("metric kind must be path|grid|random|matrix");
  }

  if (j.contains("f")) {
    ScalarObjective obj;
    for (const auto& v : j.at("f"))
      obj.f.push_back(v.is_string() ? kInf : v.get<double>());  // "inf" marks +infinity
    if (static_cast<int>(obj.f.size()) != inst.space->size())
      throw ConfigParse("f: wrong length");
    inst.objective = std::move(obj);
  }
  if (j.contains("bifunction")) {
    Bifunction b = Bifunction::zeros(inst.space->size());
    const auto rows = j.at("bifunction").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != b.n) throw ConfigParse("bifunction: wrong shape");
    for (int i = 0; i < b.n; ++i)
      for (int jj = 0; jj < b.n; ++jj) b.at(i, jj) = rows[i][jj];
    inst.bifunction = std::move(b);
  }
  if (j.contains("map")) {
    const auto& jt = j.at("map");
    const std::string mk = jt.at("kind").get<std::string>();
    if (mk == "table") {
      MultiMap t;
      for (const auto& row : jt.at("sets")) {
        std::vector<int> set;
        for (const auto& v : row) set.push_back(v.get<int>());
        t.push_back(std::move(set));
      }
      if (static_cast<int>(t.size()) != inst.space->size())
        throw ConfigParse("map table: wrong length");
      inst.map = std::move(t);
    } else if (mk == "descent-argmin") {
      if (!inst.bifunction) throw ConfigParse("map descent-argmin needs a bifunction");
      const auto& m = *inst.space;
      const auto& f = *inst.bifunction;
      MultiMap t(m.size());
      for (int y = 0; y < m.size(); ++y) {
        int best = -1;
        double best_val = kInf;
        for (int x : m.invariant_points()) {
          const double v = f(y, x) + m.dist(y, x);
          if (v < best_val) {
            best_val = v;
            best = x;
          }
        }
        if (best >= 0) t[y].push_back(best);
      }
      inst.map = std::move(t);
    } else {
      throw ConfigParse("map kind must be table|descent-argmin");
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Geometry scene files.
// { "a": [2,0], "b": [0,0], "gamma": 1.0, "norm": "l2",
//   "group": {...} | "file.json", "set": [[3,3]], "radius": 0.5,
//   "samples": 10000, "bbox": [[-4,-4],[4,4]] }

struct Scene {
  Vector a, b;
  double gamma = 1.0;
  FiniteGroup group;
  std::optional<PointCloud> cloud;
  double radius = -1.0;
  std::size_t samples = 10000;
  std::optional<std::pair<Vector, Vector>> bbox;
};

inline Scene load_scene(const json& j) {
  Scene sc;
  const Norm tag = norm_from_name(j.value("norm", "l2"));
  sc.a = Vector(j.at("a").get<std::vector<double>>(), tag);
  sc.b = Vector(j.at("b").get<std::vector<double>>(), tag);
  sc.gamma = j.value("gamma", 1.0);
  sc.group = j.contains("group") ? load_group_ref(j)
                                 : trivial_group(static_cast<int>(sc.a.size()), tag);
  if (j.contains("set")) {
    std::vector<Vector> pts;
    for (const auto& p : j.at("set")) pts.emplace_back(p.get<std::vector<double>>(), tag);
    sc.cloud = PointCloud(std::move(pts));
  }
  sc.radius = j.value("radius", -1.0);
  sc.samples = j.value("samples", static_cast<std::size_t>(10000));
  if (j.contains("bbox")) {
    const auto bb = j.at("bbox").get<std::vector<std::vector<double>>>();
    sc.bbox = std::make_pair(Vector(bb.at(0), tag), Vector(bb.at(1), tag));
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Grid problem files (Plateau / p-Laplacian).
// { "m": 33, "group": "transpose", "problem": "plateau",
//   "boundary": "x + y", "load": "0", "p": 2.0, "alpha": 0.0,
//   "tol": 1e-8, "max_iters": 100000, "outer_root": false }

struct GridProblem {
  int m = 17;
  std::string group = "transpose";
  std::string kind = "plateau";
  GridField boundary_field;  // evaluated everywhere; solver fixes the boundary
  GridField load_field;
  double p = 2.0;
  double alpha = 0.0;
  double tol = 1e-8;
  int max_iters = 100000;
  bool outer_root = false;
};

inline GridProblem load_grid_problem(const json& j) {
  GridProblem gp;
  gp.m = j.at("m").get<int>();
  gp.group = j.value("group", "transpose");
  gp.kind = j.value("problem", "plateau");
  gp.p = j.value("p", 2.0);
  gp.alpha = j.value("alpha", 0.0);
  gp.tol = j.value("tol", 1e-8);
  gp.max_iters = j.value("max_iters", 100000);
  gp.outer_root = j.value("outer_root", false);

  SymmetricGrid grid(gp.m, gp.group);
  const Expr bexpr = Expr::parse(j.value("boundary", "0"), {"x", "y"});
  const Expr lexpr = Expr::parse(j.value("load", "0"), {"x", "y"});
  gp.boundary_field = GridField::from_function(
      grid, [&](double x, double y) { return bexpr.eval(std::array{x, y}); });
  gp.load_field = GridField::from_function(
      grid, [&](double x, double y) { return lexpr.eval(std::array{x, y}); });
  for (int i = 0; i < gp.m; ++i)
    for (int jj = 0; jj < gp.m; ++jj)
      if (!grid.interior(i, jj)) gp.load_field.at(i, jj) = 0.0;  // loads live on the interior
  return gp;
}

// ---------------------------------------------------------------------------
// Control problem files.
// { "dynamics": {"kind": "integrator"} |
//               {"kind": "linear", "A": [[...]], "B": [[...]]} |
//               {"kind": "expr", "f": ["u1", "x1 - u2"]},
//   "cost": {"kind": "quadratic-terminal", "target": [0,0]} | {"kind": "expr", "h": "..."},
//   "K": {"kind": "list", "values": [[-1],[0],[1]]} |
//        {"kind": "box", "lo": [-1], "hi": [1], "per_dim": 3},
//   "group": {...}, "x0": [1], "T": 1.0, "N": 8, "epsilon": 1e-3 }

struct ControlConfig {
  std::shared_ptr<ControlProblem> problem;
  std::shared_ptr<FiniteGroup> group;
  double epsilon = 1e-3;
  int n_cells = 8;
};

inline ControlConfig load_control_problem(const json& j) {
  ControlConfig cfg;
  auto prob = std::make_shared<ControlProblem>();
  prob->x0 = j.at("x0").get<std::vector<double>>();
  prob->state_dim = static_cast<int>(prob->x0.size());
  prob->horizon = j.at("T").get<double>();
  cfg.epsilon = j.value("epsilon", 1e-3);
  cfg.n_cells = j.value("N", 8);

  const auto& jd = j.at("dynamics");
  const std::string dk = jd.at("kind").get<std::string>();
  if (dk == "integrator") {
    prob->control_dim = prob->state_dim;
    prob->f = [](double, std::span<const double>, std::span<const double> u,
                 std::span<double> out) { std::copy(u.begin(), u.end(), out.begin()); };
    prob->dfdx = [](double, std::span<const double>, std::span<const double>,
                    std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  } else if (dk == "linear") {
    const auto a = jd.at("A").get<std::vector<std::vector<double>>>();
    const auto b = jd.at("B").get<std::vector<std::vector<double>>>();
    prob->control_dim = static_cast<int>(b.at(0).size());
    const int n = prob->state_dim;
    prob->f = [a, b, n](double, std::span<const double> x, std::span<const double> u,
                        std::span<double> out) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += a[i][k] * x[k];
        for (std::size_t k = 0; k < u.size(); ++k) s += b[i][k] * u[k];
        out[i] = s;
      }
    };
    prob->dfdx = [a, n](double, std::span<const double>, std::span<const double>,
                        std::span<double> out) {
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(i) * n + k] = a[i][k];
    };
  } else if (dk == "expr") {
    const auto fs = jd.at("f").get<std::vector<std::string>>();
    if (static_cast<int>(fs.size()) != prob->state_dim)
      throw ConfigParse("dynamics expr: need one component per state dimension");
    prob->control_dim = jd.value("control_dim", prob->state_dim);
    std::vector<std::string> names{"t"};
    for (int i = 1; i <= prob->state_dim; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= prob->control_dim; ++i) names.push_back("u" + std::to_string(i));
    auto exprs = std::make_shared<std::vector<Expr>>();
    for (const auto& s : fs) exprs->push_back(Expr::parse(s, names));
    const int sd = prob->state_dim, cd = prob->control_dim;
    prob->f = [exprs, sd, cd](double t, std::span<const double> x, std::span<const double> u,
                              std::span<double> out) {
      std::vector<double> vars(1 + sd + cd);
      vars[0] = t;
      for (int i = 0; i < sd; ++i) vars[1 + i] = x[i];
      for (int i = 0; i < cd; ++i) vars[1 + sd + i] = u[i];
      for (int i = 0; i < sd; ++i) out[i] = (*exprs)[i].eval(vars);
    };
  } else {
    throw ConfigParse("dynamics kind must be integrator|linear|expr");
  }

  const auto& jc = j.at("cost");
  const std::string ck = jc.at("kind").get<std::string>();
  if (ck == "quadratic-terminal") {
    const auto target = jc.value("target", std::vector<double>(prob->state_dim, 0.0));
    prob->h = [target](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - target[i]) * (x[i] - target[i]);
      return s;
    };
    prob->dh = [target](std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * (x[i] - target[i]);
    };
  } else if (ck == "expr") {
    std::vector<std::string> names;
    for (int i = 1; i <= prob->state_dim; ++i) names.push_back("x" + std::to_string(i));
    auto hx = std::make_shared<Expr>(Expr::parse(jc.at("h").get<std::string>(), names));
    prob->h = [hx](std::span<const double> x) {
      return hx->eval(std::vector<double>(x.begin(), x.end()));
    };
  } else {
    throw ConfigParse("cost kind must be quadratic-terminal|expr");
  }

  cfg.group = std::make_shared<FiniteGroup>(
      j.contains("group") ? load_group_ref(j) : trivial_group(prob->control_dim));
  prob->group = cfg.group.get();

  const auto& jk = j.at("K");
  const std::string kk = jk.at("kind").get<std::string>();
  if (kk == "list") {
    for (const auto& v : jk.at("values"))
      prob->candidates.emplace_back(v.get<std::vector<double>>(), cfg.group->norm_tag);
  } else if (kk == "box") {
    const auto lo = jk.at("lo").get<std::vector<double>>();
    const auto hi = jk.at("hi").get<std::vector<double>>();
    const int per_dim = jk.value("per_dim", 3);
    if (lo.size() != hi.size() || static_cast<int>(lo.size()) != prob->control_dim)
      throw ConfigParse("K box: lo/hi shape");
    // Tensor grid, then symmetrized: orbit averages stay inside the box.
    std::vector<std::vector<double>> pts{{}};
    for (int d = 0; d < prob->control_dim; ++d) {
      std::vector<std::vector<double>> next;
      for (const auto& pre : pts)
        for (int s = 0; s < per_dim; ++s) {
          auto q = pre;
          q.push_back(per_dim == 1 ? 0.5 * (lo[d] + hi[d])
                                   : lo[d] + (hi[d] - lo[d]) * s / (per_dim - 1.0));
          next.push_back(std::move(q));
        }
      pts = std::move(next);
    }
    for (auto& p : pts) prob->candidates.emplace_back(std::move(p), cfg.group->norm_tag);
    const std::size_t base = prob->candidates.size();
    for (std::size_t i = 0; i < base; ++i) {
      const Vector avg = symmetrize(prob->candidates[i], *cfg.group);
      bool present = false;
      for (const auto& c : prob->candidates) present = present || distance(c, avg) <= 1e-12;
      if (!present) prob->candidates.push_back(avg);
    }
  } else {
    throw ConfigParse("K kind must be list|box");
  }
  cfg.problem = std::move(prob);
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV helpers.

inline std::string csv_of_field(const GridField& u) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < u.m; ++i) {
    for (int j = 0; j < u.m; ++j) os << (j ? "," : "") << u(i, j);
    os << "\n";
  }
  return os.str();
}

inline std::string csv_of_signal(const ControlSignal& s) {
  std::ostringstream os;
  os.precision(17);
  os << "cell,t_start,t_end";
  for (std::size_t d = 0; d < s.cells[0].size(); ++d) os << ",u" << d + 1;
  os << "\n";
  for (int c = 0; c < s.n_cells(); ++c) {
    os << c << "," << c * s.cell_width() << "," << (c + 1) * s.cell_width();
    for (std::size_t d = 0; d < s.cells[c].size(); ++d) os << "," << s.cells[c][d];
    os << "\n";
  }
  return os.str();
}

inline std::string csv_of_trajectory(const Trajectory& tr) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  for (std::size_t d = 0; d < tr.y[0].size(); ++d) os << ",x" << d + 1;
  os << "\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    os << tr.t[k];
    for (double v : tr.y[k]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

inline json vector_json(const Vector& v) {
  json out = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace symvar
