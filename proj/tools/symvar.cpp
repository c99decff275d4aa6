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
#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "symvar/io.hpp"
#include "symvar/smooth.hpp"
#include "symvar/svg.hpp"
#include "symvar/variational.hpp"

namespace fs = std::filesystem;
using namespace symvar;

namespace {

constexpr const char* kSchema = "symvar-report/1";

struct Out {
  std::string dir = ".";
  std::string report_name = "report.json";

  fs::path path(const std::string& name) const {
    fs::create_directories(dir);
    return fs::path(dir) / name;
  }
  void write_report(const json& j) const {
    write_text_file(path(report_name).string(), report_to_string(j));
    std::cout << report_to_string(j);
  }
  void write_timings(double seconds) const {
    json t;
    t["wall_seconds"] = seconds;
    write_text_file(path("timings.json").string(), report_to_string(t));
  }
};

std::vector<double> parse_coords(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

json check_result_json(const CheckResult& r) {
  json j;
  j["ok"] = r.ok;
  if (r.witness) j["witness"] = vector_json(*r.witness);
  return j;
}

int cmd_group_check(const std::string& file, const Out& out) {
  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "group check";
  rep["input"] = file;
  try {
    const FiniteGroup g = load_group(load_json_file(file));
    rep["valid"] = true;
    rep["order"] = g.order();
    rep["dimension"] = g.dimension;
    rep["norm"] = norm_name(g.norm_tag);
    rep["tolerances"] = {{"isometry", 1e-12}};
    out.write_report(rep);
    std::cout << "valid, order " << g.order() << "\n";
    return 0;
  } catch (const HypothesisError& e) {
    rep["valid"] = false;
    rep["error"] = e.what();
    out.write_report(rep);
    std::cout << "invalid: " << e.what() << "\n";
    return 2;
  }
}

int cmd_symmetrize(const std::string& file, const std::string& coords, const Out& out) {
  const FiniteGroup g = load_group(load_json_file(file));
  const Vector x(parse_coords(coords), g.norm_tag);
  const Vector xbar = symmetrize(x, g);
  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "symmetrize";
  rep["input"] = file;
  rep["x"] = vector_json(x);
  rep["symmetrization"] = vector_json(xbar);
  rep["invariant"] = is_invariant_point(xbar, g);
  const double s = separation(x, g);
  rep["separation"] = std::isinf(s) ? json("inf") : json(s);
  rep["norm_ratio"] = x.norm() == 0.0 ? 1.0 : xbar.norm() / x.norm();
  rep["tolerances"] = {{"invariance", 1e-12}};
  out.write_report(rep);
  return 0;
}

std::vector<Vector> scene_samples(const Scene& sc, std::size_t count, std::uint64_t seed) {
  if (sc.a.size() != 2) throw ConfigParse("scene: points must be 2-D");
  double lo0 = -1, lo1 = -1, hi0 = 1, hi1 = 1;
  if (sc.bbox) {
    lo0 = (*sc.bbox).first[0];
    lo1 = (*sc.bbox).first[1];
    hi0 = (*sc.bbox).second[0];
    hi1 = (*sc.bbox).second[1];
  } else {
    const double r = 2.0 * (distance(sc.a, sc.b) + 1.0);
    lo0 = std::min(sc.a[0], sc.b[0]) - r;
    lo1 = std::min(sc.a[1], sc.b[1]) - r;
    hi0 = std::max(sc.a[0], sc.b[0]) + r;
    hi1 = std::max(sc.a[1], sc.b[1]) + r;
  }
  Rng rng(seed);
  std::vector<Vector> samples{sc.a, sc.b};
  for (const auto& e : sc.group.elements) {
    samples.push_back(e.apply(sc.a));
    samples.push_back(e.apply(sc.b));
  }
  for (std::size_t i = 0; i < count; ++i)
    samples.push_back(Vector({rng.uniform(lo0, hi0), rng.uniform(lo1, hi1)}, sc.a.norm_tag()));
  return samples;
}

int cmd_petal_or_drop(const std::string& file, bool drop_mode, const std::string& svg,
                      std::uint64_t seed, const Out& out) {
  const Scene sc = load_scene(load_json_file(file));
  const auto samples = scene_samples(sc, sc.samples, seed);
  json rep;
  rep["schema"] = kSchema;
  rep["command"] = drop_mode ? "drop" : "petal";
  rep["input"] = file;
  rep["seed"] = seed;
  rep["samples"] = samples.size();
  rep["tolerances"] = {{"membership", drop_mode ? 1e-10 : 1e-12}};

  const double radius = sc.radius >= 0 ? sc.radius : 1.0;
  const auto member = [&](const Vector& x) {
    if (drop_mode) return drop_contains(Drop{sc.a, Ball(sc.b, radius)}, x);
    return petal_contains(Petal(sc.a, sc.b, sc.gamma), x);
  };
  rep["invariance"] = check_result_json(set_invariance_check(member, sc.group, samples));
  json equiv = json::array();
  for (std::size_t i = 0; i < sc.group.order(); ++i) {
    const auto& g = sc.group.elements[i];
    const CheckResult r =
        drop_mode ? drop_equivariance_check(Drop{sc.a, Ball(sc.b, radius)}, g, samples)
                  : petal_equivariance_check(Petal(sc.a, sc.b, sc.gamma), g, samples);
    json je = check_result_json(r);
    je["element"] = g.describe();
    equiv.push_back(je);
  }
  rep["equivariance"] = equiv;
  if (drop_mode) rep["radius"] = radius;

  if (!svg.empty())
    write_text_file(out.path(svg).string(),
                    flower_scene_svg(sc.a, sc.b, sc.cloud ? &*sc.cloud : nullptr, sc.gamma,
                                     sc.group, drop_mode, radius));
  out.write_report(rep);
  return 0;
}

json flower_pair_json(const FlowerPairReport& p) {
  json j;
  j["g"] = p.g;
  j["g_prime"] = p.g_prime;
  j["focus_distance"] = p.focus_distance;
  j["separation_threshold"] = p.separation_threshold;
  j["condition_met"] = p.condition_met;
  j["ball_bound"] = p.ball_bound;
  j["verdict"] = p.verdict == FlowerVerdict::DisjointCertified ? "disjoint-certified"
                 : p.verdict == FlowerVerdict::DisjointSampled ? "disjoint-sampled"
                                                               : "intersecting";
  if (p.intersection_witness) j["witness"] = vector_json(*p.intersection_witness);
  return j;
}

int cmd_flower(const std::string& file, bool drops, const std::string& svg, std::uint64_t seed,
               const Out& out) {
  const Scene sc = load_scene(load_json_file(file));
  if (!sc.cloud) throw ConfigParse("flower: scene needs a point set C (\"set\")");
  FlowerOptions opt;
  opt.sample_count = sc.samples;
  opt.seed = seed;
  opt.drops = drops;
  opt.drop_radius = sc.radius;
  const FlowerReport fr = flower_disjointness(sc.a, sc.b, *sc.cloud, sc.gamma, sc.group, opt);

  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "flower";
  rep["input"] = file;
  rep["seed"] = seed;
  rep["mode"] = drops ? "drops" : "petals";
  rep["focus_set_distance"] = fr.focus_set_distance;
  rep["apex_focus_distance"] = fr.apex_focus_distance;
  if (drops) rep["radius"] = fr.radius;
  rep["all_certified_disjoint"] = fr.all_certified_disjoint;
  rep["tolerances"] = {{"membership", 1e-12}, {"samples", opt.sample_count}};
  json pairs = json::array(), flagged = json::array(), members = json::array();
  for (const auto& p : fr.pairs) pairs.push_back(flower_pair_json(p));
  for (const auto& p : fr.flagged_pairs) flagged.push_back(flower_pair_json(p));
  for (const auto& m : fr.members)
    members.push_back({{"g", m.g},
                       {"cloud_members", m.cloud_members},
                       {"singleton_at_image", m.singleton_at_image}});
  rep["pairs"] = pairs;
  rep["pairs_outside_condition"] = flagged;  // distinct foci, 2 d(b,C) condition unmet
  rep["members"] = members;

  if (!svg.empty())
    write_text_file(out.path(svg).string(),
                    flower_scene_svg(sc.a, sc.b, &*sc.cloud, sc.gamma, sc.group, drops, fr.radius));
  out.write_report(rep);
  return 0;
}

int cmd_ekeland(const std::string& file, double gamma, int x0, const Out& out) {
  const EkelandInstance inst = load_ekeland_instance(load_json_file(file));
  if (!inst.objective) throw ConfigParse("ekeland run: instance needs \"f\"");
  const EkelandCertificate cert = ekeland_point(*inst.space, *inst.objective, gamma, x0);

  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "ekeland run";
  rep["input"] = file;
  rep["gamma"] = gamma;
  rep["x0"] = x0;
  rep["n"] = inst.space->size();
  rep["point"] = cert.a;
  rep["slack1"] = cert.slack1;
  rep["slack2"] = cert.slack2;
  rep["candidates_scanned"] = cert.candidates_scanned;
  rep["tolerances"] = {{"comparisons", "exact"}};
  out.write_report(rep);

  std::ostringstream csv;
  csv.precision(17);
  csv << "candidate,witness,violation\n";
  for (const auto& r : cert.trace) csv << r.candidate << "," << r.witness << "," << r.violation << "\n";
  write_text_file(out.path("trace.csv").string(), csv.str());
  return 0;
}

json iteration_json(const BifunctionIteration& it) {
  json j;
  j["sequence"] = it.sequence;
  j["limit"] = it.limit;
  j["s_diameters"] = it.s_diameters;
  json sets = json::array();
  for (const auto& s : it.s_sets) sets.push_back(s);
  j["s_sets"] = sets;
  return j;
}

int cmd_caristi(const std::string& file, int x0, const Out& out) {
  const EkelandInstance inst = load_ekeland_instance(load_json_file(file));
  if (!inst.bifunction) throw ConfigParse("caristi: instance needs \"bifunction\"");
  if (!inst.map) throw ConfigParse("caristi: instance needs \"map\"");
  if (const auto bad = validate_bifunction(*inst.space, *inst.bifunction))
    throw HypothesisViolated("caristi: bifunction axioms fail: " + bad->what);
  if (x0 < 0) x0 = inst.space->invariant_points().empty() ? 0 : inst.space->invariant_points().front();
  const CaristiResult res = caristi_fixed_point(*inst.space, *inst.bifunction, *inst.map, x0);
  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "caristi";
  rep["input"] = file;
  rep["x0"] = x0;
  rep["fixed_point"] = res.fixed_point;
  rep["iteration"] = iteration_json(res.iteration);
  rep["tolerances"] = {{"comparisons", "exact"}};
  out.write_report(rep);
  return 0;
}

int cmd_takahashi(const std::string& file, int x0, const Out& out) {
  const EkelandInstance inst = load_ekeland_instance(load_json_file(file));
  if (!inst.bifunction) throw ConfigParse("takahashi: instance needs \"bifunction\"");
  if (const auto bad = validate_bifunction(*inst.space, *inst.bifunction))
    throw HypothesisViolated("takahashi: bifunction axioms fail: " + bad->what);
  const TakahashiResult res = takahashi_minimizer(*inst.space, *inst.bifunction, x0);
  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "takahashi";
  rep["input"] = file;
  rep["minimizer"] = res.minimizer;
  rep["min_over_invariant"] = res.min_over_invariant;
  rep["iteration"] = iteration_json(res.iteration);
  rep["tolerances"] = {{"comparisons", "exact"}};
  out.write_report(rep);
  return 0;
}

struct PsGridContext {  // keeps grid-energy captures alive through the solve
  std::shared_ptr<SymmetricGrid> grid;
  std::shared_ptr<GridField> v0;
  std::shared_ptr<FiniteGroup> group;
};

int cmd_ps(const std::string& functional, const std::string& group_file, const std::string& x0s,
           std::string expr_src, const std::string& expr_file, int dim, int grid_m,
           const std::string& grid_group, const std::string& boundary, double p_exponent,
           double grad_tol, int k_max, bool sequence_mode, const Out& out) {
  FiniteGroup g = group_file.empty() ? trivial_group(dim) : load_group(load_json_file(group_file));
  PsGridContext ctx;
  SmoothFunctional phi;
  phi.group = &g;
  if (functional == "quadratic") {
    phi.dimension = g.dimension;
    phi.value = [](std::span<const double> x) {
      double s = 0;
      for (double v : x) s += v * v;
      return s;
    };
    phi.gradient = [](std::span<const double> x, std::span<double> o) {
      for (std::size_t i = 0; i < x.size(); ++i) o[i] = 2.0 * x[i];
    };
  } else if (functional == "expr") {
    if (!expr_file.empty()) {
      std::ifstream in(expr_file);
      if (!in) throw ConfigParse("ps: cannot open expression file " + expr_file);
      std::getline(in, expr_src);
    }
    if (expr_src.empty()) throw ConfigParse("ps: --expr or --expr-file required");
    phi.dimension = g.dimension;
    std::vector<std::string> names;
    for (int i = 1; i <= phi.dimension; ++i) names.push_back("x" + std::to_string(i));
    auto e = std::make_shared<Expr>(Expr::parse(expr_src, names));
    phi.value = [e](std::span<const double> x) {
      return e->eval(std::vector<double>(x.begin(), x.end()));
    };
  } else if (functional == "plateau-energy" || functional == "p-energy") {
    // Grid energies over the interior unknowns with fixed boundary data.
    ctx.grid = std::make_shared<SymmetricGrid>(grid_m, grid_group);
    const Expr bexpr = Expr::parse(boundary, {"x", "y"});
    ctx.v0 = std::make_shared<GridField>(GridField::from_function(
        *ctx.grid, [&](double x, double y) { return bexpr.eval(std::array{x, y}); }));
    ctx.group = std::make_shared<FiniteGroup>(ctx.grid->interior_group());
    phi.group = ctx.group.get();
    phi.dimension = static_cast<int>(ctx.grid->interior_nodes().size());
    const bool plateau = functional == "plateau-energy";
    const auto assemble = [ctx](std::span<const double> x) {
      GridField v(ctx.grid->m());
      const auto& nodes = ctx.grid->interior_nodes();
      for (std::size_t k = 0; k < nodes.size(); ++k) v.v[nodes[k]] = x[k];
      return v;
    };
    if (plateau) {
      phi.value = [ctx, assemble](std::span<const double> x) {
        return area_energy(*ctx.grid, assemble(x), *ctx.v0);
      };
      phi.gradient = [ctx, assemble](std::span<const double> x, std::span<double> o) {
        const GridField r = minimal_surface_residual(*ctx.grid, assemble(x), *ctx.v0);
        const auto& nodes = ctx.grid->interior_nodes();
        const double h2 = ctx.grid->h() * ctx.grid->h();
        for (std::size_t k = 0; k < nodes.size(); ++k) o[k] = h2 * r.v[nodes[k]];
      };
    } else {
      const double pe = p_exponent;
      phi.value = [ctx, assemble, pe](std::span<const double> x) {
        GridField u = assemble(x);
        for (int i = 0; i < ctx.grid->m(); ++i)
          for (int j = 0; j < ctx.grid->m(); ++j)
            if (!ctx.grid->interior(i, j)) u.at(i, j) = (*ctx.v0)(i, j);
        return p_energy(*ctx.grid, u, pe) / pe;
      };
    }
  } else {
    throw ConfigParse("ps: unknown functional '" + functional +
                      "' (quadratic|plateau-energy|p-energy|expr)");
  }

  const Vector x0(x0s.empty() ? std::vector<double>(phi.dimension, functional == "quadratic" ||
                                                                           functional == "expr"
                                                                       ? 1.0
                                                                       : 0.0)
                              : parse_coords(x0s),
                  phi.group->norm_tag);
  PSOptions opt;
  opt.grad_tol = grad_tol;
  opt.k_max = k_max;
  opt.sequence_mode = sequence_mode;
  const PSSequence seq = palais_smale(phi, x0, opt);

  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "ps";
  rep["functional"] = functional;
  rep["iterations"] = seq.iterations;
  rep["converged"] = seq.converged;
  rep["final_value"] = seq.final_value;
  rep["final_projected_gradient"] = seq.final_proj_grad;
  rep["final_full_gradient"] = seq.final_full_grad;
  rep["x"] = vector_json(seq.final_x);
  rep["x0_symmetrized"] = seq.x0_symmetrized;
  rep["tolerances"] = {{"grad_tol", grad_tol}, {"k_max", k_max}};
  if (sequence_mode) {
    json ms = json::array();
    for (const auto& m : seq.milestones)
      ms.push_back({{"n", m.n}, {"iteration", m.iteration}, {"value", m.value},
                    {"grad_norm", m.grad_norm}});
    rep["milestones"] = ms;
  }
  out.write_report(rep);

  std::ostringstream csv;
  csv.precision(17);
  csv << "k,value,projected_gradient,full_gradient,invariance_residual\n";
  for (std::size_t k = 0; k < seq.values.size(); ++k)
    csv << k << "," << seq.values[k] << "," << seq.proj_grad_norms[k] << ","
        << seq.full_grad_norms[k] << "," << seq.invariance_residuals[k] << "\n";
  write_text_file(out.path("iterates.csv").string(), csv.str());
  return 0;
}

int cmd_plateau(const std::string& file, const std::string& svg, const Out& out) {
  const GridProblem gp = load_grid_problem(load_json_file(file));
  SymmetricGrid grid(gp.m, gp.group);
  PlateauOptions opt;
  opt.tol = gp.tol;
  opt.max_iters = gp.max_iters;
  opt.outer_root = gp.outer_root;
  const auto [u, prep] = solve_plateau(grid, gp.boundary_field, gp.load_field, opt);

  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "plateau";
  rep["input"] = file;
  rep["m"] = gp.m;
  rep["group"] = gp.group;
  rep["outer_root"] = gp.outer_root;
  rep["iterations"] = prep.iterations;
  rep["energy"] = prep.energy;
  rep["residual_sup"] = prep.residual_sup;
  rep["residual_projected_sup"] = prep.residual_projected_sup;
  rep["residual_l2"] = prep.residual_l2;
  rep["symmetry_residual"] = prep.symmetry_residual;
  rep["scheme_equivariance_drift"] = prep.scheme_equivariance;
  rep["uniqueness_probe_distances"] = prep.uniqueness_distances;
  rep["tolerances"] = {{"residual_sup", gp.tol}, {"symmetry", 1e-10}};
  out.write_report(rep);
  write_text_file(out.path("field.csv").string(), csv_of_field(u));
  if (!svg.empty()) write_text_file(out.path(svg).string(), field_contours_svg(grid, u));
  return 0;
}

int cmd_plap(const std::string& file, const std::string& svg, const std::string& growth,
             double growth_a, double growth_b, const Out& out) {
  const GridProblem gp = load_grid_problem(load_json_file(file));
  SymmetricGrid grid(gp.m, gp.group);
  PLapOptions opt;
  opt.tol = gp.tol;
  opt.max_iters = gp.max_iters;
  const auto [u, prep] = p_energy_descent(grid, gp.p, gp.alpha, gp.boundary_field, opt);

  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "plap";
  rep["input"] = file;
  rep["m"] = gp.m;
  rep["group"] = gp.group;
  rep["p"] = gp.p;
  rep["alpha"] = gp.alpha;
  rep["iterations"] = prep.iterations;
  rep["converged"] = prep.converged;
  rep["dual_norm_surrogate"] = prep.dual_norm;
  rep["dual_norm_surrogate_full"] = prep.dual_norm_full;
  rep["residual_sup"] = prep.residual_sup;
  rep["p_energy"] = prep.p_energy;
  rep["alpha_deviation"] = prep.alpha_deviation;
  rep["symmetry_residual"] = prep.symmetry_residual;
  rep["tolerances"] = {{"dual_norm", gp.tol}, {"symmetry", 1e-10}};
  if (!growth.empty()) {
    // growth = "<df/dxi1 expr>;<df/dxi2 expr>" in variables x, y, xi1, xi2.
    const auto semi = growth.find(';');
    if (semi == std::string::npos) throw ConfigParse("--check-growth needs 'expr1;expr2'");
    const std::vector<std::string> names{"x", "y", "xi1", "xi2"};
    const Expr e0 = Expr::parse(growth.substr(0, semi), names);
    const Expr e1 = Expr::parse(growth.substr(semi + 1), names);
    const auto wrap = [](const Expr& e) {
      return [&e](double x, double y, double a, double b) {
        return e.eval(std::array{x, y, a, b});
      };
    };
    const GrowthCheckReport gr =
        growth_condition_check(wrap(e0), wrap(e1), growth_a, growth_b, gp.p);
    rep["growth_condition"] = {{"holds", gr.holds},
                               {"worst_excess", gr.worst_excess},
                               {"worst_xi_norm", gr.worst_xi_norm},
                               {"a", growth_a},
                               {"b", growth_b}};
  }
  out.write_report(rep);
  write_text_file(out.path("field.csv").string(), csv_of_field(u));
  if (!svg.empty()) write_text_file(out.path(svg).string(), field_contours_svg(grid, u));
  return 0;
}

int cmd_control(const std::string& file, const Out& out) {
  const ControlConfig cfg = load_control_problem(load_json_file(file));
  const EpsilonOptimalResult res = epsilon_optimal(*cfg.problem, cfg.epsilon, cfg.n_cells);

  json rep;
  rep["schema"] = kSchema;
  rep["command"] = "control";
  rep["input"] = file;
  rep["epsilon"] = cfg.epsilon;
  rep["N"] = cfg.n_cells;
  rep["terminal_cost"] = res.terminal_cost;
  rep["needle_steps"] = res.needle_steps;
  rep["sweeps"] = res.sweeps;
  rep["cost_trace"] = res.cost_trace;
  rep["max_needle_slack"] = res.max_slack;
  rep["verified"] = res.verified;
  json cells = json::array();
  for (const auto& c : res.verification)
    cells.push_back({{"cell", c.cell},
                     {"t", c.time},
                     {"hamiltonian", c.hamiltonian},
                     {"invariant_min", c.invariant_min},
                     {"slack", c.slack},
                     {"ok", c.ok}});
  rep["needle_condition"] = cells;
  rep["tolerances"] = {{"epsilon", cfg.epsilon},
                       {"check_points", "cell midpoints (nearest substep node)"}};
  out.write_report(rep);
  write_text_file(out.path("signal.csv").string(), csv_of_signal(res.signal));
  write_text_file(out.path("trajectory.csv").string(), csv_of_trajectory(res.trajectory));
  write_text_file(out.path("verification.json").string(),
                  report_to_string(json{{"needle_condition", cells},
                                        {"verified", res.verified},
                                        {"max_slack", res.max_slack}}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symvar — group-invariant variational principles toolkit"};
  app.require_subcommand(1);

  Out out;
  std::uint64_t seed = 1;
  app.add_option("-o,--out", out.dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed for sampling sweeps")->capture_default_str();

  std::string file, coords, svg;
  double gamma = 1.0;
  int x0 = 0;

  auto* grp = app.add_subcommand("group", "group utilities");
  auto* grp_check = grp->add_subcommand("check", "validate a group description file");
  grp_check->add_option("file", file)->required();

  auto* sym = app.add_subcommand("symmetrize", "orbit-average a point");
  sym->add_option("file", file, "group description file")->required();
  sym->add_option("-x", coords, "comma-separated coordinates")->required();

  auto* petal = app.add_subcommand("petal", "petal membership / invariance report");
  petal->add_option("file", file)->required();
  petal->add_option("--svg", svg, "write an orbit scene SVG");

  auto* drop = app.add_subcommand("drop", "drop membership / invariance report");
  drop->add_option("file", file)->required();
  drop->add_option("--svg", svg);

  bool flower_drops = false;
  auto* flower = app.add_subcommand("flower", "orbit disjointness certificates");
  flower->add_option("file", file)->required();
  flower->add_option("--svg", svg);
  flower->add_flag("--drops", flower_drops, "drop flower instead of petal flower");

  auto* eke = app.add_subcommand("ekeland", "finite-space variational certificates");
  auto* eke_run = eke->add_subcommand("run", "compute a certified point");
  eke_run->add_option("file", file)->required();
  eke_run->add_option("--gamma", gamma)->required();
  eke_run->add_option("--x0", x0)->capture_default_str();

  int x0_opt = -1;
  auto* car = app.add_subcommand("caristi", "invariant fixed point of a multivalued map");
  car->add_option("file", file)->required();
  car->add_option("--x0", x0_opt);

  auto* tak = app.add_subcommand("takahashi", "invariant minimizer of a bifunction");
  tak->add_option("file", file)->required();
  tak->add_option("--x0", x0_opt);

  std::string functional = "quadratic", group_file, expr_src, expr_file, x0s;
  std::string ps_grid_group = "transpose", ps_boundary = "0";
  int dim = 2, k_max = 100000, ps_m = 9;
  double grad_tol = 1e-8, ps_p = 2.0;
  bool sequence_mode = false;
  auto* ps = app.add_subcommand("ps", "minimizing-sequence descent on Fix(G)");
  ps->add_option("--functional", functional, "quadratic|plateau-energy|p-energy|expr")
      ->capture_default_str();
  ps->add_option("--group", group_file, "group description file");
  ps->add_option("--x0", x0s, "comma-separated start");
  ps->add_option("--expr", expr_src, "expression in x1..xn for --functional expr");
  ps->add_option("--expr-file", expr_file, "file whose first line is the expression");
  ps->add_option("--dim", dim)->capture_default_str();
  ps->add_option("--m", ps_m, "grid size for the grid energies")->capture_default_str();
  ps->add_option("--pde-group", ps_grid_group, "grid group for the grid energies")
      ->capture_default_str();
  ps->add_option("--boundary", ps_boundary, "boundary expression for the grid energies")
      ->capture_default_str();
  ps->add_option("--p", ps_p, "exponent for p-energy")->capture_default_str();
  ps->add_option("--grad-tol", grad_tol)->capture_default_str();
  ps->add_option("--kmax", k_max)->capture_default_str();
  ps->add_flag("--sequence-mode", sequence_mode, "record 1/n gradient milestones");

  auto* plateau = app.add_subcommand("plateau", "symmetric perturbed minimal surface solve");
  plateau->add_option("file", file)->required();
  plateau->add_option("--svg", svg, "write a contour SVG");

  std::string growth;
  double growth_a = 1.0, growth_b = 1.0;
  auto* plap = app.add_subcommand("plap", "p-Laplacian energy descent");
  plap->add_option("file", file)->required();
  plap->add_option("--svg", svg);
  plap->add_option("--check-growth", growth, "'df/dxi1;df/dxi2' expressions in x,y,xi1,xi2");
  plap->add_option("--growth-a", growth_a)->capture_default_str();
  plap->add_option("--growth-b", growth_b)->capture_default_str();

  auto* control = app.add_subcommand("control", "epsilon-optimal symmetric control");
  control->add_option("file", file)->required();

  // Global options (-o, --seed) may appear after the subcommand name.
  for (auto* sc : app.get_subcommands({})) {
    sc->fallthrough();
    for (auto* nested : sc->get_subcommands({})) nested->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (grp_check->parsed()) rc = cmd_group_check(file, out);
    else if (sym->parsed()) rc = cmd_symmetrize(file, coords, out);
    else if (petal->parsed()) rc = cmd_petal_or_drop(file, false, svg, seed, out);
    else if (drop->parsed()) rc = cmd_petal_or_drop(file, true, svg, seed, out);
    else if (flower->parsed()) rc = cmd_flower(file, flower_drops, svg, seed, out);
    else if (eke_run->parsed()) rc = cmd_ekeland(file, gamma, x0, out);
    else if (car->parsed()) rc = cmd_caristi(file, x0_opt, out);
    else if (tak->parsed()) rc = cmd_takahashi(file, x0_opt, out);
    else if (ps->parsed()) rc = cmd_ps(functional, group_file, x0s, expr_src, expr_file, dim,
                                       ps_m, ps_grid_group, ps_boundary, ps_p, grad_tol, k_max,
                                       sequence_mode, out);
    else if (plateau->parsed()) rc = cmd_plateau(file, svg, out);
    else if (plap->parsed()) rc = cmd_plap(file, svg, growth, growth_a, growth_b, out);
    else if (control->parsed()) rc = cmd_control(file, out);
    else {
      std::cerr << "unknown subcommand\n";
      return 1;
    }
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.write_timings(std::chrono::duration<double>(t1 - t0).count());
  return rc;
}
