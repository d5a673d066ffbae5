// Configuration-driven experiment runner: solve, verify-linearization,
// moser-report, approx-study, structure-check.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "obslab/config.hpp"
#include "obslab/linearize.hpp"
#include "obslab/moser.hpp"
#include "obslab/reports.hpp"

namespace fs = std::filesystem;
using namespace obslab;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 1;  // accepted cap; the sweeps here run sequentially for determinism
  long seed = 0;
};

ExperimentConfig load_config(const CommonArgs& args) {
  std::ifstream is(args.config_path);
  if (!is) throw std::runtime_error("cannot open config file " + args.config_path);
  std::stringstream buf;
  buf << is.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str());
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

/// Every command echoes the fully resolved config next to its outputs.
void echo_config(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::ofstream os(fs::path(cfg.out_dir) / "resolved_config.cfg");
  os << serialize_config(cfg);
}

std::vector<ScalarField> default_etas(const ExperimentConfig& cfg, const Grid& g,
                                      std::vector<std::string>& names) {
  const Vec c = domain_center(cfg);
  double halfwidth = g.hi[0] - c[0];
  for (int a = 1; a < g.n; ++a) halfwidth = std::min(halfwidth, g.hi[a] - c[a]);
  std::vector<ScalarField> etas;
  etas.push_back(radial_bump(g, c, 0.3 * halfwidth, 0.6 * halfwidth));
  names.push_back("radial_0.3_0.6");
  etas.push_back(radial_bump(g, c, 0.5 * halfwidth, 0.9 * halfwidth));
  names.push_back("radial_0.5_0.9");
  etas.push_back(sine_bump(g, 1, 1));
  names.push_back("sine_1_1");
  etas.push_back(sine_bump(g, 2, 1));
  names.push_back("sine_2_1");
  return etas;
}

int cmd_solve(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  echo_config(cfg);
  ObstacleProblem prob = make_problem(cfg);
  const SolveResult res = solve(prob, make_solver_options(cfg));
  const fs::path out(cfg.out_dir);
  save_field(res.u, (out / "solution.field").string());
  save_field(res.multiplier, (out / "multiplier.field").string());
  write_json(convergence_log_json(res), (out / "convergence.json").string());
  std::cout << (res.converged ? "converged" : "NOT converged") << " after " << res.iterations
            << " iterations, final residual "
            << (res.residual_history.empty() ? 0.0 : res.residual_history.back()) << "\n";
  return res.converged ? 0 : 2;
}

int cmd_verify_linearization(const CommonArgs& args, const std::string& solution_path) {
  const ExperimentConfig cfg = load_config(args);
  echo_config(cfg);
  ObstacleProblem prob = make_problem(cfg);
  ScalarField u = load_field(solution_path);
  if (!(u.grid == prob.grid)) throw std::runtime_error("solution grid does not match the config");

  // rebuild multiplier/active set around the stored solution
  SolveResult res;
  res.u = u;
  res.converged = true;
  res.multiplier = solver_detail::gradient_density(prob, u);
  res.active_threshold = std::max(10.0 * cfg.tol, prob.grid.h * prob.grid.h);
  res.active_mask.assign(u.v.size(), false);
  for (int j = 0; j < prob.grid.nodes_y(); ++j)
    for (int i = 0; i < prob.grid.nodes_x(); ++i)
      res.active_mask[static_cast<std::size_t>(prob.grid.node_index(i, j))] =
          u.at(i, j) - prob.psi.at(i, j) <= res.active_threshold;

  std::vector<std::string> names;
  const std::vector<ScalarField> etas = default_etas(cfg, prob.grid, names);
  const Ball region{domain_center(cfg), cfg.R0};
  const LinearizationReport rep =
      make_linearization_report(prob.spec, res, prob.psi, region, etas, names);
  write_json(linearization_report_json(rep), (fs::path(cfg.out_dir) / "linearization.json").string());

  // support invariant: g vanishes off the active set by construction; check bound
  const double slack = 10.0 * prob.grid.h;  // discrete-divergence O(h) allowance
  const bool ok = rep.g_inf_measured <= rep.g_inf_bound + slack;
  std::cout << "max|g| = " << rep.g_inf_measured << ", bound = " << rep.g_inf_bound
            << (ok ? " (ok)" : " (VIOLATED)") << "\n";
  return ok ? 0 : 2;
}

int cmd_moser_report(const CommonArgs& args, const std::string& solution_path) {
  const ExperimentConfig cfg = load_config(args);
  echo_config(cfg);
  const Grid grid = make_grid(cfg);
  ScalarField u = load_field(solution_path);
  if (!(u.grid == grid)) throw std::runtime_error("solution grid does not match the config");
  LipschitzCheckOptions opts;
  opts.two_star_override = cfg.two_star;
  opts.K = cfg.K;
  const MoserReport rep = lipschitz_estimate_check(u, domain_center(cfg), cfg.rho0, cfg.R0,
                                                   cfg.p, cfg.n, opts);
  write_json(moser_report_json(rep), (fs::path(cfg.out_dir) / "moser.json").string());
  write_moser_csv(rep, (fs::path(cfg.out_dir) / "moser.csv").string());
  bool ok = std::isfinite(rep.fitted_C);
  for (double a : rep.a_values) ok = ok && std::isfinite(a);
  std::cout << "lhs_final = " << rep.lhs_final << ", fitted_C = " << rep.fitted_C
            << ", beta = " << rep.beta << ", slope = " << rep.beta_scaling_exponent << "\n";
  return ok ? 0 : 2;
}

int cmd_approx_study(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  echo_config(cfg);
  ObstacleProblem prob = make_problem(cfg);
  const MollifierKernel kernel = make_mollifier(cfg.n, cfg.Q);
  const Vec c = domain_center(cfg);
  ApproximationSchedule sched = make_schedule(cfg.eps0, cfg.L, cfg.k_list, Ball{c, cfg.rho0});
  sched = run_schedule(prob, kernel, std::move(sched), make_solver_options(cfg));
  const fs::path out(cfg.out_dir);
  write_schedule_csv(sched, (out / "schedule.csv").string());

  SampleBox box;
  box.x_lo = prob.grid.lo;
  box.x_hi = prob.grid.hi;
  box.xi_r_max = cfg.xi_r_max;
  const FamilyReport fam = verify_theorem_app(prob.spec, kernel, sched.eps_list, sched.k_list, box);
  write_json(family_report_json(fam), (out / "uniformity.json").string());

  long failed = 0;
  for (const ScheduleRecord& r : sched.records) failed += r.converged ? 0 : 1;
  std::cout << sched.records.size() << " runs, " << failed << " failed\n";
  return 4 * failed > static_cast<long>(sched.records.size()) ? 2 : 0;
}

int cmd_structure_check(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  echo_config(cfg);
  const IntegrandSpec spec = make_spec(cfg);
  SampleBox box;
  box.x_lo = cfg.lo;
  box.x_hi = cfg.hi;
  box.xi_r_max = cfg.xi_r_max;
  const StructureReport rep =
      check_structure(spec, box, cfg.sample_count, static_cast<std::uint64_t>(args.seed));
  write_json(structure_report_json(rep), (fs::path(cfg.out_dir) / "structure.json").string());
  std::cout << "lambda_hat = " << rep.lambda_hat << ", Lambda_hat_hess = " << rep.Lambda_hat_hess
            << ", Lambda_hat_mixed = " << rep.Lambda_hat_mixed
            << (rep.violation ? " (VIOLATION)" : "") << "\n";
  return rep.violation ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obslab: numerical laboratory for p-growth obstacle problems"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string solution_path;
  auto add_common = [&](CLI::App* sub, bool needs_solution = false) {
    sub->add_option("--config", args.config_path, "experiment config file")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config)");
    sub->add_option("--threads", args.threads, "worker cap for sweeps");
    sub->add_option("--seed", args.seed, "sampling seed (structure checks only)");
    if (needs_solution)
      sub->add_option("--solution", solution_path, "stored solution field")->required();
  };

  CLI::App* c_solve = app.add_subcommand("solve", "solve the obstacle problem");
  CLI::App* c_lin =
      app.add_subcommand("verify-linearization", "contact-set field g, bound and residuals");
  CLI::App* c_moser = app.add_subcommand("moser-report", "iteration-scheme diagnostics");
  CLI::App* c_approx = app.add_subcommand("approx-study", "regularized-family sweep");
  CLI::App* c_struct = app.add_subcommand("structure-check", "sampled ellipticity constants");
  add_common(c_solve);
  add_common(c_lin, true);
  add_common(c_moser, true);
  add_common(c_approx);
  add_common(c_struct);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_solve->parsed()) return cmd_solve(args);
    if (c_lin->parsed()) return cmd_verify_linearization(args, solution_path);
    if (c_moser->parsed()) return cmd_moser_report(args, solution_path);
    if (c_approx->parsed()) return cmd_approx_study(args);
    if (c_struct->parsed()) return cmd_structure_check(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
