#include <catch_amalgamated.hpp>

#include <string>

#include "obslab/config.hpp"

using namespace obslab;

TEST_CASE("defaults survive an empty config") {
  const ExperimentConfig c = parse_config("");
  CHECK(c.n == 2);
  CHECK(c.h == 1.0 / 32.0);
  CHECK(c.p == 2.0);
  CHECK(c.family == "p_energy");
  CHECK(c.a_expr == "1");
  CHECK(c.tol == 1e-7);
  CHECK(c.k_list == std::vector<long>{1, 4, 16, 64});
  CHECK(c.out_dir == "out");
}

TEST_CASE("sections, comments and whitespace") {
  const std::string text =
      "# experiment\n"
      "[domain]\n"
      "n = 1\n"
      "bounds = -1 1\n"
      "\n"
      "[grid]\n"
      "  h =   0.125   \n"
      "[solver]\n"
      "tol = 1e-9\n";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.n == 1);
  CHECK(c.lo[0] == -1.0);
  CHECK(c.hi[0] == 1.0);
  CHECK(c.h == 0.125);
  CHECK(c.tol == 1e-9);
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const std::string& text) -> std::string {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(line_of("[domain]\nn = 5\n").find("(line 2)") != std::string::npos);
  CHECK(line_of("\n\n[grid]\nh = zero\n").find("(line 4)") != std::string::npos);
  CHECK(line_of("[grid\n").find("(line 1)") != std::string::npos);
  CHECK(line_of("[domain]\nnonsense\n").find("(line 2)") != std::string::npos);
  CHECK(line_of("[nowhere]\nkey = 1\n").find("unknown key") != std::string::npos);
  CHECK(line_of("[solver]\ntol = -1\n").find("(line 2)") != std::string::npos);
  CHECK(line_of("[moser]\ntwo_star = 2\n").find("(line 2)") != std::string::npos);
}

TEST_CASE("serialization round trip is exact") {
  const std::string text =
      "[domain]\nn = 2\nbounds = -1 1 -1 1\n"
      "[grid]\nh = 0.03125\n"
      "[integrand]\nfamily = weighted_p_energy\np = 3\n"
      "a_expr = 1 + 0.5*sin(2*pi*x1)*sin(2*pi*x2)\nlambda = 1.5\nLambda = 10\n"
      "[obstacle]\npsi_expr = 0.25 - (x1*x1 + x2*x2)\n"
      "[boundary]\nPsi_expr = 0\nseed_interior = true\n"
      "[solver]\ntol = 1e-8\nmax_iter = 12345\nstep0 = 0.5\nspectral_step = false\n"
      "[moser]\nrho0 = 0.15\nR0 = 0.3\nK = 7\ntwo_star = 3.5\n"
      "[approx]\neps0 = 0.2\nL = 3\nk_list = 1 8 64\nQ = 8\n"
      "[structure]\nsample_count = 5000\nxi_r_max = 50\n"
      "[output]\ndir = out/test\n";
  const ExperimentConfig a = parse_config(text);
  const ExperimentConfig b = parse_config(serialize_config(a));
  CHECK(serialize_config(a) == serialize_config(b));
  CHECK(b.n == 2);
  CHECK(b.family == "weighted_p_energy");
  CHECK(b.p == 3.0);
  CHECK(b.lambda == 1.5);
  CHECK(b.Psi_seed_interior);
  CHECK_FALSE(b.spectral_step);
  CHECK(b.max_iter == 12345);
  CHECK(b.K == 7);
  CHECK(b.two_star == 3.5);
  CHECK(b.k_list == std::vector<long>{1, 8, 64});
  CHECK(b.Q == 8);
  CHECK(b.sample_count == 5000);
  CHECK(b.out_dir == "out/test");
}

TEST_CASE("comma-separated k_list is tolerated") {
  const ExperimentConfig c = parse_config("[approx]\nk_list = 1, 4, 16\n");
  CHECK(c.k_list == std::vector<long>{1, 4, 16});
}

TEST_CASE("factory helpers build consistent objects") {
  ExperimentConfig c;
  c.n = 2;
  c.lo = {-1.0, -1.0};
  c.hi = {1.0, 1.0};
  c.h = 0.25;
  c.psi_expr = "0.5 - (x1*x1 + x2*x2)";
  c.Psi_expr = "0";
  c.lambda = 2.0;
  c.Lambda = 2.0;
  const Grid g = make_grid(c);
  CHECK(g.num_nodes() == 81);
  const IntegrandSpec s = make_spec(c);
  CHECK(s.p == 2.0);
  CHECK(s.declared_lambda == 2.0);
  ObstacleProblem prob = make_problem(c);
  CHECK(prob.feasibility_checked);
  CHECK(prob.psi.at(4, 4) == 0.5);
  const Vec ctr = domain_center(c);
  CHECK(ctr[0] == 0.0);
  CHECK(ctr[1] == 0.0);
  const SolveOptions o = make_solver_options(c);
  CHECK(o.tol == c.tol);
  CHECK(o.init == InitMode::kBoundaryInterp);
  c.Psi_seed_interior = true;
  CHECK(make_solver_options(c).init == InitMode::kPsiInterior);
}

TEST_CASE("malformed expressions surface when the problem is built") {
  ExperimentConfig c;
  c.n = 1;
  c.lo = {-1.0, 0.0};
  c.hi = {1.0, 0.0};
  c.h = 0.25;
  c.psi_expr = "0.5 - x1*";
  CHECK_THROWS_AS(make_problem(c), ExprParseError);
}
