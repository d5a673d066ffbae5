#pragma once

// Flat-key experiment configuration with [section] headers. Every field has
// a documented default; parse errors carry the offending line number; a
// parsed config serializes back to a canonical text that reparses to the
// identical structure.

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "obslab/approx.hpp"
#include "obslab/grid.hpp"
#include "obslab/integrand.hpp"
#include "obslab/solver.hpp"

namespace obslab {

struct ExperimentConfig {
  // [domain]
  int n = 2;
  std::array<double, kMaxDim> lo{-1.0, -1.0};
  std::array<double, kMaxDim> hi{1.0, 1.0};
  // [grid]
  double h = 1.0 / 32.0;
  // [integrand]
  std::string family = "p_energy";
  double p = 2.0;
  std::string a_expr = "1";
  std::string da_expr;  // empty: derive symbolically
  double lambda = 0.0;
  double Lambda = 0.0;
  // [obstacle]
  std::string psi_expr = "-10";
  // [boundary]
  std::string Psi_expr = "0";
  bool Psi_seed_interior = false;  // seed the initial iterate from interior Psi values
  // [solver]
  double tol = 1e-7;
  long max_iter = 200000;
  double step0 = 1.0;
  bool spectral_step = true;
  // [moser]
  double rho0 = 0.25;
  double R0 = 0.5;
  int K = 0;  // 0: auto, smallest K with p + 2 gamma_K >= 200
  double two_star = 4.0;  // used when n = 2
  // [approx]
  double eps0 = 0.1;
  int L = 4;
  std::vector<long> k_list{1, 4, 16, 64};
  int Q = 6;
  // [structure]
  long sample_count = 100000;
  double xi_r_max = 100.0;
  // [output]
  std::string out_dir = "out";
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line)
      : std::runtime_error("config error (line " + std::to_string(line) + "): " + msg) {}
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("expected a number, got '" + s + "'", line);
  }
}

inline long to_long(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("expected an integer, got '" + s + "'", line);
  }
}

inline bool to_bool(const std::string& s, int line) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("expected true/false, got '" + s + "'", line);
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const std::string& text) {
  using namespace config_detail;
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw, section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "domain.n") {
      cfg.n = static_cast<int>(to_long(val, line_no));
      if (cfg.n < 1 || cfg.n > kMaxDim) throw ConfigError("n must be 1 or 2", line_no);
    } else if (qual == "domain.bounds") {
      std::istringstream vs(val);
      std::vector<double> nums;
      double x;
      while (vs >> x) nums.push_back(x);
      if (nums.size() != 2 && nums.size() != 4)
        throw ConfigError("bounds needs 2 (1-D) or 4 (2-D) numbers", line_no);
      cfg.lo[0] = nums[0];
      cfg.hi[0] = nums[1];
      if (nums.size() == 4) {
        cfg.lo[1] = nums[2];
        cfg.hi[1] = nums[3];
      }
    } else if (qual == "grid.h") {
      cfg.h = to_double(val, line_no);
      if (cfg.h <= 0) throw ConfigError("h must be positive", line_no);
    } else if (qual == "integrand.family") {
      if (val != "p_energy" && val != "weighted_p_energy")
        throw ConfigError("unknown family '" + val + "'", line_no);
      cfg.family = val;
    } else if (qual == "integrand.p") {
      cfg.p = to_double(val, line_no);
      if (cfg.p < 2.0) throw ConfigError("p must be >= 2", line_no);
    } else if (qual == "integrand.a_expr") {
      cfg.a_expr = val;
    } else if (qual == "integrand.da_expr") {
      cfg.da_expr = val;
    } else if (qual == "integrand.lambda") {
      cfg.lambda = to_double(val, line_no);
    } else if (qual == "integrand.Lambda") {
      cfg.Lambda = to_double(val, line_no);
    } else if (qual == "obstacle.psi_expr") {
      cfg.psi_expr = val;
    } else if (qual == "boundary.Psi_expr") {
      cfg.Psi_expr = val;
    } else if (qual == "boundary.seed_interior") {
      cfg.Psi_seed_interior = to_bool(val, line_no);
    } else if (qual == "solver.tol") {
      cfg.tol = to_double(val, line_no);
      if (cfg.tol <= 0) throw ConfigError("tol must be positive", line_no);
    } else if (qual == "solver.max_iter") {
      cfg.max_iter = to_long(val, line_no);
      if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1", line_no);
    } else if (qual == "solver.step0") {
      cfg.step0 = to_double(val, line_no);
    } else if (qual == "solver.spectral_step") {
      cfg.spectral_step = to_bool(val, line_no);
    } else if (qual == "moser.rho0") {
      cfg.rho0 = to_double(val, line_no);
    } else if (qual == "moser.R0") {
      cfg.R0 = to_double(val, line_no);
    } else if (qual == "moser.K") {
      cfg.K = static_cast<int>(to_long(val, line_no));
      if (cfg.K < 0) throw ConfigError("K must be >= 0 (0 = auto)", line_no);
    } else if (qual == "moser.two_star") {
      cfg.two_star = to_double(val, line_no);
      if (cfg.two_star <= 2.0) throw ConfigError("two_star must be > 2", line_no);
    } else if (qual == "approx.eps0") {
      cfg.eps0 = to_double(val, line_no);
    } else if (qual == "approx.L") {
      cfg.L = static_cast<int>(to_long(val, line_no));
      if (cfg.L < 1) throw ConfigError("L must be >= 1", line_no);
    } else if (qual == "approx.k_list") {
      std::istringstream vs(val);
      cfg.k_list.clear();
      std::string tok;
      while (vs >> tok) {
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (!tok.empty()) cfg.k_list.push_back(to_long(tok, line_no));
      }
      if (cfg.k_list.empty()) throw ConfigError("k_list must be nonempty", line_no);
    } else if (qual == "approx.Q") {
      cfg.Q = static_cast<int>(to_long(val, line_no));
      if (cfg.Q < 3) throw ConfigError("quadrature order must be >= 3", line_no);
    } else if (qual == "structure.sample_count") {
      cfg.sample_count = to_long(val, line_no);
      if (cfg.sample_count < 1) throw ConfigError("sample_count must be >= 1", line_no);
    } else if (qual == "structure.xi_r_max") {
      cfg.xi_r_max = to_double(val, line_no);
    } else if (qual == "output.dir") {
      cfg.out_dir = val;
    } else {
      throw ConfigError("unknown key '" + qual + "'", line_no);
    }
  }
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[domain]\nn = " << c.n << "\nbounds = " << c.lo[0] << " " << c.hi[0];
  if (c.n == 2) os << " " << c.lo[1] << " " << c.hi[1];
  os << "\n\n[grid]\nh = " << c.h << "\n\n[integrand]\nfamily = " << c.family
     << "\np = " << c.p << "\na_expr = " << c.a_expr << "\n";
  if (!c.da_expr.empty()) os << "da_expr = " << c.da_expr << "\n";
  os << "lambda = " << c.lambda << "\nLambda = " << c.Lambda
     << "\n\n[obstacle]\npsi_expr = " << c.psi_expr
     << "\n\n[boundary]\nPsi_expr = " << c.Psi_expr
     << "\nseed_interior = " << (c.Psi_seed_interior ? "true" : "false")
     << "\n\n[solver]\ntol = " << c.tol << "\nmax_iter = " << c.max_iter
     << "\nstep0 = " << c.step0
     << "\nspectral_step = " << (c.spectral_step ? "true" : "false")
     << "\n\n[moser]\nrho0 = " << c.rho0 << "\nR0 = " << c.R0 << "\nK = " << c.K
     << "\ntwo_star = " << c.two_star << "\n\n[approx]\neps0 = " << c.eps0
     << "\nL = " << c.L << "\nk_list =";
  for (long k : c.k_list) os << " " << k;
  os << "\nQ = " << c.Q << "\n\n[structure]\nsample_count = " << c.sample_count
     << "\nxi_r_max = " << c.xi_r_max << "\n\n[output]\ndir = " << c.out_dir << "\n";
  return os.str();
}

inline Grid make_grid(const ExperimentConfig& c) { return Grid::make(c.n, c.lo, c.hi, c.h); }

inline IntegrandSpec make_spec(const ExperimentConfig& c) {
  return make_p_energy(c.p, c.n, c.a_expr, c.da_expr, c.lambda, c.Lambda);
}

inline ObstacleProblem make_problem(const ExperimentConfig& c) {
  ObstacleProblem prob;
  prob.grid = make_grid(c);
  prob.spec = make_spec(c);
  prob.psi = sample_nodes(prob.grid, parse_expr(c.psi_expr));
  prob.Psi = sample_nodes(prob.grid, parse_expr(c.Psi_expr));
  prob.check_feasible();
  return prob;
}

inline SolveOptions make_solver_options(const ExperimentConfig& c) {
  SolveOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.step0 = c.step0;
  o.spectral_step = c.spectral_step;
  o.init = c.Psi_seed_interior ? InitMode::kPsiInterior : InitMode::kBoundaryInterp;
  return o;
}

inline Vec domain_center(const ExperimentConfig& c) {
  Vec x = zero_vec();
  for (int a = 0; a < c.n; ++a) x[a] = 0.5 * (c.lo[a] + c.hi[a]);
  return x;
}

}  // namespace obslab
