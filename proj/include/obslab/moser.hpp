#pragma once

// Iteration-scheme quantities: the exponent recursion and its closed form,
// the summed exponent beta, the shrinking radii schedule, the A_k power
// means, and empirical checks of the reverse-Holder inequality and the
// final Lipschitz-type estimate.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "obslab/core.hpp"
#include "obslab/grid.hpp"

namespace obslab {

struct MoserSequence {
  double n = 0.0;
  double p = 0.0;
  double two_star = 0.0;
  std::vector<double> gammas;  // gamma_1 .. gamma_K
  double beta = 0.0;           // closed form
  double beta_series = 0.0;    // partial-sum value, converged to 1e-14
  double rho0 = 0.0, R0 = 0.0;
  std::vector<double> radii;  // R_1 .. R_K
};

struct MoserReport {
  std::vector<double> gammas;
  std::vector<double> radii;
  std::vector<double> a_values;       // A_1 .. A_K
  std::vector<double> c_meas;         // per-step constants from the A_{k+1} <= [...] A_k chain
  double lhs_final = 0.0;             // max over B_rho0 cells of (1+|Du|^2)^{1/2}
  double rhs_base = 0.0;              // (int_{B_R0} (1+|Du|^2)^{p/2})^{1/p}
  double fitted_C = 0.0;              // lhs * (R0-rho0)^beta / rhs_base
  double beta = 0.0;
  double beta_scaling_exponent = 0.0;  // slope of log(bound) vs log(R-rho)
  double a_limit = 0.0;               // last A_k, the power-mean proxy for the sup
};

inline double sobolev_two_star(double n, double two_star_override = 0.0) {
  if (n > 2.0) return 2.0 * n / (n - 2.0);
  if (two_star_override > 2.0) return two_star_override;
  throw std::invalid_argument("n = 2 requires a two_star override > 2");
}

/// gamma_1 = 0; gamma_{k+1} = (gamma_k + p/2)(2*/2) - p/2, cross-checked
/// against the closed form gamma_k = (p/2)((2*/2)^{k-1} - 1), and beta both
/// as the series sum(1/(p/2+gamma_i)) and as 2*/(p(2*/2) - p).
inline MoserSequence gamma_sequence(double p, double n, double two_star_override, int K) {
  if (p < 2.0) throw std::invalid_argument("gamma_sequence: p must be >= 2");
  if (n < 2.0) throw std::invalid_argument("gamma_sequence: n must be >= 2");
  if (K < 1) throw std::invalid_argument("gamma_sequence: K must be >= 1");
  MoserSequence seq;
  seq.p = p;
  seq.n = n;
  seq.two_star = sobolev_two_star(n, two_star_override);
  const double q = 0.5 * seq.two_star;  // 2*/2 > 1

  seq.gammas.resize(static_cast<std::size_t>(K));
  seq.gammas[0] = 0.0;
  for (int k = 1; k < K; ++k)
    seq.gammas[static_cast<std::size_t>(k)] =
        (seq.gammas[static_cast<std::size_t>(k - 1)] + 0.5 * p) * q - 0.5 * p;
  for (int k = 0; k < K; ++k) {
    const double closed = 0.5 * p * (std::pow(q, k) - 1.0);
    const double got = seq.gammas[static_cast<std::size_t>(k)];
    if (std::abs(got - closed) > 1e-12 * std::max(1.0, std::abs(closed)))
      throw std::runtime_error("gamma_sequence: recursion disagrees with the closed form");
  }

  seq.beta = seq.two_star / (p * q - p);
  double sum = 0.0, gamma = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double term = 1.0 / (0.5 * p + gamma);
    sum += term;
    if (term < 1e-16 * std::max(1.0, sum)) break;
    gamma = (gamma + 0.5 * p) * q - 0.5 * p;
  }
  seq.beta_series = sum;
  if (std::abs(seq.beta_series - seq.beta) > 1e-12 * seq.beta)
    throw std::runtime_error("gamma_sequence: series beta disagrees with the closed form");
  return seq;
}

/// R_k = rho0 + (R0 - rho0) 2^{-k}, k = 1..K; strictly decreasing to rho0.
inline std::vector<double> radii_schedule(double rho0, double R0, int K) {
  if (!(0.0 < rho0 && rho0 < R0 && R0 < rho0 + 1.0))
    throw std::invalid_argument("radii_schedule: need 0 < rho0 < R0 < rho0 + 1");
  std::vector<double> out(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k)
    out[static_cast<std::size_t>(k - 1)] = rho0 + (R0 - rho0) * std::pow(2.0, -k);
  return out;
}

/// A_k = (int_{B} (1+|Du|^2)^{p/2+gamma_k} dx)^{1/(p+2 gamma_k)}, evaluated
/// in log space so large exponents never overflow.
inline double compute_ak(const ScalarField& u, const Ball& ball, double p, double gamma_k) {
  if (gamma_k < 0.0) throw std::invalid_argument("compute_ak: gamma must be >= 0");
  const Grid& g = u.grid;
  const VectorField du = gradient(u);
  std::vector<double> terms;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      if (!ball.contains(g.cell_center(i, j), g.n)) continue;
      const double t = 1.0 + norm_sq(du.at(i, j), g.n);
      terms.push_back((0.5 * p + gamma_k) * std::log(t));
    }
  }
  if (terms.empty()) return 0.0;
  const double log_integral = log_sum_exp(terms) + g.n * std::log(g.h);
  const double a = std::exp(log_integral / (p + 2.0 * gamma_k));
  if (!std::isfinite(a)) throw std::runtime_error("compute_ak: overflow, unbounded gradient?");
  return a;
}

/// Measured constant of the reverse-Holder inequality:
///   (int_{B_rho} t^{(p/2+gamma) 2*/2})^{2/2*}
///     <= C (1+gamma^2)/(R-rho)^2 int_{B_R} t^{p/2+gamma},   t = 1+|Du|^2.
/// Returns LHS (R-rho)^2 / ((1+gamma^2) RHS).
inline double reverse_holder_check(const ScalarField& u, const Ball& inner, const Ball& outer,
                                   double p, double gamma, double two_star) {
  const Grid& g = u.grid;
  const VectorField du = gradient(u);
  std::vector<double> lhs_terms, rhs_terms;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      const Vec c = g.cell_center(i, j);
      const double t = 1.0 + norm_sq(du.at(i, j), g.n);
      if (inner.contains(c, g.n))
        lhs_terms.push_back((0.5 * p + gamma) * 0.5 * two_star * std::log(t));
      if (outer.contains(c, g.n)) rhs_terms.push_back((0.5 * p + gamma) * std::log(t));
    }
  }
  const double log_vol = g.n * std::log(g.h);
  const double log_lhs = (log_sum_exp(lhs_terms) + log_vol) * 2.0 / two_star;
  const double log_rhs = log_sum_exp(rhs_terms) + log_vol;
  const double dr = outer.radius - inner.radius;
  return std::exp(log_lhs - log_rhs) * dr * dr / (1.0 + gamma * gamma);
}

struct LipschitzCheckOptions {
  double two_star_override = 4.0;  // used when n = 2
  int K = 0;                       // 0: smallest K with p + 2 gamma_K >= 200
  int slope_radii = 4;             // inner radii for the beta scaling fit
};

/// Full iteration-scheme diagnostic on a stored solution.
inline MoserReport lipschitz_estimate_check(const ScalarField& u, const Vec& center,
                                            double rho0, double R0, double p, double n,
                                            const LipschitzCheckOptions& opts = {}) {
  const Grid& g = u.grid;
  MoserReport rep;
  const double two_star = sobolev_two_star(n, opts.two_star_override);
  int K = opts.K;
  if (K <= 0) {
    K = 1;
    while (p + 2.0 * (0.5 * p * (std::pow(0.5 * two_star, K - 1) - 1.0)) < 200.0 && K < 200)
      ++K;
  }
  const MoserSequence seq = gamma_sequence(p, n, opts.two_star_override, K);
  rep.gammas = seq.gammas;
  rep.radii = radii_schedule(rho0, R0, K);
  rep.beta = seq.beta;

  // sup quantity on the inner ball and base integral on the outer one
  const VectorField du = gradient(u);
  const Ball inner{center, rho0};
  const Ball outer{center, R0};
  for (int j = 0; j < g.cells_y(); ++j)
    for (int i = 0; i < g.cells_x(); ++i)
      if (inner.contains(g.cell_center(i, j), g.n))
        rep.lhs_final =
            std::max(rep.lhs_final, std::sqrt(1.0 + norm_sq(du.at(i, j), g.n)));
  rep.rhs_base = compute_ak(u, outer, p, 0.0);
  rep.fitted_C = rep.lhs_final * std::pow(R0 - rho0, seq.beta) / rep.rhs_base;

  // A_k chain and per-step measured constants of the inductive estimate
  for (int k = 1; k <= K; ++k) {
    const Ball b{center, rep.radii[static_cast<std::size_t>(k - 1)]};
    rep.a_values.push_back(
        compute_ak(u, b, p, rep.gammas[static_cast<std::size_t>(k - 1)]));
  }
  for (int k = 1; k < K; ++k) {
    const double gamma_k = rep.gammas[static_cast<std::size_t>(k - 1)];
    const double ak = rep.a_values[static_cast<std::size_t>(k - 1)];
    const double ak1 = rep.a_values[static_cast<std::size_t>(k)];
    // invert A_{k+1} <= [C (1+gamma_k^2) 4^{k+1} / (R0-rho0)^2]^{1/(p+2 gamma_k)} A_k
    const double log_ratio = (p + 2.0 * gamma_k) * std::log(ak1 / ak);
    const double c = std::exp(log_ratio) * (R0 - rho0) * (R0 - rho0) /
                     ((1.0 + gamma_k * gamma_k) * std::pow(4.0, k + 1));
    rep.c_meas.push_back(c);
  }
  rep.a_limit = rep.a_values.back();

  // beta scaling: the truncated iteration product gives, for each inner
  // radius rho_i, a bound A_1 * prod [C_hat (1+gamma_i^2) 4^{i+1}/(R0-rho_i)^2]^{1/(p+2 gamma_i)};
  // its log regressed against log(R0 - rho_i) should have slope close to -beta.
  double c_hat = 0.0;
  for (double c : rep.c_meas) c_hat = std::max(c_hat, c);
  if (c_hat <= 0.0) c_hat = 1.0;
  std::vector<double> log_dr, log_bound;
  for (int s = 0; s < opts.slope_radii; ++s) {
    const double frac = 0.25 + 0.75 * s / std::max(1, opts.slope_radii - 1);
    const double rho_i = R0 - frac * (R0 - rho0);
    const std::vector<double> radii_i = radii_schedule(rho_i, R0, K);
    const double a1 = compute_ak(u, Ball{center, radii_i[0]}, p, seq.gammas[0]);
    double log_b = std::log(a1);
    for (int k = 1; k <= K; ++k) {
      const double gamma_k = seq.gammas[static_cast<std::size_t>(k - 1)];
      log_b += (std::log(c_hat * (1.0 + gamma_k * gamma_k)) + (k + 1) * std::log(4.0) -
                2.0 * std::log(R0 - rho_i)) /
               (p + 2.0 * gamma_k);
    }
    log_dr.push_back(std::log(R0 - rho_i));
    log_bound.push_back(log_b);
  }
  rep.beta_scaling_exponent = fit_slope(log_dr, log_bound);
  return rep;
}

/// Partial products of prod [C (1+gamma_i^2) 4^{i+1}]^{1/(p+2 gamma_i)};
/// convergence of the sequence is the finiteness check for the iteration.
inline std::vector<double> iteration_product_partial(double p, double n,
                                                     double two_star_override, int K,
                                                     double C) {
  const MoserSequence seq = gamma_sequence(p, n, two_star_override, K);
  std::vector<double> out;
  double log_prod = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double gamma_k = seq.gammas[static_cast<std::size_t>(k - 1)];
    log_prod +=
        (std::log(C * (1.0 + gamma_k * gamma_k)) + (k + 1) * std::log(4.0)) / (p + 2.0 * gamma_k);
    out.push_back(std::exp(log_prod));
  }
  return out;
}

}  // namespace obslab
