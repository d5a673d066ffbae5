#pragma once

// Evaluable integrands f(x, xi) with first and second xi-derivatives and the
// mixed x-xi derivative, plus sampled validation of the ellipticity and
// growth constants lambda, Lambda.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "obslab/core.hpp"
#include "obslab/expr.hpp"

namespace obslab {

/// Evaluation backend: a nonnegative integrand, C^2 in xi.
class Integrand {
 public:
  virtual ~Integrand() = default;
  virtual double f(const Vec& x, const Vec& xi, int n) const = 0;
  virtual Vec grad_xi(const Vec& x, const Vec& xi, int n) const = 0;
  virtual Mat hess_xi(const Vec& x, const Vec& xi, int n) const = 0;
  /// Entry (i, s) holds f_{xi_i x_s}.
  virtual Mat mixed_xxi(const Vec& x, const Vec& xi, int n) const = 0;
};

/// f(x, xi) = a(x) (1 + |xi|^2)^{p/2} with a from the expression grammar.
class WeightedPEnergy final : public Integrand {
 public:
  WeightedPEnergy(double p, ExprPtr a, std::array<ExprPtr, kMaxDim> da)
      : p_(p), a_(std::move(a)), da_(std::move(da)) {}

  static std::shared_ptr<WeightedPEnergy> make(double p, const std::string& a_expr,
                                               const std::string& da_expr = "") {
    ExprPtr a = parse_expr(a_expr);
    std::array<ExprPtr, kMaxDim> da;
    if (da_expr.empty()) {
      for (int s = 0; s < kMaxDim; ++s) da[s] = differentiate(a, s);
    } else {
      // comma-separated list of per-axis partials
      std::size_t cut = da_expr.find(',');
      da[0] = parse_expr(da_expr.substr(0, cut));
      da[1] = cut == std::string::npos ? ExprNode::constant(0.0)
                                       : parse_expr(da_expr.substr(cut + 1));
    }
    return std::make_shared<WeightedPEnergy>(p, a, da);
  }

  double f(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    return a_->eval(x) * std::pow(t, 0.5 * p_);
  }

  Vec grad_xi(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    const double c = a_->eval(x) * p_ * std::pow(t, 0.5 * (p_ - 2.0));
    return scale(c, xi, n);
  }

  Mat hess_xi(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    const double c = a_->eval(x) * p_ * std::pow(t, 0.5 * (p_ - 2.0));
    Mat h;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        h(i, j) = c * ((i == j ? 1.0 : 0.0) + (p_ - 2.0) * xi[i] * xi[j] / t);
    }
    return h;
  }

  Mat mixed_xxi(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    const double c = p_ * std::pow(t, 0.5 * (p_ - 2.0));
    Mat m;
    for (int s = 0; s < n; ++s) {
      const double das = da_[s]->eval(x);
      for (int i = 0; i < n; ++i) m(i, s) = das * c * xi[i];
    }
    return m;
  }

  // product structure a(x) * g(xi), exposed so mollification can factorize
  double exponent() const { return p_; }
  double coeff(const Vec& x) const { return a_->eval(x); }
  double coeff_partial(int s, const Vec& x) const { return da_[s]->eval(x); }

 private:
  double p_;
  ExprPtr a_;
  std::array<ExprPtr, kMaxDim> da_;
};

/// Pointwise combination base + coeff * (1 + |xi|^2)^{p/2}; used for the
/// regularized family of the approximation scheme.
class ShiftedPEnergy final : public Integrand {
 public:
  ShiftedPEnergy(std::shared_ptr<const Integrand> base, double coeff, double p)
      : base_(std::move(base)), coeff_(coeff), p_(p) {}

  double f(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    return base_->f(x, xi, n) + coeff_ * std::pow(t, 0.5 * p_);
  }
  Vec grad_xi(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    const double c = coeff_ * p_ * std::pow(t, 0.5 * (p_ - 2.0));
    Vec g = base_->grad_xi(x, xi, n);
    for (int i = 0; i < n; ++i) g[i] += c * xi[i];
    return g;
  }
  Mat hess_xi(const Vec& x, const Vec& xi, int n) const override {
    const double t = 1.0 + norm_sq(xi, n);
    const double c = coeff_ * p_ * std::pow(t, 0.5 * (p_ - 2.0));
    Mat h = base_->hess_xi(x, xi, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        h(i, j) += c * ((i == j ? 1.0 : 0.0) + (p_ - 2.0) * xi[i] * xi[j] / t);
    return h;
  }
  Mat mixed_xxi(const Vec& x, const Vec& xi, int n) const override {
    return base_->mixed_xxi(x, xi, n);  // added term is x-independent
  }

 private:
  std::shared_ptr<const Integrand> base_;
  double coeff_;
  double p_;
};

struct IntegrandSpec {
  double p = 2.0;
  int n = 2;
  std::string family = "p_energy";
  std::string a_expr = "1";
  double declared_lambda = 0.0;
  double declared_Lambda = 0.0;
  std::shared_ptr<const Integrand> impl;

  void validate() const {
    if (p < 2.0) throw std::invalid_argument("IntegrandSpec: p must be >= 2");
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("IntegrandSpec: n must be 1 or 2");
    if (!impl) throw std::invalid_argument("IntegrandSpec: missing evaluation backend");
  }
};

inline IntegrandSpec make_p_energy(double p, int n, const std::string& a_expr = "1",
                                   const std::string& da_expr = "",
                                   double lambda = 0.0, double Lambda = 0.0) {
  IntegrandSpec s;
  s.p = p;
  s.n = n;
  s.family = a_expr == "1" ? "p_energy" : "weighted_p_energy";
  s.a_expr = a_expr;
  s.declared_lambda = lambda;
  s.declared_Lambda = Lambda;
  s.impl = WeightedPEnergy::make(p, a_expr, da_expr);
  s.validate();
  return s;
}

inline double eval_f(const IntegrandSpec& spec, const Vec& x, const Vec& xi) {
  double v = spec.impl->f(x, xi, spec.n);
  if (!std::isfinite(v))
    throw std::runtime_error("eval_f: non-finite value (malformed coefficient expression?)");
  return v;
}

inline Vec eval_grad_xi(const IntegrandSpec& spec, const Vec& x, const Vec& xi) {
  return spec.impl->grad_xi(x, xi, spec.n);
}

inline Mat eval_hess_xi(const IntegrandSpec& spec, const Vec& x, const Vec& xi) {
  Mat h = spec.impl->hess_xi(x, xi, spec.n);
  for (int i = 0; i < spec.n; ++i)
    for (int j = i + 1; j < spec.n; ++j)
      if (std::abs(h(i, j) - h(j, i)) > 1e-12 * (1.0 + std::abs(h(i, j))))
        throw std::runtime_error("eval_hess_xi: asymmetric Hessian");
  return h;
}

inline Mat eval_mixed_xxi(const IntegrandSpec& spec, const Vec& x, const Vec& xi) {
  return spec.impl->mixed_xxi(x, xi, spec.n);
}

struct SampleBox {
  Vec x_lo = Vec{0.0, 0.0};
  Vec x_hi = Vec{1.0, 1.0};
  double xi_r_min = 1e-2;
  double xi_r_max = 1e2;  // log-spaced radii between the two
};

struct StructureReport {
  double lambda_hat = 0.0;        // min of mu^T H mu / ((1+|xi|^2)^{(p-2)/2} |mu|^2)
  double Lambda_hat_hess = 0.0;   // max of |H_ij| / (1+|xi|^2)^{(p-2)/2}
  double Lambda_hat_mixed = 0.0;  // max of |f_{xi x}| / (1+|xi|^2)^{(p-1)/2}
  long sample_count = 0;
  bool violation = false;
  std::vector<std::pair<Vec, Vec>> worst_case_points;  // (x, xi) attaining the extremes
};

/// Quasi-random sweep of the ellipticity/growth ratios over (x, xi, mu).
/// The reductions are order-independent min/max, so the result is
/// deterministic for a given count.
inline StructureReport check_structure(const IntegrandSpec& spec, const SampleBox& box,
                                       long count, std::uint64_t seed = 0) {
  if (count < 1) throw std::invalid_argument("check_structure: count must be >= 1");
  spec.validate();
  const int n = spec.n;
  StructureReport rep;
  rep.sample_count = count;
  rep.lambda_hat = std::numeric_limits<double>::infinity();
  Vec worst_lambda_x = zero_vec(), worst_lambda_xi = zero_vec();
  Vec worst_hess_x = zero_vec(), worst_hess_xi = zero_vec();
  Vec worst_mixed_x = zero_vec(), worst_mixed_xi = zero_vec();

  const double log_lo = std::log(box.xi_r_min), log_hi = std::log(box.xi_r_max);
  for (long s = 0; s < count; ++s) {
    const std::uint64_t idx = static_cast<std::uint64_t>(s) + 1 + seed * 1000003u;
    Vec x = zero_vec(), xi = zero_vec(), mu = zero_vec();
    int dim_cursor = 0;
    for (int i = 0; i < n; ++i)
      x[i] = box.x_lo[i] +
             (box.x_hi[i] - box.x_lo[i]) * halton(idx, kHaltonPrimes[dim_cursor++]);
    // xi: log-spaced radius times a direction from the unit cube (plus xi = 0 once)
    double r = (s == 0) ? 0.0
                        : std::exp(log_lo + (log_hi - log_lo) *
                                                halton(idx, kHaltonPrimes[dim_cursor]));
    ++dim_cursor;
    double dir_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      xi[i] = 2.0 * halton(idx, kHaltonPrimes[dim_cursor++]) - 1.0;
      dir_norm += xi[i] * xi[i];
    }
    dir_norm = std::sqrt(dir_norm);
    for (int i = 0; i < n; ++i) xi[i] = dir_norm > 0 ? r * xi[i] / dir_norm : 0.0;
    double mu_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      mu[i] = 2.0 * halton(idx, kHaltonPrimes[dim_cursor++]) - 1.0;
      mu_norm += mu[i] * mu[i];
    }
    if (mu_norm == 0.0) {
      mu[0] = 1.0;
      mu_norm = 1.0;
    }

    const double t = 1.0 + norm_sq(xi, n);
    const double scale_hess = std::pow(t, 0.5 * (spec.p - 2.0));
    const double scale_mixed = std::pow(t, 0.5 * (spec.p - 1.0));

    const Mat h = eval_hess_xi(spec, x, xi);
    const double ratio = quadratic_form(h, mu, n) / (scale_hess * mu_norm);
    if (ratio < rep.lambda_hat) {
      rep.lambda_hat = ratio;
      worst_lambda_x = x;
      worst_lambda_xi = xi;
    }
    const double hess_ratio = max_abs_entry(h, n) / scale_hess;
    if (hess_ratio > rep.Lambda_hat_hess) {
      rep.Lambda_hat_hess = hess_ratio;
      worst_hess_x = x;
      worst_hess_xi = xi;
    }
    const Mat m = eval_mixed_xxi(spec, x, xi);
    const double mixed_ratio = frobenius(m, n) / scale_mixed;
    if (mixed_ratio > rep.Lambda_hat_mixed) {
      rep.Lambda_hat_mixed = mixed_ratio;
      worst_mixed_x = x;
      worst_mixed_xi = xi;
    }
  }
  rep.worst_case_points = {{worst_lambda_x, worst_lambda_xi},
                           {worst_hess_x, worst_hess_xi},
                           {worst_mixed_x, worst_mixed_xi}};
  const double rel = 1.0 + 1e-9;
  rep.violation = rep.lambda_hat <= 0.0;
  if (spec.declared_lambda > 0.0 && rep.lambda_hat < spec.declared_lambda / rel)
    rep.violation = true;
  if (spec.declared_Lambda > 0.0 &&
      (rep.Lambda_hat_hess > spec.declared_Lambda * rel ||
       rep.Lambda_hat_mixed > spec.declared_Lambda * rel))
    rep.violation = true;
  return rep;
}

}  // namespace obslab
