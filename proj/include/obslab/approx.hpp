#pragma once

// Regularized integrand family: mollification of f in both x and xi with a
// compactly supported symmetric polynomial kernel under tensor
// Gauss-Legendre quadrature, the 1/k p-growth shift, uniform-bound
// verification across the family, and the solve-and-compare sweep.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "obslab/core.hpp"
#include "obslab/integrand.hpp"
#include "obslab/solver.hpp"

namespace obslab {

/// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(q), 0.0);
  weights.assign(static_cast<std::size_t>(q), 0.0);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // evaluate P_q and P'_q by the three-term recurrence
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;  // ascending order
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

/// Symmetric compactly supported kernel c_n (1-|y|^2)^2 on the unit ball,
/// realized as a tensor quadrature rule normalized so the discrete mass is
/// exactly one.
struct MollifierKernel {
  int n = 2;
  int quadrature_order = 6;
  double cn = 0.0;
  std::vector<Vec> points;       // tensor nodes in the bounding box
  std::vector<double> weights;   // w * phi(y), already carrying cn

  static double profile_raw(const Vec& y, int n) {
    const double r2 = norm_sq(y, n);
    const double s = 1.0 - r2;
    return s > 0.0 ? s * s : 0.0;
  }

  double phi(const Vec& y) const { return cn * profile_raw(y, n); }

  double mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  /// Second moment int |y|^2 phi(y) dy under the same quadrature.
  double second_moment() const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      s += weights[i] * norm_sq(points[i], n);
    return s;
  }
};

inline MollifierKernel make_mollifier(int n, int quadrature_order = 6) {
  if (quadrature_order < 3)
    throw std::invalid_argument("make_mollifier: quadrature order must be >= 3");
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("make_mollifier: n must be 1 or 2");
  MollifierKernel k;
  k.n = n;
  k.quadrature_order = quadrature_order;
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(quadrature_order, gl_nodes, gl_weights);
  const int q = quadrature_order;
  double raw_mass = 0.0;
  if (n == 1) {
    for (int i = 0; i < q; ++i) {
      Vec y{gl_nodes[static_cast<std::size_t>(i)], 0.0};
      const double w = gl_weights[static_cast<std::size_t>(i)] * MollifierKernel::profile_raw(y, 1);
      k.points.push_back(y);
      k.weights.push_back(w);
      raw_mass += w;
    }
  } else {
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        Vec y{gl_nodes[static_cast<std::size_t>(i)], gl_nodes[static_cast<std::size_t>(j)]};
        const double w = gl_weights[static_cast<std::size_t>(i)] *
                         gl_weights[static_cast<std::size_t>(j)] *
                         MollifierKernel::profile_raw(y, 2);
        k.points.push_back(y);
        k.weights.push_back(w);
        raw_mass += w;
      }
    }
  }
  k.cn = 1.0 / raw_mass;
  for (double& w : k.weights) w *= k.cn;
  return k;
}

/// f^eps(x, xi) = sum_a sum_b w_a w_b f(x + eps y_a, xi + eps eta_b);
/// derivatives commute with the shift, so they are quadratures of shifted
/// derivatives of the base integrand.
class MollifiedIntegrand final : public Integrand {
 public:
  MollifiedIntegrand(std::shared_ptr<const Integrand> base, MollifierKernel kernel, double eps)
      : base_(std::move(base)),
        product_(dynamic_cast<const WeightedPEnergy*>(base_.get())),
        kernel_(std::move(kernel)),
        eps_(eps) {}

  double f(const Vec& x, const Vec& xi, int n) const override {
    if (product_) {
      const double p = product_->exponent();
      double gsum = 0.0;
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Vec xb = axpy(eps_, kernel_.points[b], xi, n);
        gsum += kernel_.weights[b] * std::pow(1.0 + norm_sq(xb, n), 0.5 * p);
      }
      return coeff_avg(x, n) * gsum;
    }
    double s = 0.0;
    for (std::size_t a = 0; a < kernel_.points.size(); ++a) {
      const Vec xs = axpy(eps_, kernel_.points[a], x, n);
      for (std::size_t b = 0; b < kernel_.points.size(); ++b)
        s += kernel_.weights[a] * kernel_.weights[b] *
             base_->f(xs, axpy(eps_, kernel_.points[b], xi, n), n);
    }
    return s;
  }
  Vec grad_xi(const Vec& x, const Vec& xi, int n) const override {
    Vec s = zero_vec();
    if (product_) {
      const double p = product_->exponent();
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Vec xb = axpy(eps_, kernel_.points[b], xi, n);
        const double c =
            kernel_.weights[b] * p * std::pow(1.0 + norm_sq(xb, n), 0.5 * (p - 2.0));
        for (int i = 0; i < n; ++i) s[i] += c * xb[i];
      }
      return scale(coeff_avg(x, n), s, n);
    }
    for (std::size_t a = 0; a < kernel_.points.size(); ++a) {
      const Vec xs = axpy(eps_, kernel_.points[a], x, n);
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Vec g = base_->grad_xi(xs, axpy(eps_, kernel_.points[b], xi, n), n);
        const double w = kernel_.weights[a] * kernel_.weights[b];
        for (int i = 0; i < n; ++i) s[i] += w * g[i];
      }
    }
    return s;
  }
  Mat hess_xi(const Vec& x, const Vec& xi, int n) const override {
    Mat s;
    if (product_) {
      const double p = product_->exponent();
      const double a = coeff_avg(x, n);
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Vec xb = axpy(eps_, kernel_.points[b], xi, n);
        const double t = 1.0 + norm_sq(xb, n);
        const double c = a * kernel_.weights[b] * p * std::pow(t, 0.5 * (p - 2.0));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            s(i, j) += c * ((i == j ? 1.0 : 0.0) + (p - 2.0) * xb[i] * xb[j] / t);
      }
      return s;
    }
    for (std::size_t a = 0; a < kernel_.points.size(); ++a) {
      const Vec xs = axpy(eps_, kernel_.points[a], x, n);
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Mat h = base_->hess_xi(xs, axpy(eps_, kernel_.points[b], xi, n), n);
        const double w = kernel_.weights[a] * kernel_.weights[b];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s(i, j) += w * h(i, j);
      }
    }
    return s;
  }
  Mat mixed_xxi(const Vec& x, const Vec& xi, int n) const override {
    Mat s;
    if (product_) {
      const double p = product_->exponent();
      Vec gsum = zero_vec();
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Vec xb = axpy(eps_, kernel_.points[b], xi, n);
        const double c =
            kernel_.weights[b] * p * std::pow(1.0 + norm_sq(xb, n), 0.5 * (p - 2.0));
        for (int i = 0; i < n; ++i) gsum[i] += c * xb[i];
      }
      for (int col = 0; col < n; ++col) {
        double dsum = 0.0;
        for (std::size_t a = 0; a < kernel_.points.size(); ++a)
          dsum += kernel_.weights[a] *
                  product_->coeff_partial(col, axpy(eps_, kernel_.points[a], x, n));
        for (int i = 0; i < n; ++i) s(i, col) = dsum * gsum[i];
      }
      return s;
    }
    for (std::size_t a = 0; a < kernel_.points.size(); ++a) {
      const Vec xs = axpy(eps_, kernel_.points[a], x, n);
      for (std::size_t b = 0; b < kernel_.points.size(); ++b) {
        const Mat m = base_->mixed_xxi(xs, axpy(eps_, kernel_.points[b], xi, n), n);
        const double w = kernel_.weights[a] * kernel_.weights[b];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s(i, j) += w * m(i, j);
      }
    }
    return s;
  }

 private:
  double coeff_avg(const Vec& x, int n) const {
    double s = 0.0;
    for (std::size_t a = 0; a < kernel_.points.size(); ++a)
      s += kernel_.weights[a] * product_->coeff(axpy(eps_, kernel_.points[a], x, n));
    return s;
  }

  std::shared_ptr<const Integrand> base_;
  const WeightedPEnergy* product_;  // non-null when the base factorizes as a(x) g(xi)
  MollifierKernel kernel_;
  double eps_;
};

inline IntegrandSpec mollify_integrand(const IntegrandSpec& spec, const MollifierKernel& kernel,
                                       double eps) {
  spec.validate();
  if (kernel.quadrature_order < 3)
    throw std::invalid_argument("mollify_integrand: quadrature order must be >= 3");
  if (kernel.n != spec.n) throw std::invalid_argument("mollify_integrand: dimension mismatch");
  IntegrandSpec out = spec;
  out.family = "mollified(" + spec.family + ")";
  out.impl = std::make_shared<MollifiedIntegrand>(spec.impl, kernel, eps);
  return out;
}

/// f^{lk}(x, xi) = f^l(x, xi) + (1/k)(1+|xi|^2)^{p/2}.
inline IntegrandSpec make_flk(const IntegrandSpec& f_ell, long k) {
  if (k < 1) throw std::invalid_argument("make_flk: k must be >= 1");
  IntegrandSpec out = f_ell;
  out.family = f_ell.family + "+k" + std::to_string(k);
  out.impl = std::make_shared<ShiftedPEnergy>(f_ell.impl, 1.0 / static_cast<double>(k), f_ell.p);
  return out;
}

struct FamilyMemberReport {
  double eps = 0.0;
  long k = 0;
  double lambda_hat = 0.0;
  double Lambda_hat_hess = 0.0;
  double Lambda_hat_mixed = 0.0;
  double growth_min = 0.0;  // min of f^{lk} / (1+|xi|^2)^{p/2}
  double growth_max = 0.0;
  double sup_deviation = 0.0;  // max over samples of |f^{lk} - f|
};

struct FamilyReport {
  std::vector<FamilyMemberReport> members;
  double M1_hat = 0.0, M2_hat = 0.0;          // family growth bracket
  double lambda1_hat = 0.0, Lambda1_hat = 0.0;  // family ellipticity bracket
  bool uniform = false;
};

/// Verifies numerically that the whole regularized family shares finite
/// positive growth and ellipticity brackets, and tabulates the sup
/// deviation from the base integrand.
inline FamilyReport verify_theorem_app(const IntegrandSpec& spec, const MollifierKernel& kernel,
                                       const std::vector<double>& eps_list,
                                       const std::vector<long>& k_list, const SampleBox& box,
                                       long samples_per_member = 400) {
  if (eps_list.empty() || k_list.empty())
    throw std::invalid_argument("verify_theorem_app: empty schedule");
  FamilyReport rep;
  rep.M1_hat = std::numeric_limits<double>::infinity();
  rep.lambda1_hat = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    const IntegrandSpec f_ell = mollify_integrand(spec, kernel, eps);
    for (long k : k_list) {
      const IntegrandSpec flk = make_flk(f_ell, k);
      FamilyMemberReport m;
      m.eps = eps;
      m.k = k;
      const StructureReport sr = check_structure(flk, box, samples_per_member);
      m.lambda_hat = sr.lambda_hat;
      m.Lambda_hat_hess = sr.Lambda_hat_hess;
      m.Lambda_hat_mixed = sr.Lambda_hat_mixed;
      m.growth_min = std::numeric_limits<double>::infinity();
      const double log_lo = std::log(box.xi_r_min), log_hi = std::log(box.xi_r_max);
      for (long s = 0; s < samples_per_member; ++s) {
        const std::uint64_t idx = static_cast<std::uint64_t>(s) + 1;
        Vec x = zero_vec(), xi = zero_vec();
        int dim_cursor = 0;
        for (int i = 0; i < spec.n; ++i)
          x[i] = box.x_lo[i] + (box.x_hi[i] - box.x_lo[i]) * halton(idx, kHaltonPrimes[dim_cursor++]);
        const double r =
            s == 0 ? 0.0 : std::exp(log_lo + (log_hi - log_lo) * halton(idx, kHaltonPrimes[dim_cursor]));
        ++dim_cursor;
        double dn = 0.0;
        for (int i = 0; i < spec.n; ++i) {
          xi[i] = 2.0 * halton(idx, kHaltonPrimes[dim_cursor++]) - 1.0;
          dn += xi[i] * xi[i];
        }
        dn = std::sqrt(dn);
        for (int i = 0; i < spec.n; ++i) xi[i] = dn > 0 ? r * xi[i] / dn : 0.0;
        const double t = 1.0 + norm_sq(xi, spec.n);
        const double v = eval_f(flk, x, xi);
        const double ratio = v / std::pow(t, 0.5 * spec.p);
        m.growth_min = std::min(m.growth_min, ratio);
        m.growth_max = std::max(m.growth_max, ratio);
        m.sup_deviation = std::max(m.sup_deviation, std::abs(v - eval_f(spec, x, xi)));
      }
      rep.members.push_back(m);
    }
  }
  rep.M2_hat = 0.0;
  rep.Lambda1_hat = 0.0;
  for (const FamilyMemberReport& m : rep.members) {
    rep.M1_hat = std::min(rep.M1_hat, m.growth_min);
    rep.M2_hat = std::max(rep.M2_hat, m.growth_max);
    rep.lambda1_hat = std::min(rep.lambda1_hat, m.lambda_hat);
    rep.Lambda1_hat = std::max(rep.Lambda1_hat, std::max(m.Lambda_hat_hess, m.Lambda_hat_mixed));
  }
  rep.uniform = rep.M1_hat > 0.0 && std::isfinite(rep.M2_hat) && rep.lambda1_hat > 0.0 &&
                std::isfinite(rep.Lambda1_hat);
  return rep;
}

struct ScheduleRecord {
  int ell = 0;
  double eps = 0.0;
  long k = 0;
  double energy = 0.0;      // energy of v under f^{lk}
  double grad_lp = 0.0;     // ||Dv||_{L^p} over the domain
  double grad_linf = 0.0;   // max cell |Dv| over the inner ball
  double dist_to_ref = 0.0;  // ||v - u_ref||_{L^p}
  bool converged = false;
  bool energy_bound_ok = false;  // int |Dv|^p <= C int (1+|Du_ref|^2)^{p/2}
  bool minimality_ok = false;    // energy_flk(v) <= energy_flk(u_ref)
};

struct ApproximationSchedule {
  std::vector<double> eps_list;  // strictly decreasing
  std::vector<long> k_list;
  Ball inner_ball;               // region for the sup-gradient diagnostic
  double growth_upper = 0.0;     // measured M2_hat / M1_hat, set by run_schedule
  std::vector<ScheduleRecord> records;
};

inline ApproximationSchedule make_schedule(double eps0, int L, std::vector<long> k_list,
                                           Ball inner_ball) {
  ApproximationSchedule s;
  for (int l = 1; l <= L; ++l) s.eps_list.push_back(eps0 * std::pow(2.0, -l));
  for (std::size_t i = 1; i < s.eps_list.size(); ++i)
    if (!(s.eps_list[i] < s.eps_list[i - 1]))
      throw std::invalid_argument("make_schedule: eps must decrease strictly");
  s.k_list = std::move(k_list);
  s.inner_ball = inner_ball;
  return s;
}

inline double grad_lp_norm(const ScalarField& u, double p) {
  const Grid& g = u.grid;
  const VectorField du = gradient(u);
  double s = 0.0;
  for (const Vec& d : du.v) s += std::pow(norm(d, g.n), p);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

inline double field_lp_distance(const ScalarField& a, const ScalarField& b, double p) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k) s += std::pow(std::abs(a.v[k] - b.v[k]), p);
  return std::pow(s * a.grid.cell_volume(), 1.0 / p);
}

/// Solves the obstacle problem under every f^{lk} of the schedule against
/// the same obstacle and boundary data, recording energies, gradient norms
/// and the distance to the base-problem solution.
inline ApproximationSchedule run_schedule(const ObstacleProblem& problem,
                                          const MollifierKernel& kernel,
                                          ApproximationSchedule schedule,
                                          const SolveOptions& solver_opts,
                                          const ScalarField* reference = nullptr) {
  ObstacleProblem base = problem;
  ScalarField u_ref;
  if (reference) {
    u_ref = *reference;
  } else {
    SolveResult ref_result = solve(base, solver_opts);
    if (!ref_result.converged)
      throw std::runtime_error("run_schedule: reference solve did not converge");
    u_ref = ref_result.u;
  }
  const Grid& g = problem.grid;
  const VectorField du_ref = gradient(u_ref);
  double ref_quantity = 0.0;  // int (1+|Du_ref|^2)^{p/2}
  for (const Vec& d : du_ref.v)
    ref_quantity += std::pow(1.0 + norm_sq(d, g.n), 0.5 * problem.spec.p);
  ref_quantity *= g.cell_volume();

  // growth bracket for the energy-bound constant, from a modest sample sweep
  SampleBox box;
  box.x_lo = g.lo;
  box.x_hi = g.hi;
  const FamilyReport fam =
      verify_theorem_app(problem.spec, kernel, schedule.eps_list, schedule.k_list, box, 200);
  schedule.growth_upper = fam.M2_hat / fam.M1_hat;

  for (std::size_t l = 0; l < schedule.eps_list.size(); ++l) {
    const IntegrandSpec f_ell = mollify_integrand(problem.spec, kernel, schedule.eps_list[l]);
    for (long k : schedule.k_list) {
      ScheduleRecord rec;
      rec.ell = static_cast<int>(l + 1);
      rec.eps = schedule.eps_list[l];
      rec.k = k;
      ObstacleProblem sub = problem;
      sub.spec = make_flk(f_ell, k);
      const SolveResult r = solve(sub, solver_opts);
      rec.converged = r.converged;
      rec.energy = energy(sub.spec, r.u);
      rec.grad_lp = grad_lp_norm(r.u, problem.spec.p);
      const VectorField dv = gradient(r.u);
      for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i)
          if (schedule.inner_ball.contains(g.cell_center(i, j), g.n))
            rec.grad_linf = std::max(rec.grad_linf, norm(dv.at(i, j), g.n));
      rec.dist_to_ref = field_lp_distance(r.u, u_ref, problem.spec.p);
      double grad_p_integral = 0.0;
      for (const Vec& d : dv.v) grad_p_integral += std::pow(norm(d, g.n), problem.spec.p);
      grad_p_integral *= g.cell_volume();
      rec.energy_bound_ok = grad_p_integral <= schedule.growth_upper * ref_quantity * (1.0 + 1e-12);
      rec.minimality_ok = rec.energy <= energy(sub.spec, u_ref) * (1.0 + 1e-12) + 1e-12;
      schedule.records.push_back(rec);
    }
  }
  return schedule;
}

}  // namespace obslab
