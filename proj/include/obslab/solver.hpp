#pragma once

// Discrete obstacle problem solver: projected gradient with Armijo
// backtracking over {u >= psi, boundary pinned}, multiplier and active-set
// extraction, plus a coordinate-descent oracle for small instances.

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "obslab/grid.hpp"
#include "obslab/integrand.hpp"

namespace obslab {

struct ObstacleProblem {
  Grid grid;
  IntegrandSpec spec;
  ScalarField psi;  // obstacle, nodal
  ScalarField Psi;  // boundary datum; only boundary nodes are read by default
  bool feasibility_checked = false;

  void check_feasible() {
    const Grid& g = grid;
    if (psi.grid.num_nodes() != g.num_nodes() || Psi.grid.num_nodes() != g.num_nodes())
      throw std::invalid_argument("ObstacleProblem: field/grid mismatch");
    for (int j = 0; j < g.nodes_y(); ++j)
      for (int i = 0; i < g.nodes_x(); ++i)
        if (g.is_boundary_node(i, j) && Psi.at(i, j) < psi.at(i, j))
          throw std::invalid_argument(
              "ObstacleProblem: boundary datum below the obstacle, feasible class empty");
    feasibility_checked = true;
  }
};

enum class InitMode {
  kBoundaryInterp,  // max(psi, bilinear blend of the boundary data)
  kObstacle,        // start at the obstacle itself
  kPsiInterior      // max(psi, Psi read at every node)
};

struct SolveOptions {
  double tol = 1e-7;
  long max_iter = 200000;
  double step0 = 1.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double growth = 1.25;
  bool spectral_step = true;  // Barzilai-Borwein trial step, Armijo-safeguarded
  InitMode init = InitMode::kBoundaryInterp;
};

struct SolveResult {
  ScalarField u;
  ScalarField multiplier;  // lambda_h: interior Euler-Lagrange density, >= 0 at KKT points
  std::vector<bool> active_mask;
  long iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> energy_history;
  bool converged = false;
  double active_threshold = 0.0;
};

namespace solver_detail {

inline ScalarField initial_iterate(const ObstacleProblem& prob, InitMode mode) {
  const Grid& g = prob.grid;
  ScalarField u(g);
  if (mode == InitMode::kBoundaryInterp) {
    const int nx = g.nodes_x(), ny = g.nodes_y();
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (g.n == 1) {
          const double s = static_cast<double>(i) / (nx - 1);
          u.at(i, 0) = (1.0 - s) * prob.Psi.at(0, 0) + s * prob.Psi.at(nx - 1, 0);
        } else {
          // transfinite (Coons) blend of the four boundary edges
          const double s = static_cast<double>(i) / (nx - 1);
          const double t = static_cast<double>(j) / (ny - 1);
          const double edges = (1.0 - s) * prob.Psi.at(0, j) + s * prob.Psi.at(nx - 1, j) +
                               (1.0 - t) * prob.Psi.at(i, 0) + t * prob.Psi.at(i, ny - 1);
          const double corners =
              (1.0 - s) * (1.0 - t) * prob.Psi.at(0, 0) + s * (1.0 - t) * prob.Psi.at(nx - 1, 0) +
              (1.0 - s) * t * prob.Psi.at(0, ny - 1) + s * t * prob.Psi.at(nx - 1, ny - 1);
          u.at(i, j) = edges - corners;
        }
      }
    }
  } else if (mode == InitMode::kPsiInterior) {
    u.v = prob.Psi.v;
  } else {
    u.v = prob.psi.v;
  }
  // enforce feasibility: boundary pinned to Psi, interior clipped to psi
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      if (g.is_boundary_node(i, j))
        u.at(i, j) = prob.Psi.at(i, j);
      else
        u.at(i, j) = std::max(u.at(i, j), prob.psi.at(i, j));
    }
  }
  return u;
}

/// Euler-Lagrange density: energy_gradient / h^n, zeroed on the boundary.
inline ScalarField gradient_density(const ObstacleProblem& prob, const ScalarField& u) {
  const Grid& g = prob.grid;
  ScalarField gd = energy_gradient(prob.spec, u);
  const double inv_vol = 1.0 / g.cell_volume();
  for (int j = 0; j < g.nodes_y(); ++j)
    for (int i = 0; i < g.nodes_x(); ++i)
      gd.at(i, j) = g.is_boundary_node(i, j) ? 0.0 : gd.at(i, j) * inv_vol;
  return gd;
}

}  // namespace solver_detail

/// || u - Pi_K(u - s * grad_density(u)) ||_inf / s; zero iff u is a discrete
/// KKT point of the constrained problem.
inline double vi_residual(const ObstacleProblem& prob, const ScalarField& u, double s) {
  const Grid& g = prob.grid;
  const ScalarField gd = solver_detail::gradient_density(prob, u);
  double r = 0.0;
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      if (g.is_boundary_node(i, j)) continue;
      const double proj = std::max(prob.psi.at(i, j), u.at(i, j) - s * gd.at(i, j));
      r = std::max(r, std::abs(u.at(i, j) - proj));
    }
  }
  return r / s;
}

inline SolveResult solve(ObstacleProblem prob, const SolveOptions& opts = {}) {
  if (opts.tol <= 0.0) throw std::invalid_argument("solve: tol must be positive");
  prob.spec.validate();
  if (!prob.feasibility_checked) prob.check_feasible();
  const Grid& g = prob.grid;

  SolveResult res;
  res.u = solver_detail::initial_iterate(prob, opts.init);
  ScalarField& u = res.u;

  double E = energy(prob.spec, u);
  double step = opts.step0;
  ScalarField gd = solver_detail::gradient_density(prob, u);
  std::vector<double> prev_du, prev_dg;
  std::deque<double> recent;  // nonmonotone line-search memory

  const double vol = g.cell_volume();
  auto kkt_residual = [&](const ScalarField& grad_dens) {
    double r = 0.0;
    for (int j = 0; j < g.nodes_y(); ++j)
      for (int i = 0; i < g.nodes_x(); ++i) {
        if (g.is_boundary_node(i, j)) continue;
        r = std::max(r, std::abs(std::min(u.at(i, j) - prob.psi.at(i, j), grad_dens.at(i, j))));
      }
    return r;
  };

  for (long it = 0; it < opts.max_iter; ++it) {
    const double r = kkt_residual(gd);  // equals the s = 1 projected residual
    res.residual_history.push_back(r);
    res.energy_history.push_back(E);
    res.iterations = it;
    if (r <= opts.tol) {
      res.converged = true;
      break;
    }

    if (opts.spectral_step && !prev_du.empty()) {
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < prev_du.size(); ++k) {
        num += prev_du[k] * prev_du[k];
        den += prev_du[k] * prev_dg[k];
      }
      if (den > 0.0 && num > 0.0) step = std::clamp(num / den, 1e-14, 1e14);
    }

    // Armijo backtracking on the projected arc, non-monotone: the sufficient
    // decrease is measured against the worst recent energy, and an absolute
    // slack at the rounding level of the quadrature sum keeps the search
    // alive once true decreases drop below machine resolution.
    double E_ref = E;
    for (double e : recent) E_ref = std::max(E_ref, e);
    const double slack = 1e-12 * (1.0 + std::abs(E_ref));
    ScalarField ut(g);
    double Et = E;
    bool accepted = false;
    for (int ls = 0; ls < 64; ++ls) {
      ut.v = u.v;
      for (int j = 0; j < g.nodes_y(); ++j)
        for (int i = 0; i < g.nodes_x(); ++i) {
          if (g.is_boundary_node(i, j)) continue;
          ut.at(i, j) = std::max(prob.psi.at(i, j), u.at(i, j) - step * gd.at(i, j));
        }
      Et = energy(prob.spec, ut);
      double dir = 0.0;  // <grad E, ut - u>, always <= 0 on the projected arc
      for (std::size_t k = 0; k < u.v.size(); ++k)
        dir += gd.v[k] * vol * (ut.v[k] - u.v[k]);
      if (Et <= E_ref + opts.armijo_c * dir + slack) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) break;  // line search stalled
    double max_change = 0.0;
    for (std::size_t k = 0; k < u.v.size(); ++k)
      max_change = std::max(max_change, std::abs(ut.v[k] - u.v[k]));
    if (max_change == 0.0) break;  // update below representable resolution
    recent.push_back(Et);
    if (recent.size() > 10) recent.pop_front();

    ScalarField gd_new = solver_detail::gradient_density(prob, ut);
    prev_du.resize(u.v.size());
    prev_dg.resize(u.v.size());
    for (std::size_t k = 0; k < u.v.size(); ++k) {
      prev_du[k] = ut.v[k] - u.v[k];
      prev_dg[k] = gd_new.v[k] - gd.v[k];
    }
    u.v = ut.v;
    E = Et;
    gd = std::move(gd_new);
    if (!opts.spectral_step) step *= opts.growth;
  }

  // Multiplier: +interior Euler-Lagrange density; negatives stay visible in
  // the recorded residual rather than being clamped away.
  res.multiplier = solver_detail::gradient_density(prob, u);
  res.active_threshold = std::max(10.0 * opts.tol, g.h * g.h);
  res.active_mask.assign(u.v.size(), false);
  for (int j = 0; j < g.nodes_y(); ++j)
    for (int i = 0; i < g.nodes_x(); ++i)
      res.active_mask[static_cast<std::size_t>(g.node_index(i, j))] =
          u.at(i, j) - prob.psi.at(i, j) <= res.active_threshold;
  return res;
}

struct OracleOptions {
  long max_sweeps = 200000;
  double tol = 1e-12;      // max nodal change per sweep at termination
  long max_free_nodes = 5000;  // keeps the oracle restricted to tiny grids
};

/// Independent oracle: cyclic coordinate descent to machine-precision
/// stationarity on the same discrete energy. Each nodal subproblem is a
/// strictly convex 1-D minimization solved by bisection on the derivative.
inline ScalarField brute_force_minimize(ObstacleProblem prob, const OracleOptions& opts = {}) {
  prob.spec.validate();
  if (!prob.feasibility_checked) prob.check_feasible();
  const Grid& g = prob.grid;
  long free_nodes = 0;
  for (int j = 0; j < g.nodes_y(); ++j)
    for (int i = 0; i < g.nodes_x(); ++i)
      if (!g.is_boundary_node(i, j)) ++free_nodes;
  if (free_nodes > opts.max_free_nodes)
    throw std::invalid_argument("brute_force_minimize: instance too large for the oracle");

  ScalarField u = solver_detail::initial_iterate(prob, InitMode::kBoundaryInterp);
  const double c = g.n == 1 ? 1.0 / g.h : 0.5 / g.h;

  // dE/du_k restricted to node (i,j) with trial value t, via the <= 2^n
  // adjacent cells. coeff is the gradient stencil weight of the node in the cell.
  auto partial = [&](int i, int j, double t) {
    double du_k = t - u.at(i, j);
    double acc = 0.0;
    const int ci_lo = std::max(i - 1, 0), ci_hi = std::min(i, g.cells_x() - 1);
    const int cj_lo = g.n == 2 ? std::max(j - 1, 0) : 0;
    const int cj_hi = g.n == 2 ? std::min(j, g.cells_y() - 1) : 0;
    for (int cj = cj_lo; cj <= cj_hi; ++cj) {
      for (int ci = ci_lo; ci <= ci_hi; ++ci) {
        Vec coeff = zero_vec();
        coeff[0] = (i == ci + 1) ? c : -c;
        if (g.n == 2) coeff[1] = (j == cj + 1) ? c : -c;
        // cell gradient with node (i,j) set to t
        Vec grad = zero_vec();
        if (g.n == 1) {
          grad[0] = (u.at(ci + 1, 0) - u.at(ci, 0)) / g.h;
        } else {
          const double u00 = u.at(ci, cj), u10 = u.at(ci + 1, cj);
          const double u01 = u.at(ci, cj + 1), u11 = u.at(ci + 1, cj + 1);
          grad[0] = 0.5 / g.h * (u10 - u00 + u11 - u01);
          grad[1] = 0.5 / g.h * (u01 - u00 + u11 - u10);
        }
        for (int a = 0; a < g.n; ++a) grad[a] += du_k * coeff[a];
        const Vec flux = prob.spec.impl->grad_xi(g.cell_center(ci, cj), grad, g.n);
        acc += dot(flux, coeff, g.n);
      }
    }
    return acc * g.cell_volume();
  };

  for (long sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < g.nodes_y(); ++j) {
      for (int i = 0; i < g.nodes_x(); ++i) {
        if (g.is_boundary_node(i, j)) continue;
        // bracket the root of the increasing derivative
        double t0 = u.at(i, j);
        double d0 = partial(i, j, t0);
        double lo = t0, hi = t0;
        if (d0 > 0.0) {
          double w = g.h;
          while (partial(i, j, lo) > 0.0 && w < 1e8) {
            lo -= w;
            w *= 2.0;
          }
        } else if (d0 < 0.0) {
          double w = g.h;
          while (partial(i, j, hi) < 0.0 && w < 1e8) {
            hi += w;
            w *= 2.0;
          }
        }
        for (int b = 0; b < 200 && hi - lo > 0.0; ++b) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          (partial(i, j, mid) > 0.0 ? hi : lo) = mid;
        }
        const double t_new = std::max(0.5 * (lo + hi), prob.psi.at(i, j));
        max_change = std::max(max_change, std::abs(t_new - u.at(i, j)));
        u.at(i, j) = t_new;
      }
    }
    if (max_change <= opts.tol) break;
  }
  return u;
}

}  // namespace obslab
