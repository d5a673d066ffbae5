#pragma once

// Contact-set linearization: the field g = div(D_xi f(x, Dpsi)) on the
// active set, its theoretical sup bound computed from the obstacle alone,
// the residual of the linearized equation against test functions, and the
// V_p higher-differentiability diagnostic.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "obslab/grid.hpp"
#include "obslab/solver.hpp"

namespace obslab {

struct LinearizationReport {
  double g_inf_measured = 0.0;
  double g_inf_bound = 0.0;
  std::vector<std::pair<std::string, double>> eq_residuals;
  double vp_grad_l2 = 0.0;
  long active_count = 0;
  long buffer_excluded = 0;
};

/// g on active nodes, computed from Dpsi (which equals Du a.e. on the
/// contact set); identically zero elsewhere.
inline ScalarField compute_g(const IntegrandSpec& spec, const SolveResult& result,
                             const ScalarField& psi) {
  const Grid& g = psi.grid;
  const VectorField dpsi = gradient(psi);
  VectorField flux(g);
  for (int j = 0; j < g.cells_y(); ++j)
    for (int i = 0; i < g.cells_x(); ++i)
      flux.at(i, j) = spec.impl->grad_xi(g.cell_center(i, j), dpsi.at(i, j), g.n);
  ScalarField div = divergence(flux);
  ScalarField out(g);
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      const std::size_t k = static_cast<std::size_t>(g.node_index(i, j));
      if (!g.is_boundary_node(i, j) && result.active_mask[k]) out.v[k] = div.v[k];
    }
  }
  return out;
}

/// Sup over region cells of
///   Lambda (1+|Dpsi|^2)^{(p-1)/2} + Lambda (1+|Dpsi|^2)^{(p-2)/2} |D^2 psi|,
/// computed from the obstacle alone with the declared Lambda.
inline double g_bound(const IntegrandSpec& spec, const ScalarField& psi, const Ball& region) {
  const Grid& g = psi.grid;
  const VectorField dpsi = gradient(psi);
  const std::vector<double> hess = hessian_frobenius_cells(psi);
  const double L = spec.declared_Lambda;
  double sup = 0.0;
  bool hit = false;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      if (!region.contains(g.cell_center(i, j), g.n)) continue;
      hit = true;
      const double t = 1.0 + norm_sq(dpsi.at(i, j), g.n);
      const double b = L * std::pow(t, 0.5 * (spec.p - 1.0)) +
                       L * std::pow(t, 0.5 * (spec.p - 2.0)) *
                           hess[static_cast<std::size_t>(g.cell_index(i, j))];
      sup = std::max(sup, b);
    }
  }
  return hit ? sup : 0.0;
}

/// For each test function eta (vanishing on the boundary), the normalized
/// defect of  int D_xi f(x,Du) . Deta dx = -int g eta dx.  At the discrete
/// level the left side equals the multiplier pairing, so the defect measures
/// lambda_h against -g and carries the O(h) active-set discretization error.
inline std::vector<double> linearized_residual(const IntegrandSpec& spec,
                                               const SolveResult& result,
                                               const ScalarField& g_field,
                                               const std::vector<ScalarField>& etas) {
  const Grid& g = result.u.grid;
  const VectorField du = gradient(result.u);
  VectorField flux(g);
  for (int j = 0; j < g.cells_y(); ++j)
    for (int i = 0; i < g.cells_x(); ++i)
      flux.at(i, j) = spec.impl->grad_xi(g.cell_center(i, j), du.at(i, j), g.n);
  const double vol = g.cell_volume();

  std::vector<double> out;
  out.reserve(etas.size());
  for (const ScalarField& eta : etas) {
    for (int j = 0; j < g.nodes_y(); ++j)
      for (int i = 0; i < g.nodes_x(); ++i)
        if (g.is_boundary_node(i, j) && eta.at(i, j) != 0.0)
          throw std::invalid_argument("linearized_residual: eta has a boundary trace");
    const VectorField deta = gradient(eta);
    double lhs = 0.0, rhs = 0.0, deta_l1 = 0.0, eta_l1 = 0.0;
    for (std::size_t c = 0; c < flux.v.size(); ++c) {
      lhs += dot(flux.v[c], deta.v[c], g.n);
      deta_l1 += norm(deta.v[c], g.n);
    }
    for (std::size_t k = 0; k < eta.v.size(); ++k) {
      rhs += g_field.v[k] * eta.v[k];
      eta_l1 += std::abs(eta.v[k]);
    }
    const double norm_w11 = (deta_l1 + eta_l1) * vol;
    out.push_back(std::abs(lhs + rhs) * vol / std::max(norm_w11, 1e-300));
  }
  return out;
}

/// Cellwise V_p of the solution gradient: (1+|Du|^2)^{(p-2)/2} Du.
inline VectorField compute_vp(const SolveResult& result, double p) {
  const Grid& g = result.u.grid;
  const VectorField du = gradient(result.u);
  VectorField vp(g);
  for (std::size_t c = 0; c < du.v.size(); ++c) {
    const double t = 1.0 + norm_sq(du.v[c], g.n);
    vp.v[c] = scale(std::pow(t, 0.5 * (p - 2.0)), du.v[c], g.n);
  }
  return vp;
}

/// L^2 norm of the discrete gradient of a cell field over an inner ball,
/// via differences between adjacent cell centers.
inline double cell_field_grad_l2(const VectorField& f, const Ball& ball) {
  const Grid& g = f.grid;
  const double inv_h = 1.0 / g.h;
  double sum = 0.0;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i + 1 < g.cells_x(); ++i) {
      const Vec a = g.cell_center(i, j), b = g.cell_center(i + 1, j);
      const Vec mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      if (!ball.contains(mid, g.n)) continue;
      for (int comp = 0; comp < g.n; ++comp) {
        const double d = (f.at(i + 1, j)[comp] - f.at(i, j)[comp]) * inv_h;
        sum += d * d;
      }
    }
  }
  if (g.n == 2) {
    for (int j = 0; j + 1 < g.cells_y(); ++j) {
      for (int i = 0; i < g.cells_x(); ++i) {
        const Vec a = g.cell_center(i, j), b = g.cell_center(i, j + 1);
        const Vec mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        if (!ball.contains(mid, g.n)) continue;
        for (int comp = 0; comp < g.n; ++comp) {
          const double d = (f.at(i, j + 1)[comp] - f.at(i, j)[comp]) * inv_h;
          sum += d * d;
        }
      }
    }
  }
  return std::sqrt(sum * g.cell_volume());
}

/// Active nodes at graph distance >= `buffer` nodes from any inactive node;
/// the free-boundary layer where the indicator is O(h)-ambiguous is excluded.
inline std::vector<bool> active_interior(const Grid& g, const std::vector<bool>& mask,
                                         int buffer) {
  std::vector<bool> cur = mask;
  for (int pass = 0; pass < buffer; ++pass) {
    std::vector<bool> next = cur;
    for (int j = 0; j < g.nodes_y(); ++j) {
      for (int i = 0; i < g.nodes_x(); ++i) {
        const std::size_t k = static_cast<std::size_t>(g.node_index(i, j));
        if (!cur[k]) continue;
        bool keep = true;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < (g.n == 2 ? 4 : 2); ++d) {
          const int ii = i + di[d], jj = j + dj[d];
          if (ii < 0 || ii >= g.nodes_x() || jj < 0 || jj >= g.nodes_y()) {
            keep = false;
            break;
          }
          if (!cur[static_cast<std::size_t>(g.node_index(ii, jj))]) {
            keep = false;
            break;
          }
        }
        next[k] = keep;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

/// Radial test bump: cutoff_eta squared, C^1-ish, vanishing outside the
/// outer ball.
inline ScalarField radial_bump(const Grid& g, const Vec& center, double rho, double R) {
  ScalarField eta = cutoff_eta(Ball{center, rho}, Ball{center, R}, g);
  for (double& v : eta.v) v *= v;
  return eta;
}

/// Tensor-product sine bump sin(kx pi (x-lo)/span) [* sin(ky ...)], zero on
/// the boundary by construction.
inline ScalarField sine_bump(const Grid& g, int kx, int ky = 1) {
  ScalarField eta(g);
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      const Vec x = g.node_pos(i, j);
      double v = std::sin(kx * std::numbers::pi * (x[0] - g.lo[0]) / (g.hi[0] - g.lo[0]));
      if (g.n == 2)
        v *= std::sin(ky * std::numbers::pi * (x[1] - g.lo[1]) / (g.hi[1] - g.lo[1]));
      eta.at(i, j) = v;
    }
  }
  // kill rounding residue on the boundary so the zero-trace precondition holds exactly
  for (int j = 0; j < g.nodes_y(); ++j)
    for (int i = 0; i < g.nodes_x(); ++i)
      if (g.is_boundary_node(i, j)) eta.at(i, j) = 0.0;
  return eta;
}

/// Assemble the full report around a stored solve.
inline LinearizationReport make_linearization_report(
    const IntegrandSpec& spec, const SolveResult& result, const ScalarField& psi,
    const Ball& region, const std::vector<ScalarField>& etas,
    const std::vector<std::string>& eta_names) {
  const Grid& g = psi.grid;
  LinearizationReport rep;
  const ScalarField gf = compute_g(spec, result, psi);
  rep.g_inf_bound = g_bound(spec, psi, region);

  const std::vector<bool> inner = active_interior(g, result.active_mask, 2);
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      const std::size_t k = static_cast<std::size_t>(g.node_index(i, j));
      if (result.active_mask[k]) ++rep.active_count;
      if (result.active_mask[k] && !inner[k]) ++rep.buffer_excluded;
      if (inner[k] && region.contains(g.node_pos(i, j), g.n))
        rep.g_inf_measured = std::max(rep.g_inf_measured, std::abs(gf.v[k]));
    }
  }

  const std::vector<double> residuals = linearized_residual(spec, result, gf, etas);
  for (std::size_t i = 0; i < residuals.size(); ++i)
    rep.eq_residuals.emplace_back(i < eta_names.size() ? eta_names[i] : "eta" + std::to_string(i),
                                  residuals[i]);
  const VectorField vp = compute_vp(result, spec.p);
  rep.vp_grad_l2 = cell_field_grad_l2(vp, region);
  return rep;
}

}  // namespace obslab
