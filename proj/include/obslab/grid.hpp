#pragma once

// Uniform rectangular grids in dimension 1 or 2, with node-centered scalar
// fields, cell-centered vector fields, the discrete gradient/divergence
// adjoint pair, midpoint quadrature, ball subregions, and the piecewise
// linear radial cutoffs used by the iteration estimates.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "obslab/core.hpp"
#include "obslab/integrand.hpp"

namespace obslab {

struct Grid {
  int n = 2;
  std::array<double, kMaxDim> lo{0.0, 0.0};
  std::array<double, kMaxDim> hi{1.0, 1.0};
  double h = 0.0;
  std::array<int, kMaxDim> counts{0, 0};  // nodes per axis; unused axis holds 1

  static Grid make(int n, std::array<double, kMaxDim> lo, std::array<double, kMaxDim> hi,
                   double h) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("Grid: n must be 1 or 2");
    if (h <= 0.0) throw std::invalid_argument("Grid: h must be positive");
    Grid g;
    g.n = n;
    g.lo = lo;
    g.h = h;
    for (int a = 0; a < kMaxDim; ++a) {
      if (a >= n) {
        g.counts[a] = 1;
        g.hi[a] = lo[a];
        continue;
      }
      const double span = hi[a] - lo[a];
      const int cells = static_cast<int>(std::llround(span / h));
      if (cells < 2 || std::abs(cells * h - span) > 1e-9 * std::max(1.0, std::abs(span)))
        throw std::invalid_argument("Grid: (hi-lo) must be an exact multiple (>= 2) of h");
      g.counts[a] = cells + 1;
      g.hi[a] = lo[a] + cells * h;  // stored span is exactly (counts-1)*h
    }
    return g;
  }

  int nodes_x() const { return counts[0]; }
  int nodes_y() const { return n == 2 ? counts[1] : 1; }
  int cells_x() const { return counts[0] - 1; }
  int cells_y() const { return n == 2 ? counts[1] - 1 : 1; }
  long num_nodes() const { return static_cast<long>(nodes_x()) * nodes_y(); }
  long num_cells() const { return static_cast<long>(cells_x()) * cells_y(); }

  long node_index(int i, int j) const { return static_cast<long>(j) * nodes_x() + i; }
  long cell_index(int i, int j) const { return static_cast<long>(j) * cells_x() + i; }

  Vec node_pos(int i, int j) const {
    return Vec{lo[0] + i * h, n == 2 ? lo[1] + j * h : 0.0};
  }
  Vec cell_center(int i, int j) const {
    return Vec{lo[0] + (i + 0.5) * h, n == 2 ? lo[1] + (j + 0.5) * h : 0.0};
  }
  bool is_boundary_node(int i, int j) const {
    if (i == 0 || i == nodes_x() - 1) return true;
    return n == 2 && (j == 0 || j == nodes_y() - 1);
  }
  double cell_volume() const { return n == 2 ? h * h : h; }

  bool operator==(const Grid& o) const {
    return n == o.n && lo == o.lo && hi == o.hi && counts == o.counts &&
           h == o.h;
  }
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;  // one value per node, row-major (x fastest)

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<std::size_t>(g.num_nodes()), fill) {}

  double& at(int i, int j) { return v[static_cast<std::size_t>(grid.node_index(i, j))]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(grid.node_index(i, j))]; }
};

struct VectorField {
  Grid grid;
  std::vector<Vec> v;  // one n-vector per cell

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g), v(static_cast<std::size_t>(g.num_cells()), zero_vec()) {}

  Vec& at(int i, int j) { return v[static_cast<std::size_t>(grid.cell_index(i, j))]; }
  const Vec& at(int i, int j) const {
    return v[static_cast<std::size_t>(grid.cell_index(i, j))];
  }
};

struct Ball {
  Vec center = zero_vec();
  double radius = 0.0;

  bool contains(const Vec& x, int n) const {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
    return d2 <= radius * radius;
  }
  bool inside_domain(const Grid& g) const {
    for (int i = 0; i < g.n; ++i)
      if (center[i] - radius < g.lo[i] || center[i] + radius > g.hi[i]) return false;
    return true;
  }
};

/// Evaluate an expression at every node.
inline ScalarField sample_nodes(const Grid& g, const ExprPtr& e) {
  ScalarField f(g);
  for (int j = 0; j < g.nodes_y(); ++j)
    for (int i = 0; i < g.nodes_x(); ++i) f.at(i, j) = e->eval(g.node_pos(i, j));
  return f;
}

/// Cell-centered bilinear gradient; exact on affine nodal fields.
inline VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid;
  VectorField out(g);
  const double inv_h = 1.0 / g.h;
  if (g.n == 1) {
    for (int i = 0; i < g.cells_x(); ++i)
      out.at(i, 0)[0] = (u.at(i + 1, 0) - u.at(i, 0)) * inv_h;
    return out;
  }
  const double c = 0.5 * inv_h;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      const double u00 = u.at(i, j), u10 = u.at(i + 1, j);
      const double u01 = u.at(i, j + 1), u11 = u.at(i + 1, j + 1);
      out.at(i, j)[0] = c * (u10 - u00 + u11 - u01);
      out.at(i, j)[1] = c * (u01 - u00 + u11 - u10);
    }
  }
  return out;
}

/// Node-centered negative adjoint of `gradient` under the cell/node midpoint
/// pairings: <gradient(u), F>_cells = -<u, divergence(F)>_nodes exactly.
inline ScalarField divergence(const VectorField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_h = 1.0 / g.h;
  if (g.n == 1) {
    for (int i = 0; i < g.cells_x(); ++i) {
      const double fx = f.at(i, 0)[0] * inv_h;
      out.at(i, 0) -= fx;
      out.at(i + 1, 0) += fx;
    }
    for (double& x : out.v) x = -x;
    return out;
  }
  const double c = 0.5 * inv_h;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      const double fx = f.at(i, j)[0] * c;
      const double fy = f.at(i, j)[1] * c;
      out.at(i, j) += -fx - fy;
      out.at(i + 1, j) += fx - fy;
      out.at(i, j + 1) += -fx + fy;
      out.at(i + 1, j + 1) += fx + fy;
    }
  }
  for (double& x : out.v) x = -x;
  return out;
}

/// Midpoint quadrature of f(cell center, Du) over the whole domain.
inline double energy(const IntegrandSpec& spec, const ScalarField& u) {
  const Grid& g = u.grid;
  if (spec.n != g.n) throw std::invalid_argument("energy: dimension mismatch");
  const VectorField du = gradient(u);
  const double vol = g.cell_volume();
  double sum = 0.0;
  for (int j = 0; j < g.cells_y(); ++j)
    for (int i = 0; i < g.cells_x(); ++i)
      sum += spec.impl->f(g.cell_center(i, j), du.at(i, j), g.n);
  sum *= vol;
  if (!std::isfinite(sum)) throw std::runtime_error("energy: non-finite quadrature sum");
  return sum;
}

/// Nodal field G with G . v equal to the directional derivative of the
/// discrete energy at u in direction v; exact by the chain rule through the
/// cell gradients. Boundary nodes carry their formal partials too.
inline ScalarField energy_gradient(const IntegrandSpec& spec, const ScalarField& u) {
  const Grid& g = u.grid;
  if (spec.n != g.n) throw std::invalid_argument("energy_gradient: dimension mismatch");
  const VectorField du = gradient(u);
  VectorField flux(g);
  for (int j = 0; j < g.cells_y(); ++j)
    for (int i = 0; i < g.cells_x(); ++i)
      flux.at(i, j) = spec.impl->grad_xi(g.cell_center(i, j), du.at(i, j), g.n);
  ScalarField out = divergence(flux);
  const double vol = g.cell_volume();
  for (double& x : out.v) x *= -vol;  // dE/du_k = -div(D_xi f) * h^n
  return out;
}

/// Radial piecewise-linear cutoff: 1 on the inner ball, 0 outside the outer
/// ball, linear in |x - x0| between.
inline ScalarField cutoff_eta(const Ball& inner, const Ball& outer, const Grid& g) {
  if (!(inner.radius < outer.radius))
    throw std::invalid_argument("cutoff_eta: inner radius must be < outer radius");
  for (int i = 0; i < g.n; ++i)
    if (inner.center[i] != outer.center[i])
      throw std::invalid_argument("cutoff_eta: balls must share a center");
  ScalarField eta(g);
  const double rho = inner.radius, R = outer.radius;
  for (int j = 0; j < g.nodes_y(); ++j) {
    for (int i = 0; i < g.nodes_x(); ++i) {
      const Vec x = g.node_pos(i, j);
      double d = 0.0;
      for (int a = 0; a < g.n; ++a) d += (x[a] - inner.center[a]) * (x[a] - inner.center[a]);
      d = std::sqrt(d);
      eta.at(i, j) = d <= rho ? 1.0 : d >= R ? 0.0 : (R - d) / (R - rho);
    }
  }
  return eta;
}

/// Midpoint quadrature over cells whose centers lie in the ball. A per-cell
/// callback variant is provided for gradient-dependent integrands.
inline double integrate_ball_cells(const Grid& g, const Ball& ball,
                                   const std::function<double(int, int)>& cell_value,
                                   bool* empty_flag = nullptr) {
  double sum = 0.0;
  long hits = 0;
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      if (!ball.contains(g.cell_center(i, j), g.n)) continue;
      sum += cell_value(i, j);
      ++hits;
    }
  }
  if (empty_flag) *empty_flag = hits == 0;
  return sum * g.cell_volume();
}

inline double integrate_ball(const ScalarField& f, const Ball& ball,
                             bool* empty_flag = nullptr) {
  const Grid& g = f.grid;
  return integrate_ball_cells(
      g, ball,
      [&](int i, int j) {
        if (g.n == 1) return 0.5 * (f.at(i, 0) + f.at(i + 1, 0));
        return 0.25 * (f.at(i, j) + f.at(i + 1, j) + f.at(i, j + 1) + f.at(i + 1, j + 1));
      },
      empty_flag);
}

/// Per-cell Frobenius norm of the discrete Hessian of a nodal field
/// (centered second differences, clamped to the nearest interior node at the
/// boundary, corner-averaged onto cells).
inline std::vector<double> hessian_frobenius_cells(const ScalarField& u) {
  const Grid& g = u.grid;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const int nx = g.nodes_x(), ny = g.nodes_y();
  auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : v > hi ? hi : v; };
  std::vector<double> nodal(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int ic = clampi(i, 1, nx - 2);
      const double uxx =
          (u.at(ic + 1, j) - 2.0 * u.at(ic, j) + u.at(ic - 1, j)) * inv_h2;
      double s = uxx * uxx;
      if (g.n == 2) {
        const int jc = clampi(j, 1, ny - 2);
        const double uyy =
            (u.at(i, jc + 1) - 2.0 * u.at(i, jc) + u.at(i, jc - 1)) * inv_h2;
        const double uxy = (u.at(ic + 1, jc + 1) - u.at(ic - 1, jc + 1) -
                            u.at(ic + 1, jc - 1) + u.at(ic - 1, jc - 1)) *
                           0.25 * inv_h2;
        s += uyy * uyy + 2.0 * uxy * uxy;
      }
      nodal[static_cast<std::size_t>(g.node_index(i, j))] = std::sqrt(s);
    }
  }
  std::vector<double> cells(static_cast<std::size_t>(g.num_cells()), 0.0);
  for (int j = 0; j < g.cells_y(); ++j) {
    for (int i = 0; i < g.cells_x(); ++i) {
      double s;
      if (g.n == 1)
        s = 0.5 * (nodal[g.node_index(i, 0)] + nodal[g.node_index(i + 1, 0)]);
      else
        s = 0.25 * (nodal[g.node_index(i, j)] + nodal[g.node_index(i + 1, j)] +
                    nodal[g.node_index(i, j + 1)] + nodal[g.node_index(i + 1, j + 1)]);
      cells[static_cast<std::size_t>(g.cell_index(i, j))] = s;
    }
  }
  return cells;
}

// --- field serialization -----------------------------------------------------
// Text layout: header lines (n, bounds, h, counts, kind), then one value per
// line in row-major order. Documented in the README for external tools.

inline void save_field(const ScalarField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  const Grid& g = f.grid;
  os.precision(17);
  os << "# obslab scalar field v1\n";
  os << "n " << g.n << "\n";
  os << "bounds";
  for (int a = 0; a < g.n; ++a) os << " " << g.lo[a] << " " << g.hi[a];
  os << "\nh " << g.h << "\ncounts";
  for (int a = 0; a < g.n; ++a) os << " " << g.counts[a];
  os << "\nkind node\n";
  for (double x : f.v) os << x << "\n";
}

inline ScalarField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("# obslab scalar field", 0) != 0)
    throw std::runtime_error("load_field: bad header in " + path);
  int n = 0;
  std::array<double, kMaxDim> lo{0, 0}, hi{0, 0};
  double h = 0.0;
  std::array<int, kMaxDim> counts{1, 1};
  std::string key;
  is >> key >> n;
  if (key != "n") throw std::runtime_error("load_field: expected 'n'");
  is >> key;
  if (key != "bounds") throw std::runtime_error("load_field: expected 'bounds'");
  for (int a = 0; a < n; ++a) is >> lo[a] >> hi[a];
  is >> key >> h;
  if (key != "h") throw std::runtime_error("load_field: expected 'h'");
  is >> key;
  if (key != "counts") throw std::runtime_error("load_field: expected 'counts'");
  for (int a = 0; a < n; ++a) is >> counts[a];
  is >> key >> line;  // kind
  Grid g = Grid::make(n, lo, hi, h);
  for (int a = 0; a < n; ++a)
    if (g.counts[a] != counts[a]) throw std::runtime_error("load_field: inconsistent counts");
  ScalarField f(g);
  for (double& x : f.v)
    if (!(is >> x)) throw std::runtime_error("load_field: truncated value block");
  if (!all_finite(f.v)) throw std::runtime_error("load_field: non-finite values");
  return f;
}

}  // namespace obslab
