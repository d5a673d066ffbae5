#pragma once

// Small dimension-generic linear algebra and numeric helpers shared by all
// modules. Dimensions are 1 or 2; vectors are fixed-capacity with unused
// entries kept at zero.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace obslab {

inline constexpr int kMaxDim = 2;

using Vec = std::array<double, kMaxDim>;

struct Mat {
  std::array<std::array<double, kMaxDim>, kMaxDim> m{};

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }
};

inline Vec zero_vec() { return Vec{0.0, 0.0}; }

inline double dot(const Vec& a, const Vec& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& a, int n) { return dot(a, a, n); }

inline double norm(const Vec& a, int n) { return std::sqrt(norm_sq(a, n)); }

inline Vec axpy(double alpha, const Vec& x, const Vec& y, int n) {
  Vec r = zero_vec();
  for (int i = 0; i < n; ++i) r[i] = alpha * x[i] + y[i];
  return r;
}

inline Vec scale(double alpha, const Vec& x, int n) {
  Vec r = zero_vec();
  for (int i = 0; i < n; ++i) r[i] = alpha * x[i];
  return r;
}

inline double frobenius(const Mat& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double max_abs_entry(const Mat& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s = std::max(s, std::abs(a(i, j)));
  return s;
}

inline double quadratic_form(const Mat& a, const Vec& mu, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += a(i, j) * mu[i] * mu[j];
  return s;
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// log of sum(exp(t_i)) with max-shift, safe for widely spread exponents.
inline double log_sum_exp(const std::vector<double>& t) {
  if (t.empty()) return -std::numeric_limits<double>::infinity();
  double m = t[0];
  for (double x : t) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : t) s += std::exp(x - m);
  return m + std::log(s);
}

/// Halton low-discrepancy sequence, one value per (index, prime base).
inline double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  std::uint64_t i = index;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline constexpr std::array<unsigned, 8> kHaltonPrimes{2, 3, 5, 7, 11, 13, 17, 19};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace obslab
