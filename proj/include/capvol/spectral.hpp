#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

// Dense spectral differentiation machinery: barycentric weights and
// first/second differentiation matrices on arbitrary node sets,
// interpolation and derivative rows for off-grid evaluation (boundary
// conditions live at interval endpoints, which Gauss grids exclude), and
// the even-size periodic second-derivative matrix for azimuthal grids.

namespace capvol {

/// Dense row-major matrix, just large enough for spectral operators.
struct DenseMat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  DenseMat() = default;
  DenseMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

inline std::vector<double> matvec(const DenseMat& m, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != m.cols)
    throw std::invalid_argument("matvec: size mismatch");
  std::vector<double> out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols; ++j) acc += m(i, j) * f[j];
    out[i] = acc;
  }
  return out;
}

inline double dot_row(const std::vector<double>& row, const std::vector<double>& f) {
  if (row.size() != f.size()) throw std::invalid_argument("dot_row: size mismatch");
  double acc = 0.0;
  for (size_t j = 0; j < row.size(); ++j) acc += row[j] * f[j];
  return acc;
}

/// Barycentric weights w_j = 1 / prod_{k != j} (x_j - x_k), computed in
/// log scale and normalized to unit maximum so clustered nodes neither
/// overflow nor underflow.
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("barycentric_weights: need >= 2 nodes");
  std::vector<double> logw(n, 0.0);
  std::vector<int> sign(n, 1);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      double d = x[j] - x[k];
      if (d == 0.0) throw std::invalid_argument("barycentric_weights: repeated node");
      logw[j] -= std::log(std::fabs(d));
      if (d < 0.0) sign[j] = -sign[j];
    }
  double top = logw[0];
  for (double v : logw) top = std::max(top, v);
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = sign[j] * std::exp(logw[j] - top);
  return w;
}

/// First-derivative collocation matrix on the nodes:
/// D_ij = (w_j / w_i) / (x_i - x_j), D_ii = -sum of the row.
inline DenseMat differentiation_matrix(const std::vector<double>& x,
                                       const std::vector<double>& w) {
  const int n = static_cast<int>(x.size());
  DenseMat d(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

/// Second-derivative collocation matrix from the first (the standard
/// recurrence D2_ij = 2 D_ij (D_ii - 1/(x_i - x_j)) with negative-sum
/// diagonal, which is exact for the interpolating polynomial).
inline DenseMat second_derivative_matrix(const std::vector<double>& x,
                                         const std::vector<double>& w, const DenseMat& d1) {
  const int n = static_cast<int>(x.size());
  DenseMat d2(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d2(i, j) = 2.0 * d1(i, j) * (d1(i, i) - 1.0 / (x[i] - x[j]));
      diag -= d2(i, j);
    }
    d2(i, i) = diag;
  }
  return d2;
}

/// Row evaluating the interpolating polynomial at x0 (a delta row when x0
/// coincides with a node).
inline std::vector<double> interpolation_row(const std::vector<double>& x,
                                             const std::vector<double>& w, double x0) {
  const int n = static_cast<int>(x.size());
  std::vector<double> row(n, 0.0);
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = x0 - x[j];
    if (d == 0.0) {
      row.assign(n, 0.0);
      row[j] = 1.0;
      return row;
    }
    row[j] = w[j] / d;
    denom += row[j];
  }
  for (double& v : row) v /= denom;
  return row;
}

/// Row evaluating the interpolant's first derivative at an off-grid x0
/// (quotient rule on the barycentric form; x0 must not be a node).
inline std::vector<double> derivative_row(const std::vector<double>& x,
                                          const std::vector<double>& w, double x0) {
  const int n = static_cast<int>(x.size());
  double denom = 0.0, dprime = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = x0 - x[j];
    if (d == 0.0)
      throw std::invalid_argument("derivative_row: x0 coincides with a node; use the "
                                  "differentiation matrix row instead");
    denom += w[j] / d;
    dprime -= w[j] / (d * d);
  }
  std::vector<double> row(n);
  for (int j = 0; j < n; ++j) {
    double d = x0 - x[j];
    row[j] = (-w[j] / (d * d)) / denom - (w[j] / d) * dprime / (denom * denom);
  }
  return row;
}

/// Second-derivative matrix for a uniform periodic grid of even size N on
/// [0, 2 pi): the trigonometric-interpolation Toeplitz stencil
///   (D2)_ij = -1/6 - pi^2/(3 h^2)               on the diagonal,
///   (D2)_ij = -(-1)^k / (2 sin^2(k h / 2)),  k = i - j,  off it.
inline DenseMat periodic_second_derivative(int n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("periodic_second_derivative: need even size >= 4");
  double h = 2.0 * std::numbers::pi / n;
  std::vector<double> stencil(n);
  stencil[0] = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
  for (int k = 1; k < n; ++k) {
    double s = std::sin(0.5 * k * h);
    stencil[k] = -std::pow(-1.0, k) / (2.0 * s * s);
  }
  DenseMat d2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d2(i, j) = stencil[((i - j) % n + n) % n];
  return d2;
}

}  // namespace capvol
