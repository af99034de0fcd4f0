#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "capvol/vec.hpp"

// Central finite differences for gradients and Hessians of scalar fields
// on R^n (n <= 4), plus the little dense linear algebra those checks need:
// determinants and symmetric eigenvalues of up-to-4x4 matrices.

namespace capvol {

/// Dense square matrix of dimension 2..4, stored by rows.
struct SmallMat {
  int n = 0;
  double a[Vec::kMaxDim][Vec::kMaxDim] = {};

  explicit SmallMat(int dim = 2) : n(dim) {
    if (dim < 1 || dim > Vec::kMaxDim) throw std::invalid_argument("SmallMat: bad dimension");
  }
  double& operator()(int i, int j) { return a[i][j]; }
  double operator()(int i, int j) const { return a[i][j]; }

  static SmallMat identity(int dim) {
    SmallMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
};

/// Determinant via LU with partial pivoting.
inline double determinant(SmallMat m) {
  double det = 1.0;
  for (int k = 0; k < m.n; ++k) {
    int piv = k;
    for (int i = k + 1; i < m.n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < m.n; ++j) std::swap(m.a[k][j], m.a[piv][j]);
      det = -det;
    }
    if (m(k, k) == 0.0) return 0.0;
    det *= m(k, k);
    for (int i = k + 1; i < m.n; ++i) {
      double f = m(i, k) / m(k, k);
      for (int j = k; j < m.n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending.  Converges to machine precision in a handful of sweeps for
/// these tiny dimensions.
inline std::vector<double> symmetric_eigenvalues(SmallMat m) {
  const int n = m.n;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-300) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        double tau = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        for (int k = 0; k < n; ++k) {
          double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Central-difference gradient; step scales with the point's magnitude.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, double step = 1e-5) {
  double h = step * std::max(1.0, x.norm());
  Vec g(x.dim());
  for (int i = 0; i < x.dim(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Central-difference Hessian (symmetrized by construction).
template <class F>
SmallMat fd_hessian(F&& f, const Vec& x, double step = 1e-4) {
  double h = step * std::max(1.0, x.norm());
  SmallMat m(x.dim());
  double f0 = f(x);
  for (int i = 0; i < x.dim(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    m(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
  }
  for (int i = 0; i < x.dim(); ++i)
    for (int j = i + 1; j < x.dim(); ++j) {
      Vec xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h;
      xpp[j] += h;
      xpm[i] += h;
      xpm[j] -= h;
      xmp[i] -= h;
      xmp[j] += h;
      xmm[i] -= h;
      xmm[j] -= h;
      m(i, j) = m(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
    }
  return m;
}

}  // namespace capvol
