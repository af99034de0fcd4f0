#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "capvol/cap_geometry.hpp"
#include "capvol/quadrature.hpp"
#include "capvol/rng.hpp"
#include "capvol/spectral.hpp"

// Linearized analysis on the normal cap: spectral collocation grids (an
// arc of the circle for planar bodies, a polar cap of the sphere in three
// dimensions), the spherical and centroaffine Laplacians, the sharp
// Poincare-type bound for Neumann test functions, and the exact second
// variation of the volume product along support perturbations of the cap,
// cross-checkable against direct finite differencing of the product.

namespace capvol {

// ---------------------------------------------------------------------------
// Planar grid: Gauss-Legendre nodes on the normal arc [pi/2 - theta,
// pi/2 + theta].  Nodes are interior; boundary data is reached through
// interpolation and derivative rows at the arc endpoints.

struct ArcGrid {
  ContactAngle angle;
  int res = 0;
  double lo = 0.0, hi = 0.0;
  std::vector<double> phi, w;     // nodes and integration weights
  std::vector<double> bary;       // barycentric weights of the nodes
  DenseMat d1, d2;                // collocation derivatives in phi
  std::vector<double> row_vlo, row_vhi;  // value rows at the endpoints
  std::vector<double> row_dlo, row_dhi;  // derivative rows at the endpoints
  std::vector<double> ell;        // cap support 1 - cos(theta) sin(phi)

  explicit ArcGrid(const ContactAngle& a, int resolution) : angle(a), res(resolution) {
    if (resolution < 8)
      throw std::invalid_argument("ArcGrid: resolution must be >= 8, got " +
                                  std::to_string(resolution));
    lo = 0.5 * std::numbers::pi - a.theta();
    hi = 0.5 * std::numbers::pi + a.theta();
    Gauss1D g = gauss_on(lo, hi, resolution);
    phi = g.x;
    w = g.w;
    bary = barycentric_weights(phi);
    d1 = differentiation_matrix(phi, bary);
    d2 = second_derivative_matrix(phi, bary, d1);
    row_vlo = interpolation_row(phi, bary, lo);
    row_vhi = interpolation_row(phi, bary, hi);
    row_dlo = derivative_row(phi, bary, lo);
    row_dhi = derivative_row(phi, bary, hi);
    ell.resize(phi.size());
    for (size_t i = 0; i < phi.size(); ++i) ell[i] = 1.0 - a.cos() * std::sin(phi[i]);
  }

  int size() const { return res; }
};

inline double integrate_sigma(const ArcGrid& g, const std::vector<double>& f) {
  double acc = 0.0;
  for (size_t i = 0; i < f.size(); ++i) acc += g.w[i] * f[i];
  return acc;
}

/// Laplace-Beltrami operator of the circle: the second arc derivative.
inline std::vector<double> sphere_laplacian(const ArcGrid& g, const std::vector<double>& f) {
  return matvec(g.d2, f);
}

/// Centroaffine Laplacian of the cap acting on a test function f:
///   L f = lap(f * ell) + (n - 1) f (ell - 1),   n = 2,
/// self-adjoint in the cone measure and annihilating constants.
inline std::vector<double> centroaffine_laplacian(const ArcGrid& g,
                                                  const std::vector<double>& f) {
  std::vector<double> fl(f.size());
  for (size_t i = 0; i < f.size(); ++i) fl[i] = f[i] * g.ell[i];
  std::vector<double> out = matvec(g.d2, fl);
  for (size_t i = 0; i < f.size(); ++i) out[i] += f[i] * (g.ell[i] - 1.0);
  return out;
}

/// Largest boundary-normal derivative of f relative to its size (zero for
/// admissible Neumann data).
inline double neumann_defect(const ArcGrid& g, const std::vector<double>& f) {
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  double dlo = -dot_row(g.row_dlo, f);  // outward at the lower endpoint
  double dhi = dot_row(g.row_dhi, f);
  return std::max(std::fabs(dlo), std::fabs(dhi)) / scale;
}

/// Largest boundary defect of the Robin condition satisfied by admissible
/// support perturbations: outward derivative minus cot(theta) times the
/// boundary value.
inline double robin_defect(const ArcGrid& g, const std::vector<double>& psi) {
  double scale = 1.0;
  for (double v : psi) scale = std::max(scale, std::fabs(v));
  double cot = g.angle.cos() / g.angle.sin();
  double rlo = -dot_row(g.row_dlo, psi) - cot * dot_row(g.row_vlo, psi);
  double rhi = dot_row(g.row_dhi, psi) - cot * dot_row(g.row_vhi, psi);
  return std::max(std::fabs(rlo), std::fabs(rhi)) / scale;
}

namespace detail {

template <class Grid>
double poincare_margin_impl(const Grid& grid, const std::vector<double>& f, int n,
                            const std::vector<double>& ell,
                            const std::vector<double>& sigma_weights,
                            const std::vector<double>& lap_term) {
  double volume = 0.0, mean = 0.0, lhs = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    double wv = sigma_weights[i] * ell[i] / n;  // cone measure
    volume += wv;
    mean += wv * f[i];
    lhs += wv * f[i] * (lap_term[i] + 2.0 * n * f[i]);
  }
  (void)grid;
  return 2.0 * n * mean * mean / volume - lhs;
}

}  // namespace detail

/// Sharp Poincare-type margin for a Neumann test function f on the arc:
///   2n (integral of f dV)^2 / vol  -  integral of f (L f + 2n f) dV,
/// where dV is the cone measure ell dsigma / n and L the centroaffine
/// Laplacian.  The margin is nonnegative on even admissible functions and
/// vanishes exactly on constants.  Data failing the Neumann condition by
/// more than 1e-4 is rejected.
inline double cap_poincare_margin(const ArcGrid& g, const std::vector<double>& f) {
  double defect = neumann_defect(g, f);
  if (defect > 1e-4)
    throw std::invalid_argument("cap_poincare_margin: boundary-normal derivative defect " +
                                std::to_string(defect) + " exceeds 1e-4; the bound only "
                                "applies to Neumann test functions");
  return detail::poincare_margin_impl(g, f, 2, g.ell, g.w, centroaffine_laplacian(g, f));
}

/// Neumann cosine mode cos(k pi u), u the normalized arc coordinate in
/// [0, 1].  Even k respects the body's mirror symmetry across the axis.
inline std::vector<double> neumann_cosine_mode(const ArcGrid& g, int k) {
  std::vector<double> f(g.phi.size());
  for (size_t i = 0; i < g.phi.size(); ++i) {
    double u = (g.phi[i] - g.lo) / (g.hi - g.lo);
    f[i] = std::cos(k * std::numbers::pi * u);
  }
  return f;
}

/// Random mirror-symmetric Neumann function: a seeded combination of the
/// even cosine modes with mildly decaying coefficients.
inline std::vector<double> random_neumann_function(const ArcGrid& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> f(g.phi.size(), 0.0);
  for (int k : {0, 2, 4, 6, 8}) {
    double c = rng.uniform(-1.0, 1.0) / (1.0 + 0.5 * k);
    std::vector<double> mode = neumann_cosine_mode(g, k);
    for (size_t i = 0; i < f.size(); ++i) f[i] += c * mode[i];
  }
  return f;
}

// ---------------------------------------------------------------------------
// Second variation of the volume product along support perturbations
// h_t = ell + t psi of the planar cap.

/// Closed second derivative at t = 0 of the volume product along
/// h_t = ell + t psi, for admissible psi (Robin boundary data):
///   n P''(0) = [integral of psi (lap psi + (n-1) psi)] * [integral of ell]
///              - 2n [integral of psi]^2
///              + (n+1) [integral of ell] * [integral of psi^2 / ell],
/// all in dsigma with n = 2.  Vanishes identically for psi = ell (pure
/// scaling, under which the product is invariant).
inline double product_second_variation(const ArcGrid& g, const std::vector<double>& psi) {
  std::vector<double> lap = sphere_laplacian(g, psi);
  double a = 0.0, s = 0.0, q = 0.0, l = 0.0;
  for (size_t i = 0; i < psi.size(); ++i) {
    a += g.w[i] * psi[i] * (lap[i] + psi[i]);
    s += g.w[i] * psi[i];
    q += g.w[i] * psi[i] * psi[i] / g.ell[i];
    l += g.w[i] * g.ell[i];
  }
  return (a * l - 4.0 * s * s + 3.0 * l * q) / 2.0;
}

namespace detail {

/// The difference-quotient callers below divide evaluation noise by the
/// squared step, so the product along a perturbation path is evaluated in
/// quadruple precision: the path h_t = ell + t psi is then an exact
/// function of the stored double inputs, and in directions that merely
/// rescale the body the five-point stencils cancel to well below the
/// reporting tolerance.
using Quad = __float128;

/// Volume product of the planar body with support h on the arc: the area
/// swept by the support parametrization (the axis chords close the
/// boundary at zero cost for admissible h) times the polar-dual volume.
inline Quad arc_volume_product_quad(const ArcGrid& g, const std::vector<Quad>& h) {
  const size_t m = h.size();
  Quad area = 0, polar = 0;
  for (size_t i = 0; i < m; ++i) {
    if (!(h[i] > 0))
      throw std::runtime_error("arc_volume_product: support must stay positive");
    Quad hpp = 0;
    const double* row = &g.d2.a[i * m];
    for (size_t j = 0; j < m; ++j) hpp += Quad(row[j]) * h[j];
    if (!(h[i] + hpp > 0))
      throw std::runtime_error("arc_volume_product: perturbed body lost convexity "
                               "(h + h'' <= 0); reduce the step");
    Quad li = g.ell[i];
    area += Quad(g.w[i]) * h[i] * (h[i] + hpp);
    polar += Quad(g.w[i]) * li * li * li / (h[i] * h[i]);
  }
  return Quad(0.25) * area * polar;
}

inline double arc_volume_product(const ArcGrid& g, const std::vector<double>& h) {
  std::vector<Quad> hq(h.begin(), h.end());
  return static_cast<double>(arc_volume_product_quad(g, hq));
}

/// Evaluate the product along h_t = ell + t psi without ever rounding the
/// path back to double.
inline Quad arc_product_along(const ArcGrid& g, const std::vector<double>& psi, double t) {
  std::vector<Quad> h(psi.size());
  for (size_t i = 0; i < psi.size(); ++i) h[i] = Quad(g.ell[i]) + Quad(t) * Quad(psi[i]);
  return arc_volume_product_quad(g, h);
}

}  // namespace detail

/// First derivative of the volume product along h_t = ell + t psi by a
/// five-point stencil (the cap is a critical point, so this should vanish
/// for admissible psi).
inline double product_first_variation_fd(const ArcGrid& g, const std::vector<double>& psi,
                                         double t = 1e-3) {
  using detail::Quad;
  auto p = [&](double s) { return detail::arc_product_along(g, psi, s); };
  return static_cast<double>((p(-2 * t) - Quad(8) * p(-t) + Quad(8) * p(t) - p(2 * t)) /
                             (Quad(12) * Quad(t)));
}

/// Second derivative of the volume product along h_t = ell + t psi by a
/// five-point stencil, for cross-checking the closed formula.
inline double product_second_variation_fd(const ArcGrid& g, const std::vector<double>& psi,
                                          double t = 1e-3) {
  using detail::Quad;
  auto p = [&](double s) { return detail::arc_product_along(g, psi, s); };
  return static_cast<double>(
      (-p(2 * t) + Quad(16) * p(t) - Quad(30) * p(0.0) + Quad(16) * p(-t) - p(-2 * t)) /
      (Quad(12) * Quad(t) * Quad(t)));
}

/// Admissible (Robin) perturbation from a Neumann test function: psi = f
/// ell turns the Neumann condition on f into the Robin condition on psi.
inline std::vector<double> admissible_from_neumann(const ArcGrid& g,
                                                   const std::vector<double>& f) {
  std::vector<double> psi(f.size());
  for (size_t i = 0; i < f.size(); ++i) psi[i] = f[i] * g.ell[i];
  return psi;
}

// ---------------------------------------------------------------------------
// Spherical cap grid (three dimensions): Gauss-Legendre nodes in the polar
// angle on [0, theta] tensored with a uniform periodic azimuth.

struct CapGrid3 {
  ContactAngle angle;
  int res = 0;     // polar node count
  int nbeta = 0;   // azimuth count (even)
  std::vector<double> alpha, walpha;  // polar nodes / weights on [0, theta]
  std::vector<double> baryA;
  DenseMat d1a, d2a;
  std::vector<double> row_vtheta, row_dtheta;  // boundary rows at alpha = theta
  DenseMat d2b;                                // periodic azimuthal second derivative
  double wbeta = 0.0;
  std::vector<double> beta;
  std::vector<double> ell_alpha;  // 1 - cos(theta) cos(alpha)

  explicit CapGrid3(const ContactAngle& a, int resolution) : angle(a), res(resolution) {
    if (resolution < 8)
      throw std::invalid_argument("CapGrid3: resolution must be >= 8, got " +
                                  std::to_string(resolution));
    nbeta = detail::azimuth_count(resolution);
    Gauss1D g = gauss_on(0.0, a.theta(), resolution);
    alpha = g.x;
    walpha = g.w;
    baryA = barycentric_weights(alpha);
    d1a = differentiation_matrix(alpha, baryA);
    d2a = second_derivative_matrix(alpha, baryA, d1a);
    row_vtheta = interpolation_row(alpha, baryA, a.theta());
    row_dtheta = derivative_row(alpha, baryA, a.theta());
    d2b = periodic_second_derivative(nbeta);
    wbeta = 2.0 * std::numbers::pi / nbeta;
    beta.resize(nbeta);
    for (int j = 0; j < nbeta; ++j) beta[j] = (j + 0.5) * wbeta;
    ell_alpha.resize(alpha.size());
    for (size_t i = 0; i < alpha.size(); ++i)
      ell_alpha[i] = 1.0 - a.cos() * std::cos(alpha[i]);
  }

  int size() const { return res * nbeta; }
  int idx(int i, int j) const { return i * nbeta + j; }
};

inline double integrate_sigma(const CapGrid3& g, const std::vector<double>& f) {
  double acc = 0.0;
  for (int i = 0; i < g.res; ++i) {
    double wa = g.walpha[i] * std::sin(g.alpha[i]) * g.wbeta;
    for (int j = 0; j < g.nbeta; ++j) acc += wa * f[g.idx(i, j)];
  }
  return acc;
}

/// Laplace-Beltrami operator of the round sphere in polar coordinates:
///   lap f = (sin a)^{-1} d_a (sin a d_a f) + (sin a)^{-2} d_bb f.
/// The polar nodes are interior, so no pole division occurs.
inline std::vector<double> sphere_laplacian(const CapGrid3& g, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != g.size())
    throw std::invalid_argument("sphere_laplacian: size mismatch");
  std::vector<double> out(f.size(), 0.0);
  std::vector<double> col(g.res), fa(g.res), ta(g.res);
  for (int j = 0; j < g.nbeta; ++j) {
    for (int i = 0; i < g.res; ++i) col[i] = f[g.idx(i, j)];
    fa = matvec(g.d1a, col);
    for (int i = 0; i < g.res; ++i) fa[i] *= std::sin(g.alpha[i]);
    ta = matvec(g.d1a, fa);
    for (int i = 0; i < g.res; ++i) out[g.idx(i, j)] = ta[i] / std::sin(g.alpha[i]);
  }
  std::vector<double> row(g.nbeta), rb(g.nbeta);
  for (int i = 0; i < g.res; ++i) {
    for (int j = 0; j < g.nbeta; ++j) row[j] = f[g.idx(i, j)];
    rb = matvec(g.d2b, row);
    double s2 = std::sin(g.alpha[i]) * std::sin(g.alpha[i]);
    for (int j = 0; j < g.nbeta; ++j) out[g.idx(i, j)] += rb[j] / s2;
  }
  return out;
}

/// Centroaffine Laplacian on the spherical cap (n = 3):
///   L f = lap(f * ell) + 2 f (ell - 1).
inline std::vector<double> centroaffine_laplacian(const CapGrid3& g,
                                                  const std::vector<double>& f) {
  std::vector<double> fl(f.size());
  for (int i = 0; i < g.res; ++i)
    for (int j = 0; j < g.nbeta; ++j) fl[g.idx(i, j)] = f[g.idx(i, j)] * g.ell_alpha[i];
  std::vector<double> out = sphere_laplacian(g, fl);
  for (int i = 0; i < g.res; ++i)
    for (int j = 0; j < g.nbeta; ++j)
      out[g.idx(i, j)] += 2.0 * f[g.idx(i, j)] * (g.ell_alpha[i] - 1.0);
  return out;
}

inline double neumann_defect(const CapGrid3& g, const std::vector<double>& f) {
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  double worst = 0.0;
  std::vector<double> col(g.res);
  for (int j = 0; j < g.nbeta; ++j) {
    for (int i = 0; i < g.res; ++i) col[i] = f[g.idx(i, j)];
    worst = std::max(worst, std::fabs(dot_row(g.row_dtheta, col)));
  }
  return worst / scale;
}

/// Sharp Poincare-type margin on the spherical cap; see the planar
/// overload for the statement (here n = 3).
inline double cap_poincare_margin(const CapGrid3& g, const std::vector<double>& f) {
  double defect = neumann_defect(g, f);
  if (defect > 1e-4)
    throw std::invalid_argument("cap_poincare_margin: boundary-normal derivative defect " +
                                std::to_string(defect) + " exceeds 1e-4; the bound only "
                                "applies to Neumann test functions");
  std::vector<double> ell(g.size()), wsig(g.size());
  for (int i = 0; i < g.res; ++i) {
    double wa = g.walpha[i] * std::sin(g.alpha[i]) * g.wbeta;
    for (int j = 0; j < g.nbeta; ++j) {
      ell[g.idx(i, j)] = g.ell_alpha[i];
      wsig[g.idx(i, j)] = wa;
    }
  }
  return detail::poincare_margin_impl(g, f, 3, ell, wsig, centroaffine_laplacian(g, f));
}

/// Axisymmetric Neumann mode cos(k pi alpha / theta).
inline std::vector<double> axisymmetric_neumann_mode(const CapGrid3& g, int k) {
  std::vector<double> f(g.size());
  for (int i = 0; i < g.res; ++i) {
    double v = std::cos(k * std::numbers::pi * g.alpha[i] / g.angle.theta());
    for (int j = 0; j < g.nbeta; ++j) f[g.idx(i, j)] = v;
  }
  return f;
}

/// Azimuthal Neumann mode sin^m(alpha) (1 + cos(pi alpha / theta)) cos(m beta)
/// for even m: the polar profile is flat at the rim and vanishes to order
/// m at the pole, as a smooth mode of azimuthal order m must.
inline std::vector<double> azimuthal_neumann_mode(const CapGrid3& g, int m) {
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("azimuthal_neumann_mode: order must be even and >= 2");
  std::vector<double> f(g.size());
  for (int i = 0; i < g.res; ++i) {
    double prof = std::pow(std::sin(g.alpha[i]), m) *
                  (1.0 + std::cos(std::numbers::pi * g.alpha[i] / g.angle.theta()));
    for (int j = 0; j < g.nbeta; ++j) f[g.idx(i, j)] = prof * std::cos(m * g.beta[j]);
  }
  return f;
}

/// Random mirror-symmetric Neumann function on the spherical cap.
inline std::vector<double> random_neumann_function(const CapGrid3& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> f(g.size(), 0.0);
  auto add = [&](const std::vector<double>& mode, double c) {
    for (size_t i = 0; i < f.size(); ++i) f[i] += c * mode[i];
  };
  add(axisymmetric_neumann_mode(g, 0), rng.uniform(-1.0, 1.0));
  add(axisymmetric_neumann_mode(g, 1), rng.uniform(-1.0, 1.0));
  add(axisymmetric_neumann_mode(g, 2), 0.5 * rng.uniform(-1.0, 1.0));
  add(azimuthal_neumann_mode(g, 2), rng.uniform(-1.0, 1.0));
  add(azimuthal_neumann_mode(g, 4), 0.5 * rng.uniform(-1.0, 1.0));
  return f;
}

}  // namespace capvol
