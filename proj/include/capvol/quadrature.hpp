#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "capvol/cap_geometry.hpp"
#include "capvol/rng.hpp"
#include "capvol/vec.hpp"

// Deterministic quadrature over the spherical cap, the full sphere, and the
// positive orthant, plus seeded importance-sampled Monte Carlo.  The
// deterministic rules are composite Gauss-Legendre panels: unlike a single
// global Gauss rule (super-algebraic convergence, no fixed empirical order),
// composite panels of a fixed node count have a well-defined convergence
// order that refinement tests can measure.

namespace capvol {

/// Nodes (ascending) and weights of a 1-D quadrature rule.
struct Gauss1D {
  std::vector<double> x, w;
};

/// k-point Gauss-Legendre rule on [-1, 1], computed by Newton iteration on
/// the Legendre three-term recurrence.
inline Gauss1D gauss_legendre(int k) {
  if (k < 1) throw std::invalid_argument("gauss_legendre: need k >= 1");
  Gauss1D g;
  g.x.assign(k, 0.0);
  g.w.assign(k, 0.0);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p0 = 1.0;
      p1 = x;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    // One clean evaluation at the converged root for the weight.
    double p0 = 1.0;
    p1 = x;
    for (int j = 2; j <= k; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = k * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[k - 1 - i] = x;
    g.w[k - 1 - i] = w;
    g.x[i] = -x;
    g.w[i] = w;
  }
  if (k % 2 == 1) g.x[k / 2] = 0.0;
  return g;
}

/// Gauss-Legendre rule mapped to [a, b].
inline Gauss1D gauss_on(double a, double b, int k) {
  Gauss1D g = gauss_legendre(k);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < k; ++i) {
    g.x[i] = mid + half * g.x[i];
    g.w[i] *= half;
  }
  return g;
}

/// Composite k-point Gauss rule over consecutive intervals of `pts`
/// (sorted breakpoints), `panels` equal panels per interval.
inline Gauss1D composite_gauss(const std::vector<double>& pts, int panels, int k) {
  if (pts.size() < 2) throw std::invalid_argument("composite_gauss: need at least 2 breakpoints");
  if (panels < 1) throw std::invalid_argument("composite_gauss: need panels >= 1");
  Gauss1D base = gauss_legendre(k);
  Gauss1D out;
  for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
    double h = (pts[seg + 1] - pts[seg]) / panels;
    if (!(h > 0.0)) throw std::invalid_argument("composite_gauss: breakpoints must be increasing");
    for (int p = 0; p < panels; ++p) {
      double mid = pts[seg] + (p + 0.5) * h, half = 0.5 * h;
      for (int i = 0; i < k; ++i) {
        out.x.push_back(mid + half * base.x[i]);
        out.w.push_back(half * base.w[i]);
      }
    }
  }
  return out;
}

/// Sorted breakpoints on [a, b] with geometric refinement toward each point
/// of `interior` (layer points where the integrand varies on a fine scale):
/// nested intervals of widths (b-a)/10 * 2^{-d}, d = 1..depth, on both sides.
inline std::vector<double> graded_breakpoints(double a, double b,
                                              const std::vector<double>& interior, int depth) {
  std::vector<double> pts{a, b};
  for (double c : interior) {
    if (c > a && c < b) pts.push_back(c);
    for (int d = 1; d <= depth; ++d) {
      double w = (b - a) * 0.1 * std::pow(0.5, d);
      for (double s : {-1.0, 1.0}) {
        double p = c + s * w;
        if (p > a && p < b) pts.push_back(p);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

enum class Domain { cap, sphere, orthant };

/// Quadrature rule: nodes with positive weights and the convergence order
/// the rule is expected to exhibit under refinement.
struct QuadratureRule {
  Domain domain = Domain::cap;
  int dim = 2;
  int declared_order = 8;
  std::vector<Vec> nodes;
  std::vector<double> weights;

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

namespace detail {
/// Smallest multiple of 4 that is >= 2*resolution (even azimuth counts keep
/// the midpoint grid closed under all coordinate sign flips).
inline int azimuth_count(int resolution) {
  int m = 2 * resolution;
  return ((m + 3) / 4) * 4;
}
}  // namespace detail

/// Surface-measure rule on the cap {x in S^{n-1} : x_n >= cos(theta)}.
/// n = 2: composite Gauss-Legendre in the polar angle of the arc,
/// 2*resolution panels, mirror-symmetric about the vertical axis.
/// n = 3: composite Gauss-Legendre in u = cos(alpha) over [cos(theta), 1]
/// (resolution panels; the substitution absorbs the sin(alpha) Jacobian, so
/// the weights sum to the cap area exactly), tensored with a uniform
/// midpoint azimuth grid (spectrally accurate by periodicity).
/// Gauss nodes are interior, so no node lands on the cap boundary -- which
/// is also the critical cone of the support potential's Hessian.
inline QuadratureRule cap_rule(int n, const ContactAngle& angle, int resolution) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("cap_rule: supported dimensions are 2 and 3, got " +
                                std::to_string(n));
  if (resolution < 4)
    throw std::invalid_argument("cap_rule: resolution must be >= 4, got " +
                                std::to_string(resolution));
  QuadratureRule rule;
  rule.domain = Domain::cap;
  rule.dim = n;
  rule.declared_order = 8;
  if (n == 2) {
    double lo = std::numbers::pi / 2 - angle.theta();
    double hi = std::numbers::pi / 2 + angle.theta();
    Gauss1D g = composite_gauss({lo, hi}, 2 * resolution, 4);
    for (size_t i = 0; i < g.x.size(); ++i) {
      Vec v(2);
      v[0] = std::cos(g.x[i]);
      v[1] = std::sin(g.x[i]);
      rule.nodes.push_back(v);
      rule.weights.push_back(g.w[i]);
    }
  } else {
    Gauss1D gu = composite_gauss({angle.cos(), 1.0}, resolution, 4);
    int m = detail::azimuth_count(resolution);
    double wb = 2.0 * std::numbers::pi / m;
    for (size_t i = 0; i < gu.x.size(); ++i) {
      double u = gu.x[i];
      double su = std::sqrt(1.0 - u * u);
      for (int j = 0; j < m; ++j) {
        double beta = (j + 0.5) * wb;
        Vec v(3);
        v[0] = su * std::cos(beta);
        v[1] = su * std::sin(beta);
        v[2] = u;
        rule.nodes.push_back(v);
        rule.weights.push_back(gu.w[i] * wb);
      }
    }
  }
  return rule;
}

/// Surface-measure rule on the full unit sphere, built from uniform midpoint
/// grids in the angles (n = 3: polar angle uniform, weights sin(alpha),
/// renormalized so the weights sum to the exact sphere area).  Uniform
/// angular spacing is what custom radial-function bodies need: triples of
/// consecutive nodes along a meridian are node-aligned convexity probes.
/// Midpoint grids are closed under all coordinate sign flips.
inline QuadratureRule sphere_rule(int n, int resolution) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("sphere_rule: supported dimensions are 2 and 3, got " +
                                std::to_string(n));
  if (resolution < 2)
    throw std::invalid_argument("sphere_rule: resolution must be >= 2, got " +
                                std::to_string(resolution));
  QuadratureRule rule;
  rule.domain = Domain::sphere;
  rule.dim = n;
  rule.declared_order = 2;
  if (n == 2) {
    int m = 4 * resolution;
    double h = 2.0 * std::numbers::pi / m;
    for (int j = 0; j < m; ++j) {
      double phi = (j + 0.5) * h;
      Vec v(2);
      v[0] = std::cos(phi);
      v[1] = std::sin(phi);
      rule.nodes.push_back(v);
      rule.weights.push_back(h);
    }
  } else {
    int ma = 2 * resolution;
    int mb = detail::azimuth_count(resolution);
    double ha = std::numbers::pi / ma, hb = 2.0 * std::numbers::pi / mb;
    double wsum = 0.0;
    for (int i = 0; i < ma; ++i) {
      double alpha = (i + 0.5) * ha;
      double sa = std::sin(alpha);
      for (int j = 0; j < mb; ++j) {
        double beta = (j + 0.5) * hb;
        Vec v(3);
        v[0] = sa * std::cos(beta);
        v[1] = sa * std::sin(beta);
        v[2] = std::cos(alpha);
        rule.nodes.push_back(v);
        rule.weights.push_back(sa * ha * hb);
        wsum += sa * ha * hb;
      }
    }
    double scale = sphere_measure(3) / wsum;
    for (double& w : rule.weights) w *= scale;
  }
  return rule;
}

/// Tensor rule over the truncated positive orthant [0, R]^n, composite
/// 4-point Gauss panels per axis.  Deterministic cross-check for the
/// Monte-Carlo orthant integrals (n = 2 sized; n = 3 allowed but large).
inline QuadratureRule orthant_rule(int n, double radius, int resolution) {
  if (n < 2 || n > 3)
    throw std::invalid_argument("orthant_rule: supported dimensions are 2 and 3");
  if (!(radius > 0.0)) throw std::invalid_argument("orthant_rule: radius must be positive");
  if (resolution < 1) throw std::invalid_argument("orthant_rule: resolution must be >= 1");
  Gauss1D g = composite_gauss({0.0, radius}, resolution, 4);
  QuadratureRule rule;
  rule.domain = Domain::orthant;
  rule.dim = n;
  rule.declared_order = 8;
  int k = static_cast<int>(g.x.size());
  std::vector<int> idx(n, 0);
  while (true) {
    Vec v(n);
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      v[d] = g.x[idx[d]];
      w *= g.w[idx[d]];
    }
    rule.nodes.push_back(v);
    rule.weights.push_back(w);
    int d = 0;
    while (d < n && ++idx[d] == k) idx[d++] = 0;
    if (d == n) break;
  }
  return rule;
}

/// Sum of weights times integrand values.  Aborts on a non-finite value,
/// identifying the offending node.
template <typename F>
double integrate(const QuadratureRule& rule, F&& f) {
  double total = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    double v = f(rule.nodes[i]);
    if (!std::isfinite(v))
      throw std::runtime_error("integrate: non-finite integrand value at node " +
                               std::to_string(i) + " = " + rule.nodes[i].str());
    total += rule.weights[i] * v;
  }
  return total;
}

/// Plain 1-D counterpart for the family sweeps (arc-parametrized integrands).
template <typename F>
double integrate(const Gauss1D& g, F&& f) {
  double total = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) {
    double v = f(g.x[i]);
    if (!std::isfinite(v))
      throw std::runtime_error("integrate: non-finite integrand value at abscissa " +
                               std::to_string(g.x[i]));
    total += g.w[i] * v;
  }
  return total;
}

/// Monte-Carlo estimate with its standard error.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Importance-sampled Monte Carlo over the open positive orthant with a
/// folded-Gaussian product proposal of scale sigma.  sigma should roughly
/// match the decay scale of the integrand: a unit proposal has unbounded
/// importance weights (infinite variance) for Gaussian-of-gauge integrands
/// of bodies reaching outside the unit ball.
///
/// Each sample draws from an independent stream keyed by its index, so the
/// estimate is bit-identical regardless of how the sample range is
/// partitioned (and trivially reproducible for a fixed seed).
template <typename F>
McEstimate orthant_mc(int n, F&& f, std::int64_t samples, std::uint64_t seed,
                      double sigma = 1.0) {
  if (n < 1 || n > Vec::kMaxDim) throw std::invalid_argument("orthant_mc: bad dimension");
  if (samples < 1) throw std::invalid_argument("orthant_mc: need samples >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("orthant_mc: sigma must be positive");
  const double norm = std::pow(2.0 / (sigma * std::sqrt(2.0 * std::numbers::pi)), n);
  long double sum = 0.0L, sumsq = 0.0L;
  for (std::int64_t i = 0; i < samples; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    Vec y(n);
    double q2 = 0.0;
    for (int d = 0; d < n; ++d) {
      double z = rng.normal();
      y[d] = sigma * std::fabs(z);
      q2 += z * z;
    }
    double q = norm * std::exp(-0.5 * q2);
    double v = f(y) / q;
    if (!std::isfinite(v))
      throw std::runtime_error("orthant_mc: non-finite integrand ratio at sample " +
                               std::to_string(i) + ", y = " + y.str());
    sum += v;
    sumsq += static_cast<long double>(v) * v;
  }
  McEstimate est;
  est.samples = samples;
  est.value = static_cast<double>(sum / samples);
  if (samples > 1) {
    long double var = (sumsq - sum * sum / samples) / (samples - 1);
    if (var < 0.0L) var = 0.0L;
    est.std_error = static_cast<double>(std::sqrt(static_cast<double>(var / samples)));
  }
  return est;
}

}  // namespace capvol
