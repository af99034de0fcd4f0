#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "capvol/bodies.hpp"
#include "capvol/cap_geometry.hpp"
#include "capvol/finite_diff.hpp"
#include "capvol/functionals.hpp"
#include "capvol/quadrature.hpp"
#include "capvol/rng.hpp"
#include "capvol/vec.hpp"

// Randomized verification battery for the closed-form cap analysis: each
// check samples points (or runs a seeded Monte-Carlo integral), measures
// the worst violation of one analytic identity or inequality, and reports
// a uniform pass/fail record.  Conventions:
//   worst_margin = -violation (signed headroom; positive means satisfied
//   with room to spare), and pass  <=>  worst_margin >= -tolerance.
// Monte-Carlo checks use tolerance 0 with a three-standard-error allowance
// folded into the violation itself.

namespace capvol {

struct CheckResult {
  std::string name;
  int samples = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  double theta = 0.0;
  int dim = 0;
};

namespace detail {

inline CheckResult finish_check(std::string name, int samples, double violation, double tol,
                                std::uint64_t seed, double theta, int dim) {
  CheckResult r;
  r.name = std::move(name);
  r.samples = samples;
  r.tolerance = tol;
  r.worst_margin = -violation;
  r.pass = r.worst_margin >= -tol;
  r.seed = seed;
  r.theta = theta;
  r.dim = dim;
  return r;
}

/// Decorrelated seed for a sub-stream of a check.
inline std::uint64_t salt(std::uint64_t seed, std::uint64_t tag) {
  return Rng(seed, tag).next_u64();
}

/// Random interior point of the positive orthant, coordinates in [lo, hi).
inline Vec orthant_point(Rng& rng, int n, double lo, double hi) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

/// Random unit direction in the closed positive orthant.
inline Vec orthant_direction(Rng& rng, int n) {
  for (;;) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = std::fabs(rng.normal());
    double r = u.norm();
    if (r > 1e-3) return u / r;
  }
}

/// Point at a prescribed polar angle from the vertical axis (exact branch
/// control for the two-piece support potential).
inline Vec point_at_polar_angle(Rng& rng, int n, double phi, double radius) {
  Vec u(n);
  if (n == 2) {
    u[0] = std::sin(phi);
    u[1] = std::cos(phi);
  } else {
    Vec t = orthant_direction(rng, n - 1);
    for (int i = 0; i + 1 < n; ++i) u[i] = std::sin(phi) * t[i];
    u.last() = std::cos(phi);
  }
  return radius * u;
}

}  // namespace detail

/// Hessian of v(x) = V(sqrt(x_1), ..., sqrt(x_n)) by central differences
/// of the exact gradient of v (one differencing layer keeps the rounding
/// floor near 1e-9 even where 1/sin^4 blows the value scale up; a second
/// layer would not).
inline SmallMat sqrt_potential_hessian(const Vec& x, const ContactAngle& angle) {
  auto grad_v = [&](const Vec& z) {
    Vec y = z.cwise_sqrt();
    Vec gv = gauge_potential_gradient(OrthantPoint(y), angle);
    for (int i = 0; i < z.dim(); ++i) gv[i] /= 2.0 * y[i];
    return gv;
  };
  double h = 1e-6 * std::max(1.0, x.norm());
  SmallMat m(x.dim());
  for (int j = 0; j < x.dim(); ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Vec col = (grad_v(xp) - grad_v(xm)) / (2.0 * h);
    for (int i = 0; i < x.dim(); ++i) m(i, j) = col[i];
  }
  for (int i = 0; i < x.dim(); ++i)
    for (int j = i + 1; j < x.dim(); ++j) m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));
  return m;
}

/// Concavity of x -> (1/2) p(sqrt(x_1), ..., sqrt(x_n))^2 on the positive
/// orthant: its Hessian is negative semidefinite for acute and right
/// angles and the sign flips to positive semidefinite past a right angle.
/// Violation: worst signed eigenvalue excess across sample points.
inline CheckResult check_sqrt_concavity(int n, const ContactAngle& angle, int samples,
                                        std::uint64_t seed) {
  Rng rng(seed);
  double violation = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = detail::orthant_point(rng, n, 0.25, 4.0);
    SmallMat m = sqrt_potential_hessian(x, angle);
    auto ev = symmetric_eigenvalues(m);
    double excess =
        angle.cos() >= 0.0 ? ev.back() : -ev.front();  // NSD (acute/right) vs PSD (obtuse)
    violation = std::max(violation, excess);
    if (n == 2) {
      // The 2-d Hessian also has a closed form; hold the differenced one to it.
      SymMat2 closed = sqrt_reduced_hessian(x[0], x[1], angle);
      double scale = std::max({1.0, std::abs(closed.a11), std::abs(closed.a12),
                               std::abs(closed.a22)});
      double diff = std::max({std::abs(m(0, 0) - closed.a11), std::abs(m(0, 1) - closed.a12),
                              std::abs(m(1, 1) - closed.a22)});
      violation = std::max(violation, diff / scale);
    }
  }
  return detail::finish_check("sqrt_concavity", samples, violation, 1e-7, seed, angle.theta(), n);
}

/// Mutual consistency of the closed forms for the cap's gauge potential
/// V = p^2/2 and support potential V* = h^2/2: gradients against central
/// differences, the conjugacy identity V(x) + V*(DV(x)) = <x, DV(x)>, the
/// Hessian determinant of V* on both branches, and continuity of DV*
/// across the cone separating them.  Violation: worst relative error.
inline CheckResult check_conjugate_closed_forms(int n, const ContactAngle& angle, int samples,
                                                std::uint64_t seed) {
  angle.require_acute("check_conjugate_closed_forms");
  Rng rng(seed);
  double violation = 0.0;
  auto note = [&](double err) { violation = std::max(violation, err); };
  auto rel = [](double err, double scale) { return std::fabs(err) / std::max(1.0, scale); };
  auto vpot = [&](const Vec& z) { return gauge_potential(z, angle); };
  auto spot = [&](const Vec& z) { return support_potential(z, angle); };

  for (int s = 0; s < samples; ++s) {
    // Gauge side: closed gradient vs finite differences, then conjugacy.
    Vec x = detail::orthant_point(rng, n, 0.2, 3.0);
    Vec g = gauge_potential_gradient(OrthantPoint(x), angle);
    note(rel((g - fd_gradient(vpot, x)).norm(), g.norm()));
    double pairing = dot(x, g);
    note(rel(gauge_potential(x, angle) + support_potential(g, angle) - pairing, pairing));

    // Support side, alternating branches about the separating cone.
    bool cap_side = (s % 2 == 0);
    double phi = cap_side ? angle.theta() * rng.uniform(0.05, 0.92)
                          : angle.theta() + (0.5 * std::numbers::pi - angle.theta()) *
                                                rng.uniform(0.08, 0.95);
    Vec y = detail::point_at_polar_angle(rng, n, phi, rng.uniform(0.3, 3.0));
    Vec gs = support_potential_gradient(y, angle);
    note(rel((gs - fd_gradient(spot, y)).norm(), gs.norm()));
    double det_closed = support_potential_hessian_det(y, angle);
    double det_fd = determinant(fd_hessian(spot, y));
    if (cap_side)
      note(std::fabs(det_fd - det_closed) / std::fabs(det_closed));
    else
      note(std::fabs(det_fd));  // exact zero on the cylinder branch

    // C^1 matching across the cone: closed-form gradients from either side
    // of the same ray differ only to first order in the angular offset.
    constexpr double kOffset = 1e-7;
    double r = rng.uniform(0.3, 3.0);
    Vec t(n);  // shared tangential direction, stored in the first n-1 slots
    if (n == 2) {
      t[0] = 1.0;
    } else {
      Vec d = detail::orthant_direction(rng, n - 1);
      for (int i = 0; i + 1 < n; ++i) t[i] = d[i];
    }
    auto on_ray = [&](double phi) {
      Vec u(n);
      for (int i = 0; i + 1 < n; ++i) u[i] = std::sin(phi) * t[i];
      u.last() = std::cos(phi);
      return r * u;
    };
    note((support_potential_gradient(on_ray(angle.theta() - kOffset), angle) -
          support_potential_gradient(on_ray(angle.theta() + kOffset), angle))
             .norm());
  }
  return detail::finish_check("conjugate_closed_forms", samples, violation, 1e-5, seed,
                              angle.theta(), n);
}

/// The gradient of the gauge potential maps the positive orthant into the
/// open cone above the contact slope, and the support potential's gradient
/// inverts it exactly.  Violation: worst relative round-trip error (a
/// range failure is reported as an infinite violation).
inline CheckResult check_gradient_map(int n, const ContactAngle& angle, int samples,
                                      std::uint64_t seed) {
  angle.require_acute("check_gradient_map");
  Rng rng(seed);
  double violation = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = detail::orthant_point(rng, n, 0.2, 3.0);
    try {
      OrthantPoint y = gradient_map(OrthantPoint(x), angle);
      Vec back = support_potential_gradient(y.y, angle);
      violation = std::max(violation, (back - x).norm() / x.norm());
    } catch (const std::logic_error&) {
      violation = std::numeric_limits<double>::infinity();
    }
  }
  return detail::finish_check("gradient_map", samples, violation, 1e-8, seed, angle.theta(), n);
}

/// Jacobian reciprocity of the gradient map: det D2V(x) * det D2V*(DV(x))
/// equals 1, with both Hessians taken by central differences.  Violation:
/// worst |product - 1|.
inline CheckResult check_hessian_det_product(int n, const ContactAngle& angle, int samples,
                                             std::uint64_t seed) {
  angle.require_acute("check_hessian_det_product");
  Rng rng(seed);
  auto vpot = [&](const Vec& z) { return gauge_potential(z, angle); };
  auto spot = [&](const Vec& z) { return support_potential(z, angle); };
  double violation = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x = detail::orthant_point(rng, n, 0.3, 2.5);
    OrthantPoint y = gradient_map(OrthantPoint(x), angle);
    double product = determinant(fd_hessian(vpot, x)) * determinant(fd_hessian(spot, y.y));
    violation = std::max(violation, std::fabs(product - 1.0));
  }
  return detail::finish_check("hessian_det_product", samples, violation, 1e-6, seed,
                              angle.theta(), n);
}

/// Multiplicative two-point concavity of the gauge potential:
/// <a, DV(b)> >= 2 V(sqrt(a .* b)) on the positive orthant, with equality
/// at a = b (checked on every eighth pair).  Violation: worst shortfall.
inline CheckResult check_two_concavity(int n, const ContactAngle& angle, int samples,
                                       std::uint64_t seed) {
  angle.require_acute("check_two_concavity");
  Rng rng(seed);
  double violation = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec a = detail::orthant_point(rng, n, 0.1, 4.0);
    Vec b = (s % 8 == 0) ? a : detail::orthant_point(rng, n, 0.1, 4.0);
    double lhs = dot(a, gauge_potential_gradient(OrthantPoint(b), angle));
    double rhs = 2.0 * gauge_potential(a.cwise_mul(b).cwise_sqrt(), angle);
    double shortfall = rhs - lhs;
    if (s % 8 == 0) shortfall = std::fabs(shortfall);
    violation = std::max(violation, shortfall);
  }
  return detail::finish_check("two_concavity", samples, violation, 1e-10, seed, angle.theta(), n);
}

/// Gaussian mass of the cap gauge over the positive orthant:
///   integral of exp(-p^2/2)  =  (n c / 2^{n-1}) * vol,
/// where vol is the cap region volume and c = 2^{n/2 - 1} Gamma(n/2).
/// Violation: Monte-Carlo error beyond three standard errors.
inline double gaussian_cap_mass_closed_form(int n, const ContactAngle& angle) {
  double c = std::pow(2.0, 0.5 * n - 1.0) * std::tgamma(0.5 * n);
  return n * c / std::pow(2.0, n - 1) * cap_region_volume(n, angle);
}

inline CheckResult check_gaussian_cap_mass(int n, const ContactAngle& angle,
                                           std::int64_t mc_samples, std::uint64_t seed) {
  angle.require_acute_or_right("check_gaussian_cap_mass");
  double exact = gaussian_cap_mass_closed_form(n, angle);
  McEstimate est = orthant_mc(
      n, [&](const Vec& y) { return std::exp(-gauge_potential(y, angle)); }, mc_samples,
      detail::salt(seed, 1), 1.0);
  double violation = std::fabs(est.value - exact) - 3.0 * est.std_error;
  return detail::finish_check("gaussian_cap_mass", static_cast<int>(mc_samples), violation, 0.0,
                              seed, angle.theta(), n);
}

/// Functional volume-product inequality for an unconditional convex body:
/// with G the body's gauge, H its support, and V the cap gauge potential,
///   [ integral of e^{-G^2/2} ] * [ integral over the cone of
///     e^{-H^2/2} (1 - cos(theta) y_n/|y|)^{n+1} ]  <=  [ e^{-V} mass ]^2,
/// all over the positive orthant, with equality when the body is the
/// doubled cap.  Violation: excess of the left side over the right beyond
/// three combined standard errors (or the absolute gap when equality is
/// expected).
inline CheckResult check_gaussian_santalo(const Body& body, const ContactAngle& angle,
                                          std::int64_t mc_samples, std::uint64_t seed,
                                          bool expect_equality = false) {
  angle.require_acute("check_gaussian_santalo");
  if (body.kind() == BodyKind::custom_radial)
    throw std::invalid_argument(
        "check_gaussian_santalo: radial-sample bodies are not supported (their sampled "
        "support and interpolated gauge describe slightly different bodies)");
  int n = body.dim();

  McEstimate i1 = orthant_mc(
      n, [&](const Vec& y) { return std::exp(-0.5 * body.gauge(y) * body.gauge(y)); },
      mc_samples, detail::salt(seed, 2), body.outer_radius());

  double min_axis_support = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    min_axis_support = std::min(min_axis_support, body.support(Vec::unit(n, i)));
  double sigma2 = std::sqrt(static_cast<double>(n)) / min_axis_support;
  McEstimate i2 = orthant_mc(
      n,
      [&](const Vec& y) {
        double r = y.norm();
        if (y.last() <= r * angle.cos()) return 0.0;
        double h = body.support(y);
        return std::exp(-0.5 * h * h) *
               std::pow(1.0 - angle.cos() * y.last() / r, n + 1);
      },
      mc_samples, detail::salt(seed, 3), sigma2);

  double rhs = gaussian_cap_mass_closed_form(n, angle);
  double lhs = i1.value * i2.value;
  double se = std::hypot(i2.value * i1.std_error, i1.value * i2.std_error);
  double gap = lhs - rhs * rhs;
  double violation = (expect_equality ? std::fabs(gap) : gap) - 3.0 * se;
  std::string name = std::string(expect_equality ? "gaussian_santalo_equality("
                                                 : "gaussian_santalo(") +
                     body.name() + ")";
  return detail::finish_check(std::move(name), static_cast<int>(mc_samples), violation, 0.0,
                              seed, angle.theta(), n);
}

/// Sharp volume-product bound: the body's product functional must not
/// exceed the squared cap region volume.  Violation: product - bound.
inline CheckResult check_product_bound(const Body& body, const ContactAngle& angle,
                                       int resolution, double tol = 1e-6) {
  VolumeProductReport r = volume_product(body, angle, resolution);
  return detail::finish_check("product_bound(" + body.name() + ")",
                              static_cast<int>(cap_rule(body.dim(), angle, resolution)
                                                   .nodes.size()),
                              -r.margin, tol, 0, angle.theta(), body.dim());
}

/// Equality case of the volume-product bound: scaled doubled caps attain
/// it.  Violation: |product - bound| at the given scale.
inline CheckResult check_product_equality(int n, const ContactAngle& angle, double scale,
                                          int resolution, double tol = 1e-8) {
  Body cap = Body::double_cap(n, angle, scale);
  VolumeProductReport r = volume_product(cap, angle, resolution);
  return detail::finish_check("product_equality(scale=" + std::to_string(scale) + ")",
                              r.resolution, std::fabs(r.margin), tol, 0, angle.theta(), n);
}

/// Moment bound for volume-normalized bodies: for p in (-n, 0),
/// the support-ratio moment is at most n times the cap region volume.
/// Violation: moment - bound.  The body must already be normalized.
inline CheckResult check_moment_bound(const Body& normalized, const ContactAngle& angle,
                                      int resolution, double p, double tol = 1e-9) {
  int n = normalized.dim();
  if (!(p > -n && p < 0.0))
    throw std::invalid_argument("check_moment_bound: exponent must lie in (-n, 0)");
  double vc = cap_region_volume(n, angle);
  if (std::fabs(upper_volume(normalized) - vc) > 1e-8 * vc)
    throw std::invalid_argument("check_moment_bound: body is not volume-normalized");
  QuadratureRule rule = cap_rule(n, angle, resolution);
  double moment = support_ratio_moment(normalized, angle, rule, p);
  return detail::finish_check("moment_bound(" + normalized.name() + ",p=" + std::to_string(p) +
                                  ")",
                              static_cast<int>(rule.nodes.size()), moment - n * vc, tol, 0,
                              angle.theta(), n);
}

/// Entropy bound for volume-normalized bodies: the integral of
/// ell * log(support) is at least the integral of ell * log(ell).
/// Violation: reference - value.
inline CheckResult check_log_moment_bound(const Body& normalized, const ContactAngle& angle,
                                          int resolution, double tol = 1e-9) {
  int n = normalized.dim();
  double vc = cap_region_volume(n, angle);
  if (std::fabs(upper_volume(normalized) - vc) > 1e-8 * vc)
    throw std::invalid_argument("check_log_moment_bound: body is not volume-normalized");
  QuadratureRule rule = cap_rule(n, angle, resolution);
  double value = support_log_moment(normalized, angle, rule);
  double reference = reference_log_moment(angle, rule);
  return detail::finish_check("log_moment_bound(" + normalized.name() + ")",
                              static_cast<int>(rule.nodes.size()), reference - value, tol, 0,
                              angle.theta(), n);
}

}  // namespace capvol
