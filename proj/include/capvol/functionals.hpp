#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "capvol/bodies.hpp"
#include "capvol/cap_geometry.hpp"
#include "capvol/quadrature.hpp"

// Scalar functionals of a capillary body: the polar-dual volume integral,
// the scale-invariant volume product against its cap bound, and the
// support-ratio moment family used by the moment and entropy inequalities.
// All integrals run over a spherical-cap quadrature rule whose nodes are
// the unit normals of the cap.

namespace capvol {

/// Cone volume identity: the region under the cap has volume
/// (1/n) * integral of (1 - cos(theta) x_n) over the normal cap.
/// Equals cap_region_volume(n, angle) up to quadrature error.
inline double cap_cone_volume(const ContactAngle& angle, const QuadratureRule& rule) {
  if (rule.domain != Domain::cap)
    throw std::invalid_argument("cap_cone_volume: rule must live on the normal cap");
  return integrate(rule, [&](const Vec& x) { return cap_self_support(x, angle); }) / rule.dim;
}

/// Volume of the polar-dual region of the capillary body:
///   (1/n) * integral of ell(x)^{n+1} / h(x)^n  over the normal cap,
/// where ell is the cap's own support and h the body's.  The body must
/// support every cap normal positively.
inline double polar_volume(const Body& body, const ContactAngle& angle,
                           const QuadratureRule& rule) {
  if (rule.domain != Domain::cap)
    throw std::invalid_argument("polar_volume: rule must live on the normal cap");
  if (rule.dim != body.dim())
    throw std::invalid_argument("polar_volume: rule/body dimension mismatch");
  double acc = 0.0;
  int n = body.dim();
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec& x = rule.nodes[i];
    double h = body.support(x);
    if (!(h > 0.0))
      throw std::runtime_error("polar_volume: body '" + body.name() +
                               "' has nonpositive support " + std::to_string(h) +
                               " at cap normal " + x.str());
    double ell = cap_self_support(x, angle);
    acc += rule.weights[i] * std::pow(ell, n + 1) / std::pow(h, n);
  }
  return acc / n;
}

/// Volume of the region of the body above the hyperplane.  Bodies in this
/// catalog are unconditional, so this is half the full volume.
inline double upper_volume(const Body& body) { return 0.5 * body.volume(); }

struct VolumeProductReport {
  std::string body_name;
  int dim = 0;
  double theta = 0.0;
  double vol_hat = 0.0;    // volume above the hyperplane
  double vol_polar = 0.0;  // polar-dual volume
  double product = 0.0;    // vol_hat * vol_polar  (scale invariant)
  double bound = 0.0;      // cap_region_volume^2, attained by scaled caps
  double margin = 0.0;     // bound - product  (>= 0 for convex bodies)
  int resolution = 0;
};

/// Scale-invariant volume product of a capillary body against its sharp
/// cap bound.  The margin is nonnegative for every unconditional convex
/// body and vanishes exactly on scaled caps.
inline VolumeProductReport volume_product(const Body& body, const ContactAngle& angle,
                                          int resolution) {
  angle.require_acute_or_right("volume_product");
  QuadratureRule rule = cap_rule(body.dim(), angle, resolution);
  VolumeProductReport r;
  r.body_name = body.name();
  r.dim = body.dim();
  r.theta = angle.theta();
  r.vol_hat = upper_volume(body);
  r.vol_polar = polar_volume(body, angle, rule);
  r.product = r.vol_hat * r.vol_polar;
  double vc = cap_region_volume(body.dim(), angle);
  r.bound = vc * vc;
  r.margin = r.bound - r.product;
  r.resolution = resolution;
  return r;
}

/// Moment of the support ratio:  integral of h(x)^p ell(x)^{1-p} over the
/// normal cap.  At p = 0 this is n times the cap region volume for any
/// body; for volume-normalized bodies and p in (-n, 0) it is bounded above
/// by that same value, with equality only for caps.
inline double support_ratio_moment(const Body& body, const ContactAngle& angle,
                                   const QuadratureRule& rule, double p) {
  if (rule.domain != Domain::cap)
    throw std::invalid_argument("support_ratio_moment: rule must live on the normal cap");
  double acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec& x = rule.nodes[i];
    double h = body.support(x);
    if (!(h > 0.0))
      throw std::runtime_error("support_ratio_moment: body '" + body.name() +
                               "' has nonpositive support at cap normal " + x.str());
    double ell = cap_self_support(x, angle);
    acc += rule.weights[i] * std::pow(h, p) * std::pow(ell, 1.0 - p);
  }
  return acc;
}

/// Entropy-type functional:  integral of ell(x) * log h(x).  For
/// volume-normalized bodies it is bounded below by the same integral with
/// h replaced by ell (the p -> 0 limit of the moment bound).
inline double support_log_moment(const Body& body, const ContactAngle& angle,
                                 const QuadratureRule& rule) {
  if (rule.domain != Domain::cap)
    throw std::invalid_argument("support_log_moment: rule must live on the normal cap");
  double acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec& x = rule.nodes[i];
    double h = body.support(x);
    if (!(h > 0.0))
      throw std::runtime_error("support_log_moment: body '" + body.name() +
                               "' has nonpositive support at cap normal " + x.str());
    double ell = cap_self_support(x, angle);
    acc += rule.weights[i] * ell * std::log(h);
  }
  return acc;
}

/// Reference value of the entropy functional: integral of ell * log(ell).
inline double reference_log_moment(const ContactAngle& angle, const QuadratureRule& rule) {
  return integrate(rule, [&](const Vec& x) {
    double ell = cap_self_support(x, angle);
    return ell * std::log(ell);
  });
}

/// The body rescaled so that its upper volume equals the cap region
/// volume (the normalization under which the moment and entropy bounds
/// are stated).
inline Body normalized_to_cap_volume(const Body& body, const ContactAngle& angle) {
  double target = cap_region_volume(body.dim(), angle);
  double s = std::pow(2.0 * target / body.volume(), 1.0 / body.dim());
  return body.scaled(s);
}

}  // namespace capvol
