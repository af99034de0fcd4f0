#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "capvol/vec.hpp"

// Geometry of the unit spherical cap that meets the supporting hyperplane
// {x_n = 0} at a prescribed contact angle, and of the doubled convex body
// obtained by reflecting the enclosed region across that hyperplane.  All
// closed forms below are elementary consequences of the cap being a piece of
// the unit sphere centered at -cos(theta) * e_n.

namespace capvol {

enum class Regime { acute, right, obtuse };

/// Contact angle theta in (0, pi) between the cap and the hyperplane.
/// cos/sin are cached; for angles within 1e-12 of pi/2 the cosine is snapped
/// to exactly zero so that right-angle identities (ell == 1, cap == half
/// ball) hold exactly in floating point.
class ContactAngle {
 public:
  explicit ContactAngle(double theta) : theta_(theta) {
    if (!(theta > 0.0) || !(theta < std::numbers::pi))
      throw std::invalid_argument("ContactAngle: theta must lie in (0, pi), got " +
                                  std::to_string(theta));
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (std::fabs(theta - half_pi) <= 1e-12) {
      regime_ = Regime::right;
      cos_ = 0.0;
      sin_ = 1.0;
    } else {
      regime_ = theta < half_pi ? Regime::acute : Regime::obtuse;
      cos_ = std::cos(theta);
      sin_ = std::sin(theta);
    }
  }

  double theta() const { return theta_; }
  double cos() const { return cos_; }
  double sin() const { return sin_; }
  Regime regime() const { return regime_; }
  bool is_acute() const { return regime_ == Regime::acute; }
  bool is_obtuse() const { return regime_ == Regime::obtuse; }

  void require_acute(const char* what) const {
    if (regime_ != Regime::acute)
      throw std::domain_error(std::string(what) +
                              ": requires an acute contact angle (theta < pi/2), got theta = " +
                              std::to_string(theta_));
  }
  void require_acute_or_right(const char* what) const {
    if (regime_ == Regime::obtuse)
      throw std::domain_error(std::string(what) +
                              ": requires theta <= pi/2, got theta = " + std::to_string(theta_));
  }
  void require_obtuse(const char* what) const {
    if (regime_ != Regime::obtuse)
      throw std::domain_error(std::string(what) +
                              ": requires an obtuse contact angle (theta > pi/2), got theta = " +
                              std::to_string(theta_));
  }

 private:
  double theta_, cos_ = 0.0, sin_ = 1.0;
  Regime regime_ = Regime::right;
};

/// A point of the cap, stored both as the unit outer normal x (on the unit
/// sphere, with x_n >= cos(theta)) and as the cap point zeta = x - cos(theta) e_n
/// itself (which lies in the closed upper half-space).
struct CapPoint {
  Vec x;     // unit vector, x.last() >= cos(theta)
  Vec zeta;  // x - cos(theta) * e_n

  static CapPoint from_normal(const Vec& x, const ContactAngle& angle) {
    if (std::fabs(x.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("CapPoint: |x| must be 1, got |x| = " +
                                  std::to_string(x.norm()));
    if (x.last() < angle.cos() - 1e-12)
      throw std::invalid_argument("CapPoint: x_n = " + std::to_string(x.last()) +
                                  " below cap floor cos(theta) = " +
                                  std::to_string(angle.cos()));
    Vec z = x;
    z.last() -= angle.cos();
    return CapPoint{x, z};
  }
};

/// A point of the open positive orthant (0, inf)^n.
struct OrthantPoint {
  Vec y;
  explicit OrthantPoint(const Vec& v) : y(v) {
    if (!v.all_positive())
      throw std::invalid_argument("OrthantPoint: all coordinates must be > 0, got " + v.str());
  }
};

/// Capillary support function of the unit cap evaluated on itself:
/// 1 - cos(theta) * x_n for a cap point with unit normal x.  This is also the
/// density (up to 1/n) of the cone-volume measure on the cap, and equals
/// sin^2(theta) on the contact boundary.  Valid for every regime.
inline double cap_self_support(const Vec& x_unit, const ContactAngle& angle) {
  return 1.0 - angle.cos() * x_unit.last();
}
inline double cap_self_support(const CapPoint& p, const ContactAngle& angle) {
  return cap_self_support(p.x, angle);
}

/// Support function of the doubled cap body (the enclosed region together
/// with its reflection).  Piecewise: directions making a shallow angle with
/// the hyperplane see the equatorial sphere of radius sin(theta); steep
/// directions see one of the two spherical pieces.
inline double cap_support(const Vec& y, const ContactAngle& angle) {
  angle.require_acute_or_right("cap_support");
  double xn = std::fabs(y.last());
  double r = y.norm();
  if (xn <= r * angle.cos()) return y.head_norm() * angle.sin();
  return r - xn * angle.cos();
}

/// Gauge (Minkowski functional) of the doubled cap body; positively
/// 1-homogeneous, equal to 1 exactly on the boundary.
inline double cap_gauge(const Vec& y, const ContactAngle& angle) {
  angle.require_acute_or_right("cap_gauge");
  double xn = std::fabs(y.last());
  double xp = y.head_norm();
  double s2 = angle.sin() * angle.sin();
  return (angle.cos() * xn + std::sqrt(xn * xn + s2 * xp * xp)) / s2;
}

/// Half squared gauge of the doubled cap body.  2-homogeneous and convex for
/// theta <= pi/2; the same formula is kept meaningful for obtuse angles,
/// where its composition with the coordinatewise square root turns convex
/// (see sqrt_reduced_hessian).
inline double gauge_potential(const Vec& y, const ContactAngle& angle) {
  double xn = std::fabs(y.last());
  double xp = y.head_norm();
  double s2 = angle.sin() * angle.sin();
  double p = (angle.cos() * xn + std::sqrt(xn * xn + s2 * xp * xp)) / s2;
  return 0.5 * p * p;
}

/// Half squared support of the doubled cap body; the convex conjugate of
/// gauge_potential for theta <= pi/2.
inline double support_potential(const Vec& y, const ContactAngle& angle) {
  double h = cap_support(y, angle);
  return 0.5 * h * h;
}

/// Gradient of gauge_potential on the open positive orthant, assembled from
/// the polar-type parametrization r = sqrt(x_n^2 + sin^2(theta) |x'|^2),
/// cos(phi) = x_n / r.  Smooth there in every regime (x_n > 0 removes the
/// |x_n| kink, so the same algebra holds for obtuse angles).
inline Vec gauge_potential_gradient(const OrthantPoint& p, const ContactAngle& angle) {
  const Vec& x = p.y;
  double st = angle.sin(), ct = angle.cos();
  double s2 = st * st;
  double xn = x.last();
  double xp = x.head_norm();
  double r = std::sqrt(xn * xn + s2 * xp * xp);
  double cph = xn / r;
  double c1 = 1.0 + ct * cph;
  Vec g(x.dim());
  for (int i = 0; i < x.dim() - 1; ++i) g[i] = x[i] * c1 / s2;
  g.last() = r * c1 * (ct + cph) / (s2 * s2);
  return g;
}

/// Gradient of support_potential.  C^1 everywhere: linear in y' on the
/// cylinder-type region |y_n| <= |y| cos(theta), radial-minus-axial on the
/// two cap-type regions, zero at the origin.
inline Vec support_potential_gradient(const Vec& y, const ContactAngle& angle) {
  angle.require_acute_or_right("support_potential_gradient");
  int n = y.dim();
  double r = y.norm();
  Vec g(n, 0.0);
  if (r == 0.0) return g;
  double ct = angle.cos();
  double yn = y.last();
  if (std::fabs(yn) <= r * ct) {
    double s2 = angle.sin() * angle.sin();
    for (int i = 0; i < n - 1; ++i) g[i] = s2 * y[i];
    return g;
  }
  double h = r - std::fabs(yn) * ct;
  double sgn = yn >= 0.0 ? 1.0 : -1.0;
  for (int i = 0; i < n; ++i) g[i] = h * y[i] / r;
  g.last() -= h * sgn * ct;
  return g;
}

/// Determinant of the Hessian of support_potential: zero on the cylinder-type
/// region, (1 - cos(theta) |y_n| / |y|)^(n+1) on the cap-type regions (the
/// spherical pieces have unit Gauss curvature).  Queries on the critical cone
/// separating the branches, or at the origin, are a branch error.
inline double support_potential_hessian_det(const Vec& y, const ContactAngle& angle) {
  angle.require_acute_or_right("support_potential_hessian_det");
  double r = y.norm();
  if (r == 0.0)
    throw std::domain_error("support_potential_hessian_det: undefined at the origin");
  double d = std::fabs(y.last()) - r * angle.cos();
  if (std::fabs(d) <= 1e-14 * r)
    throw std::domain_error(
        "support_potential_hessian_det: point lies on the critical cone |y_n| = |y| cos(theta); "
        "the Hessian jumps across it");
  if (d < 0.0) return 0.0;
  double base = 1.0 - (std::fabs(y.last()) / r) * angle.cos();
  double det = 1.0;
  for (int i = 0; i < y.dim() + 1; ++i) det *= base;
  return det;
}

/// Symmetric 2x2 matrix.
struct SymMat2 {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;

  /// Eigenvalues, ascending.
  void eigenvalues(double& lo, double& hi) const {
    double tr = a11 + a22;
    double d = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * a12 * a12);
    lo = 0.5 * (tr - d);
    hi = 0.5 * (tr + d);
  }
};

/// Hessian of the reduced map (s, t) -> gauge_potential applied to the
/// coordinatewise square root, where s is the sum of the squared tangential
/// coordinates and t the squared axial coordinate.  It is rank <= 1 with
/// sign opposite to cos(theta): negative semi-definite for acute angles
/// (concavity of the square-root composition), positive semi-definite for
/// obtuse ones, and zero at theta = pi/2.
inline SymMat2 sqrt_reduced_hessian(double s, double t, const ContactAngle& angle) {
  if (!(s > 0.0) || !(t > 0.0))
    throw std::invalid_argument("sqrt_reduced_hessian: requires s > 0 and t > 0");
  double s2 = angle.sin() * angle.sin();
  double w = std::sqrt(t * t + s * t * s2);
  double f = -angle.cos() / (4.0 * w * w * w);
  return SymMat2{f * t * t, -f * s * t, f * s * s};
}

/// The gradient map of gauge_potential, viewed as a diffeomorphism from the
/// open positive orthant onto the orthant sector {y > 0, y_n > |y| cos(theta)}.
/// The image membership is asserted (with 1e-10 slack); failure indicates an
/// internal error, not bad input.
inline OrthantPoint gradient_map(const OrthantPoint& p, const ContactAngle& angle) {
  Vec y = gauge_potential_gradient(p, angle);
  if (!(y.last() - y.norm() * angle.cos() > -1e-10))
    throw std::logic_error("gradient_map: image " + y.str() +
                           " escaped the target sector y_n > |y| cos(theta)");
  return OrthantPoint(y);
}

/// Tangent of the aperture of the target sector: the image directions of the
/// gradient map have tangential/axial ratio sin(theta) sin(phi) / (cos(theta)
/// + cos(phi)), strictly increasing in phi with supremum tan(theta).
inline double sector_aperture_ratio(double phi, const ContactAngle& angle) {
  return angle.sin() * std::sin(phi) / (angle.cos() + std::cos(phi));
}

/// Volume enclosed between the cap and the hyperplane (closed forms, valid
/// for every contact angle in (0, pi)).
inline double cap_region_volume(int n, const ContactAngle& angle) {
  double ct = angle.cos(), st = angle.sin();
  if (n == 2) return angle.theta() - st * ct;
  if (n == 3) return std::numbers::pi * (1.0 - ct) * (1.0 - ct) * (2.0 + ct) / 3.0;
  throw std::invalid_argument("cap_region_volume: supported dimensions are 2 and 3, got " +
                              std::to_string(n));
}

/// Surface measure of the cap (the set of unit normals).
inline double cap_measure(int n, const ContactAngle& angle) {
  if (n == 2) return 2.0 * angle.theta();
  if (n == 3) return 2.0 * std::numbers::pi * (1.0 - angle.cos());
  throw std::invalid_argument("cap_measure: supported dimensions are 2 and 3, got " +
                              std::to_string(n));
}

/// Surface measure of the full unit sphere.
inline double sphere_measure(int n) {
  if (n == 2) return 2.0 * std::numbers::pi;
  if (n == 3) return 4.0 * std::numbers::pi;
  throw std::invalid_argument("sphere_measure: supported dimensions are 2 and 3, got " +
                              std::to_string(n));
}

/// Volume of the unit ball.
inline double ball_volume(int n) {
  double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

}  // namespace capvol
