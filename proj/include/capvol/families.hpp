#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "capvol/cap_geometry.hpp"
#include "capvol/quadrature.hpp"
#include "capvol/vec.hpp"

// Two planar one-parameter families of capillary bodies for obtuse contact
// angles whose volume product grows without bound, witnessing that the
// sharp acute-angle product inequality has no obtuse counterpart.  Both
// expose exact upper areas and support functions on the (obtuse) normal
// cap; the polar-dual volume is integrated on panels broken and graded at
// the horizon directions, where the first family's support has a kink and
// the second's collapses through an O(1/b^2) layer.

namespace capvol {

/// Tall column footed by a shrunken cap: the convex hull of the cap region
/// scaled by 1/lambda and a disk of radius 1/lambda centered at height
/// lambda on the axis.  Its support over the normal cap is
///   h(u) = max( ell(u)/lambda,  lambda u_2 + 1/lambda ),
/// with ell(u) = 1 - cos(theta) u_2.  For lambda^2 >= |cos(theta)| the two
/// branches cross exactly at the horizon u_2 = 0 (guaranteed here by
/// lambda >= 1): below it the body looks like the scaled cap, above it
/// like the column.
class CapColumnBody {
 public:
  CapColumnBody(const ContactAngle& angle, double lambda) : angle_(angle), lambda_(lambda) {
    angle.require_obtuse("CapColumnBody");
    if (!(lambda >= 1.0))
      throw std::invalid_argument("CapColumnBody: parameter must be >= 1, got " +
                                  std::to_string(lambda));
  }

  double lambda() const { return lambda_; }
  double theta() const { return angle_.theta(); }

  /// Support value in the unit direction (cos(phi), sin(phi)).
  double support_at_angle(double phi) const {
    double u2 = std::sin(phi);
    double ell = 1.0 - angle_.cos() * u2;
    return std::max(ell / lambda_, lambda_ * u2 + 1.0 / lambda_);
  }

  double support(const Vec& u) const {
    if (u.dim() != 2) throw std::invalid_argument("CapColumnBody: planar body");
    return support_at_angle(std::atan2(u[1], u[0]));
  }

  /// Exact area of the region above the hyperplane: the column and its
  /// half-disk roof contribute 2 + (pi/2 - 2|cos|)/lambda^2, the scaled
  /// cap foot below the disk-center height the rest.
  double area() const {
    double c = -angle_.cos();  // |cos(theta)|
    double extra = angle_.theta() + c * angle_.sin() - 2.0 * c;
    return 2.0 + extra / (lambda_ * lambda_);
  }

 private:
  ContactAngle angle_;
  double lambda_;
};

/// Ellipse segment: the region above the hyperplane bounded by the ellipse
/// with semi-axes (1/b, b) raised by c, where
///   eta = b^2 / sqrt(b^4 + tan^2(theta)),   c = eta b,
/// chosen so the ellipse meets the hyperplane at contact angle theta.  As
/// b grows the segment flattens toward a half-strip of area pi while its
/// support below the horizon collapses like b^{-3}, so the polar volume
/// (and the product) blows up like b^6.
class EllipseSegmentBody {
 public:
  EllipseSegmentBody(const ContactAngle& angle, double b) : angle_(angle), b_(b) {
    angle.require_obtuse("EllipseSegmentBody");
    if (!(b >= 1.0))
      throw std::invalid_argument("EllipseSegmentBody: parameter must be >= 1, got " +
                                  std::to_string(b));
    a_ = 1.0 / b;
    double t = std::tan(angle.theta());
    double b4t2 = b * b * b * b + t * t;
    eta_ = b * b / std::sqrt(b4t2);
    c_ = eta_ * b;
    bb_minus_cc_ = b * b * t * t / b4t2;  // b^2 - c^2 without cancellation

    // Consistency of the closed-form parameters: the contact slope
    // recomputed from (a, b, c) at the hyperplane must reproduce theta.
    double cos_rec = -a_ * c_ / std::sqrt(b * b * b * b + (a_ * a_ - b * b) * c_ * c_);
    if (std::fabs(cos_rec - angle.cos()) > 1e-10)
      throw std::logic_error("EllipseSegmentBody: contact-angle reconstruction drifted");
  }

  double b() const { return b_; }
  double a() const { return a_; }
  double eta() const { return eta_; }
  double lift() const { return c_; }
  double theta() const { return angle_.theta(); }

  /// Support value in the unit direction (cos(psi), sin(psi)):
  ///   h(psi) = c sin(psi) + sqrt(a^2 cos^2 + b^2 sin^2).
  /// Below the horizon the two terms cancel to O(b^{-3}); the difference
  /// is rationalized so the value stays accurate to machine precision
  /// (b^2 - c^2 is carried in closed form).
  double support_at_angle(double psi) const {
    double s = std::sin(psi), co = std::cos(psi);
    double g = a_ * a_ * co * co + b_ * b_ * s * s;
    if (s >= 0.0) return c_ * s + std::sqrt(g);
    double num = a_ * a_ * co * co + bb_minus_cc_ * s * s;
    return num / (std::sqrt(g) - c_ * s);
  }

  double support(const Vec& u) const {
    if (u.dim() != 2) throw std::invalid_argument("EllipseSegmentBody: planar body");
    return support_at_angle(std::atan2(u[1], u[0]));
  }

  /// Exact area of the segment above the hyperplane:
  ///   pi/2 + asin(eta) + eta sqrt(1 - eta^2).
  /// Always > pi/2, increasing in b, and -> pi as b -> infinity.
  double area() const {
    return 0.5 * std::numbers::pi + std::asin(eta_) + eta_ * std::sqrt(1.0 - eta_ * eta_);
  }

 private:
  ContactAngle angle_;
  double b_;
  double a_ = 0.0;
  double eta_ = 0.0;
  double c_ = 0.0;
  double bb_minus_cc_ = 0.0;
};

struct FamilyRow {
  double param = 0.0;
  double vol_hat = 0.0;
  double vol_polar = 0.0;
  double product = 0.0;
};

struct FamilyTable {
  std::string family;
  double theta = 0.0;
  int resolution = 0;
  std::vector<FamilyRow> rows;
};

namespace detail {

/// Polar-dual volume (1/2) * integral of ell^3 / h^2 over the obtuse
/// normal cap, on composite Gauss panels broken at the horizon directions
/// phi = 0, pi and geometrically graded into them: both families are
/// analytic away from the horizon, where one support has a kink and the
/// other a thin layer.
inline double arc_polar_volume(const std::function<double(double)>& support_at,
                               const ContactAngle& angle, int panels_per_piece,
                               int grading_depth) {
  double lo = 0.5 * std::numbers::pi - angle.theta();
  double hi = 0.5 * std::numbers::pi + angle.theta();
  std::vector<double> interior;
  for (double brk : {0.0, std::numbers::pi})
    if (brk > lo && brk < hi) interior.push_back(brk);
  Gauss1D g = composite_gauss(graded_breakpoints(lo, hi, interior, grading_depth),
                              panels_per_piece, 4);
  double acc = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) {
    double ell = 1.0 - angle.cos() * std::sin(g.x[i]);
    double h = support_at(g.x[i]);
    if (!(h > 0.0))
      throw std::runtime_error("arc_polar_volume: nonpositive support at angle " +
                               std::to_string(g.x[i]));
    acc += g.w[i] * ell * ell * ell / (h * h);
  }
  return 0.5 * acc;
}

inline int panels_from_resolution(int resolution) {
  if (resolution < 4)
    throw std::invalid_argument("family table: resolution must be >= 4");
  return resolution / 4;
}

}  // namespace detail

/// Product table for the capped-column family over the given parameters.
inline FamilyTable cap_column_family(const ContactAngle& angle,
                                     const std::vector<double>& lambdas, int resolution) {
  int panels = detail::panels_from_resolution(resolution);
  FamilyTable t;
  t.family = "cap_column";
  t.theta = angle.theta();
  t.resolution = resolution;
  for (double lam : lambdas) {
    CapColumnBody body(angle, lam);
    FamilyRow r;
    r.param = lam;
    r.vol_hat = body.area();
    r.vol_polar = detail::arc_polar_volume(
        [&](double phi) { return body.support_at_angle(phi); }, angle, panels, 14);
    r.product = r.vol_hat * r.vol_polar;
    t.rows.push_back(r);
  }
  return t;
}

/// Product table for the ellipse-segment family over the given parameters.
inline FamilyTable ellipse_segment_family(const ContactAngle& angle,
                                          const std::vector<double>& bs, int resolution) {
  int panels = detail::panels_from_resolution(resolution);
  FamilyTable t;
  t.family = "ellipse_segment";
  t.theta = angle.theta();
  t.resolution = resolution;
  for (double b : bs) {
    EllipseSegmentBody body(angle, b);
    FamilyRow r;
    r.param = b;
    r.vol_hat = body.area();
    r.vol_polar = detail::arc_polar_volume(
        [&](double psi) { return body.support_at_angle(psi); }, angle, panels, 14);
    r.product = r.vol_hat * r.vol_polar;
    t.rows.push_back(r);
  }
  return t;
}

inline bool strictly_increasing_products(const FamilyTable& t) {
  for (size_t i = 1; i < t.rows.size(); ++i)
    if (!(t.rows[i].product > t.rows[i - 1].product)) return false;
  return true;
}

/// Least-squares slope of log(product) against log(param), restricted to
/// the top decade of parameters (the asymptotic regime).
inline double product_growth_exponent(const FamilyTable& t) {
  double pmax = 0.0;
  for (const FamilyRow& r : t.rows) pmax = std::max(pmax, r.param);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const FamilyRow& r : t.rows) {
    if (r.param < 0.1 * pmax || !(r.product > 0.0)) continue;
    double x = std::log(r.param), y = std::log(r.product);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("product_growth_exponent: need >= 2 usable rows");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace capvol
