#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "capvol/cap_geometry.hpp"
#include "capvol/quadrature.hpp"
#include "capvol/rng.hpp"
#include "capvol/vec.hpp"

// Catalog of unconditional convex bodies (invariant under all coordinate
// sign flips): closed-form support function, gauge, and volume per kind,
// plus custom star bodies given by radial samples on a full-sphere mesh.
// Bodies are value types, immutable after construction.

namespace capvol {

enum class BodyKind { ball, box, ellipsoid, lp_ball, double_cap, diag_scaled_cap, custom_radial };

inline const char* body_kind_name(BodyKind k) {
  switch (k) {
    case BodyKind::ball: return "ball";
    case BodyKind::box: return "box";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::lp_ball: return "lp_ball";
    case BodyKind::double_cap: return "double_cap";
    case BodyKind::diag_scaled_cap: return "diag_scaled_cap";
    case BodyKind::custom_radial: return "custom_radial";
  }
  return "?";
}

class Body {
 public:
  static Body ball(int n, double radius, std::string name = "ball") {
    require_positive(radius, "ball radius");
    Body b(BodyKind::ball, n, std::move(name));
    b.scalar_ = radius;
    return b;
  }

  static Body box(const Vec& half_widths, std::string name = "box") {
    require_positive_vec(half_widths, "box half-widths");
    Body b(BodyKind::box, half_widths.dim(), std::move(name));
    b.diag_ = half_widths;
    return b;
  }

  static Body ellipsoid(const Vec& semi_axes, std::string name = "ellipsoid") {
    require_positive_vec(semi_axes, "ellipsoid semi-axes");
    Body b(BodyKind::ellipsoid, semi_axes.dim(), std::move(name));
    b.diag_ = semi_axes;
    return b;
  }

  /// Unit ball of the l^p norm, scaled; p in [1, inf] (pass
  /// std::numeric_limits<double>::infinity() for the cube).
  static Body lp_ball(int n, double p, double scale = 1.0, std::string name = "lp_ball") {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_ball: exponent must be >= 1");
    require_positive(scale, "lp_ball scale");
    Body b(BodyKind::lp_ball, n, std::move(name));
    b.p_ = p;
    b.scalar_ = scale;
    return b;
  }

  /// The doubled cap body itself (cap region plus its mirror image), scaled.
  static Body double_cap(int n, const ContactAngle& angle, double scale = 1.0,
                         std::string name = "double_cap") {
    angle.require_acute_or_right("double_cap");
    require_positive(scale, "double_cap scale");
    if (n != 2 && n != 3) throw std::invalid_argument("double_cap: dimension must be 2 or 3");
    Body b(BodyKind::double_cap, n, std::move(name));
    b.theta_ = angle.theta();
    b.scalar_ = scale;
    return b;
  }

  /// Image of the doubled cap under a positive diagonal map.
  static Body diag_scaled_cap(const ContactAngle& angle, const Vec& diag,
                              std::string name = "diag_scaled_cap") {
    angle.require_acute_or_right("diag_scaled_cap");
    require_positive_vec(diag, "diag_scaled_cap diagonal");
    if (diag.dim() != 2 && diag.dim() != 3)
      throw std::invalid_argument("diag_scaled_cap: dimension must be 2 or 3");
    Body b(BodyKind::diag_scaled_cap, diag.dim(), std::move(name));
    b.theta_ = angle.theta();
    b.diag_ = diag;
    return b;
  }

  /// Star body from radial samples on the uniform full-sphere mesh of the
  /// given resolution.  Values are read at each node's canonical mirror
  /// representative, so the stored body is unconditional by construction.
  static Body custom_radial(int n, int resolution, const std::function<double(const Vec&)>& rho,
                            std::string name = "custom_radial") {
    Body b = custom_radial_shell(n, resolution, std::move(name));
    std::vector<double> values(b.mesh_.nodes.size());
    for (size_t i = 0; i < values.size(); ++i)
      values[i] = rho(b.mesh_.nodes[b.canonical_node(static_cast<int>(i))]);
    b.set_radial(values);
    return b;
  }

  /// Same, from an explicit per-node value list (mesh node order).
  static Body custom_radial_from_values(int n, int resolution, const std::vector<double>& values,
                                        std::string name = "custom_radial") {
    Body b = custom_radial_shell(n, resolution, std::move(name));
    if (values.size() != b.mesh_.nodes.size())
      throw std::invalid_argument("custom_radial: expected " +
                                  std::to_string(b.mesh_.nodes.size()) + " radial values, got " +
                                  std::to_string(values.size()));
    std::vector<double> mirrored(values.size());
    for (size_t i = 0; i < values.size(); ++i)
      mirrored[i] = values[static_cast<size_t>(b.canonical_node(static_cast<int>(i)))];
    b.set_radial(mirrored);
    return b;
  }

  BodyKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double scale() const { return scalar_; }
  double exponent() const { return p_; }
  double theta() const { return theta_; }
  const Vec& diagonal() const { return diag_; }
  int mesh_resolution() const { return mesh_res_; }
  const std::vector<double>& radial_values() const { return radial_; }

  /// Support function h(y) = max over the body of <point, y>.
  double support(const Vec& y) const {
    check_point(y);
    switch (kind_) {
      case BodyKind::ball:
        return scalar_ * y.norm();
      case BodyKind::box:
        return dot(diag_, y.cwise_abs());
      case BodyKind::ellipsoid:
        return std::sqrt(dot(diag_.cwise_mul(diag_), y.cwise_mul(y)));
      case BodyKind::lp_ball:
        return scalar_ * dual_lp_norm(y);
      case BodyKind::double_cap:
        return scalar_ * cap_support(y, ContactAngle(theta_));
      case BodyKind::diag_scaled_cap:
        return cap_support(diag_.cwise_mul(y), ContactAngle(theta_));
      case BodyKind::custom_radial: {
        double best = 0.0;
        for (size_t i = 0; i < mesh_.nodes.size(); ++i)
          best = std::max(best, radial_[i] * dot(mesh_.nodes[i], y));
        return best;
      }
    }
    return 0.0;
  }

  /// Gauge (Minkowski functional) p(y) = inf{t > 0 : y in t*body}.
  double gauge(const Vec& y) const {
    check_point(y);
    switch (kind_) {
      case BodyKind::ball:
        return y.norm() / scalar_;
      case BodyKind::box: {
        double m = 0.0;
        for (int i = 0; i < dim_; ++i) m = std::max(m, std::fabs(y[i]) / diag_[i]);
        return m;
      }
      case BodyKind::ellipsoid: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += (y[i] / diag_[i]) * (y[i] / diag_[i]);
        return std::sqrt(s);
      }
      case BodyKind::lp_ball:
        return lp_norm(y) / scalar_;
      case BodyKind::double_cap:
        return cap_gauge(y, ContactAngle(theta_)) / scalar_;
      case BodyKind::diag_scaled_cap: {
        Vec z(dim_);
        for (int i = 0; i < dim_; ++i) z[i] = y[i] / diag_[i];
        return cap_gauge(z, ContactAngle(theta_));
      }
      case BodyKind::custom_radial: {
        double r = y.norm();
        if (r == 0.0) return 0.0;
        return r / radial_at(y / r);
      }
    }
    return 0.0;
  }

  /// Exact volume for catalog kinds; radial-sample quadrature for custom
  /// bodies (first-order accurate in the mesh spacing squared).
  double volume() const {
    switch (kind_) {
      case BodyKind::ball:
        return ball_volume(dim_) * std::pow(scalar_, dim_);
      case BodyKind::box: {
        double v = std::pow(2.0, dim_);
        for (int i = 0; i < dim_; ++i) v *= diag_[i];
        return v;
      }
      case BodyKind::ellipsoid: {
        double v = ball_volume(dim_);
        for (int i = 0; i < dim_; ++i) v *= diag_[i];
        return v;
      }
      case BodyKind::lp_ball: {
        if (std::isinf(p_)) return std::pow(2.0 * scalar_, dim_);
        double v = std::pow(2.0 * scalar_, dim_);
        v *= std::pow(std::tgamma(1.0 + 1.0 / p_), dim_) / std::tgamma(1.0 + dim_ / p_);
        return v;
      }
      case BodyKind::double_cap:
        return 2.0 * std::pow(scalar_, dim_) * cap_region_volume(dim_, ContactAngle(theta_));
      case BodyKind::diag_scaled_cap: {
        double v = 2.0 * cap_region_volume(dim_, ContactAngle(theta_));
        for (int i = 0; i < dim_; ++i) v *= diag_[i];
        return v;
      }
      case BodyKind::custom_radial: {
        double v = 0.0;
        for (size_t i = 0; i < mesh_.nodes.size(); ++i)
          v += mesh_.weights[i] * std::pow(radial_[i], dim_);
        return v / dim_;
      }
    }
    return 0.0;
  }

  /// The body scaled by s > 0 (exact for every kind).
  Body scaled(double s) const {
    require_positive(s, "scale factor");
    Body b = *this;
    switch (kind_) {
      case BodyKind::ball:
      case BodyKind::lp_ball:
      case BodyKind::double_cap:
        b.scalar_ *= s;
        break;
      case BodyKind::box:
      case BodyKind::ellipsoid:
      case BodyKind::diag_scaled_cap:
        b.diag_ *= s;
        break;
      case BodyKind::custom_radial:
        for (double& r : b.radial_) r *= s;
        break;
    }
    return b;
  }

  /// Radius of the smallest origin-centered ball containing the body
  /// (exact per kind; used to match Monte-Carlo proposal scales).
  double outer_radius() const {
    switch (kind_) {
      case BodyKind::ball:
        return scalar_;
      case BodyKind::box:
        return diag_.norm();
      case BodyKind::ellipsoid: {
        double m = 0.0;
        for (int i = 0; i < dim_; ++i) m = std::max(m, diag_[i]);
        return m;
      }
      case BodyKind::lp_ball: {
        if (p_ <= 2.0) return scalar_;
        return scalar_ * std::pow(static_cast<double>(dim_), 0.5 - 1.0 / p_);
      }
      case BodyKind::double_cap: {
        ContactAngle a(theta_);
        return scalar_ * std::max(a.sin(), 1.0 - a.cos());
      }
      case BodyKind::diag_scaled_cap: {
        ContactAngle a(theta_);
        double m = 0.0;
        for (int i = 0; i < dim_; ++i) m = std::max(m, diag_[i]);
        return m * std::max(a.sin(), 1.0 - a.cos());
      }
      case BodyKind::custom_radial:
        return *std::max_element(radial_.begin(), radial_.end());
    }
    return 0.0;
  }

  /// Convexity probe.  Catalog kinds are convex by construction.  For
  /// radial bodies, each probe uses three mesh directions equally spaced
  /// along a great circle, where u(a-d) + u(a+d) = 2 cos(d) u(a): gauge
  /// subadditivity plus homogeneity then forces
  ///   g(a-d) + g(a+d) >= 2 cos(d) g(a)   with   g = 1/rho,
  /// and every term is an exact stored sample (no interpolation enters),
  /// so the tight slack absorbs only rounding.  A failure certifies
  /// non-convexity; a pass is a sampled necessary condition.
  bool is_convex(int extra_samples = 200, std::uint64_t seed = 12345) const {
    if (kind_ != BodyKind::custom_radial) return true;
    constexpr double kSlack = 1e-9;
    if (dim_ == 2) {
      int m = 4 * mesh_res_;
      double h = 2.0 * std::numbers::pi / m;
      auto probe = [&](int j, int k) {
        double g_lo = 1.0 / radial_[((j - k) % m + m) % m];
        double g_hi = 1.0 / radial_[(j + k) % m];
        double g_mid = 1.0 / radial_[j];
        return g_lo + g_hi >= 2.0 * std::cos(k * h) * g_mid - kSlack * g_mid;
      };
      for (int j = 0; j < m; ++j)
        if (!probe(j, 1)) return false;
      Rng rng(seed);
      int k_max = std::max(2, m / 4 - 1);
      for (int s = 0; s < extra_samples; ++s) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
        int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(k_max));
        if (!probe(j, k)) return false;
      }
      return true;
    }
    int ma = 2 * mesh_res_, mb = detail::azimuth_count(mesh_res_);
    double ha = std::numbers::pi / ma;
    // Signed polar index folded across the poles onto the opposite azimuth,
    // so triples centered near a pole stay on one great circle.
    auto meridian_node = [&](int i, int j) {
      if (i < 0) return (-i - 1) * mb + (j + mb / 2) % mb;
      if (i >= ma) return (2 * ma - 1 - i) * mb + (j + mb / 2) % mb;
      return i * mb + j;
    };
    auto probe = [&](int i, int j, int k) {
      double g_lo = 1.0 / radial_[meridian_node(i - k, j)];
      double g_hi = 1.0 / radial_[meridian_node(i + k, j)];
      double g_mid = 1.0 / radial_[i * mb + j];
      return g_lo + g_hi >= 2.0 * std::cos(k * ha) * g_mid - kSlack * g_mid;
    };
    for (int i = 0; i < ma; ++i)
      for (int j = 0; j < mb; ++j)
        if (!probe(i, j, 1)) return false;
    Rng rng(seed);
    int k_max = std::max(2, ma / 2 - 1);
    for (int s = 0; s < extra_samples; ++s) {
      int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(ma));
      int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(mb));
      int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(k_max));
      if (!probe(i, j, k)) return false;
    }
    return true;
  }

 private:
  Body(BodyKind kind, int n, std::string name) : kind_(kind), dim_(n), name_(std::move(name)) {
    if (n < 2 || n > Vec::kMaxDim)
      throw std::invalid_argument("Body: dimension must be in [2, " +
                                  std::to_string(Vec::kMaxDim) + "], got " + std::to_string(n));
  }

  static Body custom_radial_shell(int n, int resolution, std::string name) {
    Body b(BodyKind::custom_radial, n, std::move(name));
    if (n != 2 && n != 3)
      throw std::invalid_argument("custom_radial: dimension must be 2 or 3");
    b.mesh_ = sphere_rule(n, resolution);
    b.mesh_res_ = resolution;
    return b;
  }

  void set_radial(std::vector<double> values) {
    for (double v : values)
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("custom_radial: radial values must be positive and finite");
    radial_ = std::move(values);
  }

  static void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(what) + " must be positive, got " +
                                  std::to_string(v));
  }
  static void require_positive_vec(const Vec& v, const char* what) {
    if (!v.all_positive() || !v.all_finite())
      throw std::invalid_argument(std::string(what) + " must be positive, got " + v.str());
  }
  void check_point(const Vec& y) const {
    if (y.dim() != dim_)
      throw std::invalid_argument("Body '" + name_ + "': expected dimension " +
                                  std::to_string(dim_) + ", got point " + y.str());
  }

  double lp_norm(const Vec& y) const {
    if (std::isinf(p_)) {
      double m = 0.0;
      for (int i = 0; i < dim_; ++i) m = std::max(m, std::fabs(y[i]));
      return m;
    }
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::pow(std::fabs(y[i]), p_);
    return std::pow(s, 1.0 / p_);
  }
  double dual_lp_norm(const Vec& y) const {
    if (p_ == 1.0) {
      double m = 0.0;
      for (int i = 0; i < dim_; ++i) m = std::max(m, std::fabs(y[i]));
      return m;
    }
    if (std::isinf(p_)) {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += std::fabs(y[i]);
      return s;
    }
    double q = p_ / (p_ - 1.0);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::pow(std::fabs(y[i]), q);
    return std::pow(s, 1.0 / q);
  }

  /// Index of the node whose orbit under coordinate sign flips contains
  /// node i and that canonically represents the orbit (all radial reads go
  /// through the representative, enforcing unconditionality).
  int canonical_node(int i) const {
    if (dim_ == 2) {
      int m = 4 * mesh_res_;
      return canonical_angle_index(i, m);
    }
    int ma = 2 * mesh_res_, mb = detail::azimuth_count(mesh_res_);
    int ia = i / mb, jb = i % mb;
    int ia_c = std::min(ia, ma - 1 - ia);                // polar flip x_n -> -x_n
    return ia_c * mb + canonical_angle_index(jb, mb);    // azimuth flips
  }
  /// Orbit representative of a midpoint angle index under angle -> -angle
  /// and angle -> pi - angle (the two tangential sign flips).
  static int canonical_angle_index(int j, int m) {
    int best = j;
    int cands[3] = {(m - 1 - j) % m, ((m / 2 - 1 - j) % m + m) % m, (m / 2 + j) % m};
    for (int c : cands) best = std::min(best, c);
    return best;
  }

  /// Interpolated radial value at a unit direction: periodic linear in the
  /// angle (n = 2) or bilinear in (polar, azimuth) with clamped polar rings
  /// (n = 3).  Exact at mesh nodes.
  double radial_at(const Vec& u) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (dim_ == 2) {
      int m = 4 * mesh_res_;
      double h = two_pi / m;
      double phi = std::atan2(u[1], u[0]);
      if (phi < 0.0) phi += two_pi;
      double t = phi / h - 0.5;
      double fl = std::floor(t);
      int j0 = static_cast<int>(fl) % m;
      if (j0 < 0) j0 += m;
      int j1 = (j0 + 1) % m;
      double frac = t - fl;
      return (1.0 - frac) * radial_[j0] + frac * radial_[j1];
    }
    int ma = 2 * mesh_res_, mb = detail::azimuth_count(mesh_res_);
    double ha = std::numbers::pi / ma, hb = two_pi / mb;
    double alpha = std::acos(std::clamp(u[2], -1.0, 1.0));
    double beta = std::atan2(u[1], u[0]);
    if (beta < 0.0) beta += two_pi;
    double tb = beta / hb - 0.5;
    double flb = std::floor(tb);
    int j0 = static_cast<int>(flb) % mb;
    if (j0 < 0) j0 += mb;
    int j1 = (j0 + 1) % mb;
    double fb = tb - flb;
    double ta = std::clamp(alpha / ha - 0.5, 0.0, static_cast<double>(ma - 1));
    int i0 = std::min(static_cast<int>(ta), ma - 2);
    double fa = ta - i0;
    double v00 = radial_[i0 * mb + j0], v01 = radial_[i0 * mb + j1];
    double v10 = radial_[(i0 + 1) * mb + j0], v11 = radial_[(i0 + 1) * mb + j1];
    return (1.0 - fa) * ((1.0 - fb) * v00 + fb * v01) + fa * ((1.0 - fb) * v10 + fb * v11);
  }

  BodyKind kind_;
  int dim_;
  std::string name_;
  double scalar_ = 1.0;
  double p_ = 2.0;
  double theta_ = 0.0;
  Vec diag_;
  QuadratureRule mesh_;
  std::vector<double> radial_;
  int mesh_res_ = 0;
};

/// Per-axis contact-angle defect of a diagonally scaled cap: the scaled cap
/// meets the hyperplane at the prescribed angle along the i-th tangential
/// axis iff cos^2(theta) + (a_n^2/a_i^2) sin^2(theta) - 1 vanishes, i.e.
/// iff a_i = a_n.
struct CapillaryDefect {
  bool capillary = true;
  std::vector<double> defects;  // one per tangential axis
};

inline CapillaryDefect is_theta_capillary(const Vec& diag, const ContactAngle& angle) {
  if (!diag.all_positive())
    throw std::invalid_argument("is_theta_capillary: diagonal must be positive");
  CapillaryDefect r;
  double an = diag.last();
  for (int i = 0; i + 1 < diag.dim(); ++i) {
    double ratio = an / diag[i];
    double d = angle.cos() * angle.cos() + ratio * ratio * angle.sin() * angle.sin() - 1.0;
    r.defects.push_back(d);
    if (std::fabs(d) > 1e-12) r.capillary = false;
  }
  return r;
}

/// A convex body paired with a contact angle: the upper boundary of the
/// body is read as a capillary hypersurface over the hyperplane, and its
/// capillary support function at a cap point with unit normal x is the
/// ordinary support value h(x).
struct CapillaryBody {
  Body base;
  ContactAngle angle;

  CapillaryBody(Body b, const ContactAngle& a) : base(std::move(b)), angle(a) {}
};

inline double capillary_support(const CapillaryBody& cb, const CapPoint& p) {
  return cb.base.support(p.x);
}
inline double capillary_support(const CapillaryBody& cb, const Vec& x_unit) {
  return cb.base.support(x_unit);
}

}  // namespace capvol
