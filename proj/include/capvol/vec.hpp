#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace capvol {

/// Small dense vector for ambient dimensions 2..4.  Value type, fixed
/// capacity, no allocation; the last component is the distinguished
/// axis direction (the one orthogonal to the supporting hyperplane).
class Vec {
 public:
  static constexpr int kMaxDim = 4;

  Vec() = default;
  explicit Vec(int n, double fill = 0.0) : n_(n) {
    check_dim(n);
    for (int i = 0; i < n; ++i) a_[i] = fill;
  }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    check_dim(n_);
    int i = 0;
    for (double v : xs) a_[i++] = v;
  }

  static Vec unit(int n, int axis) {
    Vec e(n, 0.0);
    e[axis] = 1.0;
    return e;
  }
  /// Unit vector along the distinguished (last) axis.
  static Vec axis(int n) { return unit(n, n - 1); }

  int dim() const { return n_; }
  double& operator[](int i) { return a_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return a_[static_cast<size_t>(i)]; }
  /// Component along the distinguished axis.
  double last() const { return a_[static_cast<size_t>(n_ - 1)]; }
  double& last() { return a_[static_cast<size_t>(n_ - 1)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) a_[i] += o.a_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) a_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator/(Vec a, double s) { return a *= 1.0 / s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  friend double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.n_; ++i) s += a.a_[i] * b.a_[i];
    return s;
  }

  double norm_sq() const { return dot(*this, *this); }
  double norm() const { return std::sqrt(norm_sq()); }
  /// Euclidean norm of the first dim()-1 components (the tangential part).
  double head_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_ - 1; ++i) s += a_[i] * a_[i];
    return std::sqrt(s);
  }

  Vec cwise_abs() const {
    Vec r = *this;
    for (int i = 0; i < n_; ++i) r.a_[i] = std::fabs(r.a_[i]);
    return r;
  }
  Vec cwise_sqrt() const {
    Vec r = *this;
    for (int i = 0; i < n_; ++i) r.a_[i] = std::sqrt(r.a_[i]);
    return r;
  }
  Vec cwise_mul(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < n_; ++i) r.a_[i] *= o.a_[i];
    return r;
  }

  bool all_positive() const {
    for (int i = 0; i < n_; ++i)
      if (!(a_[i] > 0.0)) return false;
    return true;
  }
  bool all_finite() const {
    for (int i = 0; i < n_; ++i)
      if (!std::isfinite(a_[i])) return false;
    return true;
  }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) s += (i ? ", " : "") + std::to_string(a_[i]);
    return s + ")";
  }

 private:
  static void check_dim(int n) {
    if (n < 2 || n > kMaxDim)
      throw std::invalid_argument("Vec: dimension must be in [2, " +
                                  std::to_string(kMaxDim) + "], got " +
                                  std::to_string(n));
  }
  std::array<double, kMaxDim> a_{};
  int n_ = 0;
};

}  // namespace capvol
