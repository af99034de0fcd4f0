#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "capvol/bodies.hpp"
#include "capvol/cap_geometry.hpp"
#include "capvol/quadrature.hpp"
#include "capvol/rng.hpp"

using namespace capvol;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Vec random_direction(Rng& rng, int n) {
  while (true) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = rng.normal();
    if (u.norm() > 1e-3) return u / u.norm();
  }
}

/// Quarter-area quadrature oracle for the planar p-ball: 4 int_0^1
/// (1 - t^p)^(1/p) dt, on panels graded geometrically toward the vertical
/// tangent at t = 1.
double lp_area_oracle(double p) {
  std::vector<double> pts{0.0, 1.0};
  for (int d = 1; d <= 40; ++d) pts.push_back(1.0 - std::pow(0.5, d));
  std::sort(pts.begin(), pts.end());
  auto g = composite_gauss(pts, 1, 12);
  double s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i)
    s += g.w[i] * std::pow(1.0 - std::pow(g.x[i], p), 1.0 / p);
  return 4.0 * s;
}

}  // namespace

TEST_CASE("Support closed forms: box, ball, and p-balls") {
  Body box = Body::box(Vec{1.0, 2.0});
  Vec u{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  CHECK(box.support(u) == Approx(3.0 / std::sqrt(2.0)).margin(1e-15));

  Body ball = Body::ball(3, 1.0);
  Rng rng(50);
  for (int s = 0; s < 30; ++s) CHECK(ball.support(random_direction(rng, 3)) == Approx(1.0));

  // Support of the p-ball is the dual q-norm.
  Body p15 = Body::lp_ball(2, 1.5);
  CHECK(p15.support(Vec{3.0, 4.0}) ==
        Approx(std::pow(std::pow(3.0, 3.0) + std::pow(4.0, 3.0), 1.0 / 3.0)).margin(1e-12));
}

TEST_CASE("Gauge and support swap under polarity pairs") {
  Rng rng(51);
  Body box = Body::box(Vec{1.0, 1.0, 1.0});
  Body cross = Body::lp_ball(3, 1.0);
  Body e = Body::ellipsoid(Vec{0.5, 1.25, 2.0});
  Body epolar = Body::ellipsoid(Vec{2.0, 0.8, 0.5});
  Body p3 = Body::lp_ball(2, 3.0);
  Body q15 = Body::lp_ball(2, 1.5);
  for (int s = 0; s < 100; ++s) {
    Vec y3 = rng.uniform(0.2, 2.0) * random_direction(rng, 3);
    CHECK(box.support(y3) == Approx(cross.gauge(y3)).epsilon(1e-10));
    CHECK(e.support(y3) == Approx(epolar.gauge(y3)).epsilon(1e-10));
    Vec y2 = rng.uniform(0.2, 2.0) * random_direction(rng, 2);
    CHECK(p3.support(y2) == Approx(q15.gauge(y2)).epsilon(1e-10));
  }
}

TEST_CASE("The doubled cap body reproduces the closed cap formulas") {
  for (int n : {2, 3}) {
    for (double th : {kPi / 6, kPi / 3, 0.49 * kPi}) {
      ContactAngle angle(th);
      Body cap = Body::double_cap(n, angle);

      // Self-support: on every quadrature node of the cap the support is
      // exactly 1 - cos(theta) x_n.
      QuadratureRule rule = cap_rule(n, angle, 16);
      for (const Vec& x : rule.nodes)
        CHECK(cap.support(x) == Approx(1.0 - angle.cos() * x.last()).margin(1e-12));

      Rng rng(52);
      for (int s = 0; s < 100; ++s) {
        Vec y = rng.uniform(0.1, 3.0) * random_direction(rng, n);
        CHECK(cap.gauge(y) == Approx(cap_gauge(y, angle)).epsilon(1e-12).margin(1e-14));
        CHECK(cap.support(y) == Approx(cap_support(y, angle)).epsilon(1e-12).margin(1e-14));
      }

      // A scaled copy scales the support linearly and the gauge inversely.
      Body big = Body::double_cap(n, angle, 2.5);
      Vec probe = random_direction(rng, n);
      CHECK(big.support(probe) == Approx(2.5 * cap.support(probe)).epsilon(1e-13));
      CHECK(big.gauge(probe) == Approx(cap.gauge(probe) / 2.5).epsilon(1e-13));
    }
  }
}

TEST_CASE("Volumes: closed forms and a quadrature oracle for p-balls") {
  CHECK(Body::ball(2, 1.0).volume() == Approx(kPi).margin(1e-14));
  CHECK(Body::ball(3, 2.0).volume() == Approx(32.0 * kPi / 3.0).epsilon(1e-14));
  CHECK(Body::box(Vec{1.0, 1.0}).volume() == Approx(4.0).margin(1e-14));
  CHECK(Body::box(Vec{0.5, 1.5, 2.0}).volume() == Approx(12.0).margin(1e-12));
  CHECK(Body::ellipsoid(Vec{0.5, 2.0}).volume() == Approx(kPi).margin(1e-14));
  CHECK(Body::ellipsoid(Vec{0.5, 1.0, 1.5}).volume() == Approx(kPi).margin(1e-13));

  for (double p : {1.0, 1.5, 3.0}) {
    CHECK(Body::lp_ball(2, p).volume() == Approx(lp_area_oracle(p)).epsilon(1e-6));
  }
  CHECK(Body::lp_ball(2, std::numeric_limits<double>::infinity()).volume() ==
        Approx(4.0).margin(1e-12));
  CHECK(Body::lp_ball(2, 2.0, 3.0).volume() == Approx(9.0 * kPi).epsilon(1e-13));

  for (int n : {2, 3}) {
    ContactAngle angle(kPi / 3);
    CHECK(Body::double_cap(n, angle).volume() ==
          Approx(2.0 * cap_region_volume(n, angle)).epsilon(1e-14));
    CHECK(Body::double_cap(n, angle, 2.0).volume() ==
          Approx(std::pow(2.0, n) * 2.0 * cap_region_volume(n, angle)).epsilon(1e-13));
  }
  ContactAngle angle(kPi / 4);
  CHECK(Body::diag_scaled_cap(angle, Vec{1.5, 0.5, 2.0}).volume() ==
        Approx(1.5 * 0.5 * 2.0 * 2.0 * cap_region_volume(3, angle)).epsilon(1e-13));
}

TEST_CASE("Radial bodies: exact round volume and kinked refinement order") {
  // A constant radial profile integrates to the disk area exactly at any
  // resolution (the mesh weights carry the full measure).
  Body disk = Body::custom_radial(2, 16, [](const Vec&) { return 1.0; });
  CHECK(disk.volume() == Approx(kPi).margin(1e-12));
  Body shell3 = Body::custom_radial(3, 12, [](const Vec&) { return 1.0; });
  CHECK(shell3.volume() == Approx(4.0 * kPi / 3.0).margin(1e-10));

  // A profile with corners refines at the mesh's declared second order.
  auto rho = [](const Vec& u) { return 1.0 + 0.3 * std::fabs(u[0]); };
  double ref = Body::custom_radial(2, 4096, rho).volume();
  std::vector<double> res{8, 16, 32, 64}, err;
  for (double r : res)
    err.push_back(std::fabs(Body::custom_radial(2, static_cast<int>(r), rho).volume() - ref));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < res.size(); ++i) {
    double lx = std::log(res[i]), ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double slope = (res.size() * sxy - sx * sy) / (res.size() * sxx - sx * sx);
  CHECK(-slope > 1.5);
}

TEST_CASE("Radial bodies are unconditional and deterministic by construction") {
  auto rho = [](const Vec& u) { return 1.0 + 0.2 * u[0] * u[0] + 0.1 * std::fabs(u.last()); };
  Body a = Body::custom_radial(2, 24, rho);
  Body b = Body::custom_radial(2, 24, rho);
  CHECK(a.radial_values() == b.radial_values());

  Rng rng(53);
  for (int s = 0; s < 100; ++s) {
    Vec u = random_direction(rng, 2);
    Vec m{-u[0], u[1]};
    CHECK(a.support(u) == Approx(a.support(m)).margin(1e-14));
    CHECK(a.gauge(u) == Approx(a.gauge(m)).margin(1e-14));
  }
}

TEST_CASE("Convexity probe accepts convex profiles and flags a dent") {
  CHECK(Body::ball(2, 1.0).is_convex());
  CHECK(Body::box(Vec{1.0, 2.0}).is_convex());

  Body round = Body::custom_radial(2, 64, [](const Vec&) { return 1.0; });
  CHECK(round.is_convex());
  Body boxish = Body::custom_radial(2, 64, [](const Vec& u) {
    return 1.0 / std::max(std::fabs(u[0]), std::fabs(u[1]));
  });
  CHECK(boxish.is_convex());

  Body dented = Body::custom_radial(2, 64, [](const Vec& u) {
    return 1.0 - 0.4 * std::exp(-30.0 * (1.0 - u[0] * u[0]));
  });
  CHECK_FALSE(dented.is_convex());
}

TEST_CASE("Scaling is exact for every kind") {
  std::vector<Body> bodies;
  bodies.push_back(Body::ball(2, 1.3));
  bodies.push_back(Body::box(Vec{1.0, 0.5}));
  bodies.push_back(Body::ellipsoid(Vec{0.7, 1.9}));
  bodies.push_back(Body::lp_ball(2, 3.0));
  bodies.push_back(Body::double_cap(2, ContactAngle(kPi / 3)));
  bodies.push_back(Body::diag_scaled_cap(ContactAngle(kPi / 3), Vec{1.2, 0.9}));
  bodies.push_back(Body::custom_radial(2, 16, [](const Vec& u) { return 1.0 + 0.1 * u[0] * u[0]; }));

  Rng rng(54);
  for (const Body& b : bodies) {
    Body s = b.scaled(1.7);
    CHECK(s.volume() == Approx(1.7 * 1.7 * b.volume()).epsilon(1e-12));
    for (int k = 0; k < 20; ++k) {
      Vec u = random_direction(rng, 2);
      CHECK(s.support(u) == Approx(1.7 * b.support(u)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Outer radius bounds the body and is attained") {
  std::vector<Body> bodies;
  bodies.push_back(Body::ball(3, 0.8));
  bodies.push_back(Body::box(Vec{1.0, 2.0, 0.5}));
  bodies.push_back(Body::ellipsoid(Vec{0.7, 1.9}));
  bodies.push_back(Body::lp_ball(2, 1.0));
  bodies.push_back(Body::lp_ball(2, std::numeric_limits<double>::infinity(), 1.5));
  bodies.push_back(Body::double_cap(2, ContactAngle(kPi / 3), 2.0));
  bodies.push_back(Body::double_cap(3, ContactAngle(kPi / 6)));
  bodies.push_back(Body::diag_scaled_cap(ContactAngle(kPi / 3), Vec{1.2, 0.9}));

  Rng rng(55);
  for (const Body& b : bodies) {
    double r = b.outer_radius();
    double seen = 0.0;
    for (int k = 0; k < 4000; ++k) {
      Vec u = random_direction(rng, b.dim());
      double boundary = 1.0 / b.gauge(u);
      CHECK(boundary <= r * (1.0 + 1e-9));
      seen = std::max(seen, boundary);
    }
    CHECK(seen == Approx(r).epsilon(2e-2));
  }
}

TEST_CASE("Capillary support of a box matches vertex enumeration") {
  ContactAngle angle(kPi / 3);
  CapillaryBody cb(Body::box(Vec{0.7, 1.2}), angle);
  QuadratureRule rule = cap_rule(2, angle, 32);
  for (const Vec& x : rule.nodes) {
    double best = -1e300;
    for (double s0 : {-0.7, 0.7})
      for (double s1 : {-1.2, 1.2}) best = std::max(best, s0 * x[0] + s1 * x[1]);
    CHECK(capillary_support(cb, x) == Approx(best).margin(1e-14));
  }

  CapillaryBody cb3(Body::box(Vec{0.5, 1.0, 0.8}), angle);
  QuadratureRule rule3 = cap_rule(3, angle, 12);
  for (const Vec& x : rule3.nodes) {
    double best = -1e300;
    for (double s0 : {-0.5, 0.5})
      for (double s1 : {-1.0, 1.0})
        for (double s2 : {-0.8, 0.8})
          best = std::max(best, s0 * x[0] + s1 * x[1] + s2 * x[2]);
    CHECK(capillary_support(cb3, x) == Approx(best).margin(1e-14));
  }

  // The cap-point overload reads the same support value.
  CapPoint p = CapPoint::from_normal(Vec{0.0, 1.0}, angle);
  CHECK(capillary_support(cb, p) == Approx(1.2).margin(1e-14));
}

TEST_CASE("Contact-angle defect of diagonal scalings") {
  ContactAngle third(kPi / 3);
  CapillaryDefect even = is_theta_capillary(Vec{2.0, 2.0, 2.0}, third);
  CHECK(even.capillary);
  for (double d : even.defects) CHECK(std::fabs(d) < 1e-12);

  CapillaryDefect skew = is_theta_capillary(Vec{1.0, 2.0}, third);
  CHECK_FALSE(skew.capillary);
  REQUIRE(skew.defects.size() == 1);
  CHECK(skew.defects[0] == Approx(2.25).margin(1e-12));

  CapillaryDefect quarter = is_theta_capillary(Vec{1.0, 1.0}, ContactAngle(kPi / 4));
  CHECK(quarter.capillary);

  CHECK_THROWS_AS(is_theta_capillary(Vec{1.0, -1.0}, third), std::invalid_argument);
}

TEST_CASE("Constructors and evaluators reject invalid input") {
  CHECK_THROWS_AS(Body::ball(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Body::ball(5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Body::box(Vec{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Body::ellipsoid(Vec{1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Body::lp_ball(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Body::double_cap(2, ContactAngle(2.0 * kPi / 3)), std::domain_error);
  CHECK_THROWS_AS(Body::double_cap(4, ContactAngle(kPi / 3)), std::invalid_argument);
  CHECK_THROWS_AS(Body::diag_scaled_cap(ContactAngle(kPi / 3), Vec{0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Body::custom_radial(4, 16, [](const Vec&) { return 1.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(Body::custom_radial(2, 16, [](const Vec&) { return -1.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(Body::custom_radial_from_values(2, 16, {1.0, 2.0, 3.0}),
                  std::invalid_argument);

  Body ball = Body::ball(2, 1.0);
  CHECK_THROWS_AS(ball.support(Vec{1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ball.gauge(Vec{1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("Explicit radial values honor the mirrored mesh order") {
  Body shell = Body::custom_radial(2, 8, [](const Vec& u) { return 1.0 + 0.25 * u[0] * u[0]; });
  Body copy = Body::custom_radial_from_values(2, 8, shell.radial_values());
  CHECK(copy.radial_values() == shell.radial_values());
  CHECK(copy.volume() == Approx(shell.volume()).epsilon(1e-15));
}
