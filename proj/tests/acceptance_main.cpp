// Acceptance gate for the capillary volume-product library.  Each numbered
// criterion checks one headline property end to end, prints a single
// [PASS]/[FAIL] line with its runtime, and the process exits with the
// number of failed criteria.  Tolerances and budgets are pinned here on
// purpose: editing them is a visible act.

#include "capvol/finite_diff.hpp"
#include "capvol/linearized.hpp"
#include "capvol/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace capvol;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

int failures = 0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& out, bool ok, const std::string& what) {
  if (ok) return;
  out.pass = false;
  if (!out.detail.empty()) out.detail += "; ";
  out.detail += what;
}

void criterion(int id, const char* label, double budget_s,
               const std::function<void(Outcome&)>& body) {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    require(out, false, std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs >= budget_s)
    require(out, false, "runtime " + num(secs) + " s exceeds " + num(budget_s) + " s budget");
  std::printf("[%s] criterion %2d: %s (%.2f s%s)%s%s\n", out.pass ? "PASS" : "FAIL", id, label,
              secs, budget_s > 0.0 ? (" / " + num(budget_s) + " s budget").c_str() : "",
              out.detail.empty() ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- 1. Scaled doubled caps attain the volume-product bound exactly. -------

void equality_case(Outcome& out) {
  for (double th : {kPi / 6, kPi / 3, 0.49 * kPi}) {
    ContactAngle a(th);
    for (double s : {0.5, 1.0, 3.0}) {
      VolumeProductReport r2 = volume_product(Body::double_cap(2, a, s), a, 64);
      require(out, std::fabs(r2.margin) <= 1e-8,
              "n=2 theta=" + num(th) + " scale=" + num(s) + " |margin|=" + num(r2.margin));
      VolumeProductReport r3 = volume_product(Body::double_cap(3, a, s), a, 48);
      require(out, std::fabs(r3.margin) <= 1e-5,
              "n=3 theta=" + num(th) + " scale=" + num(s) + " |margin|=" + num(r3.margin));
    }
  }
}

// --- 2. Catalog sweep: every body stays under the bound, non-caps strictly. -

void catalog_sweep(Outcome& out) {
  for (int n : {2, 3}) {
    int res = n == 2 ? 64 : 48;
    double tol = n == 2 ? 1e-6 : 1e-4;
    for (double th : {kPi / 6, kPi / 4, kPi / 3, 0.49 * kPi}) {
      ContactAngle a(th);
      for (const Body& b : detail::catalog_bodies(n)) {
        VolumeProductReport r = volume_product(b, a, res);
        require(out, r.margin >= -tol,
                b.name() + " n=" + std::to_string(n) + " theta=" + num(th) +
                    " margin=" + num(r.margin));
        require(out, r.margin > 1e-4,
                b.name() + " n=" + std::to_string(n) + " theta=" + num(th) +
                    " margin=" + num(r.margin) + " not strictly positive");
      }
    }
  }
}

// --- 3. Square-root reparametrization of the gauge potential: concave for
// acute angles, convex for obtuse ones (FD Hessian spectrum). ---------------

void sqrt_concavity(Outcome& out) {
  for (int n : {2, 3}) {
    for (double th : {kPi / 6, kPi / 3}) {
      CheckResult r = check_sqrt_concavity(n, ContactAngle(th), 500, 3001 + n);
      require(out, r.pass, "acute n=" + std::to_string(n) + " theta=" + num(th) +
                               " worst_margin=" + num(r.worst_margin));
    }
    CheckResult r = check_sqrt_concavity(n, ContactAngle(2 * kPi / 3), 500, 3101 + n);
    require(out, r.pass,
            "obtuse n=" + std::to_string(n) + " worst_margin=" + num(r.worst_margin));
  }
}

// --- 4. Support potential: closed Hessian determinant on the cap branch
// matches finite differences; the cylinder-branch gradient is the exact
// linear map sin^2(theta) (y', 0). ------------------------------------------

void conjugate_hessian(Outcome& out) {
  for (int n : {2, 3}) {
    for (double th : {kPi / 6, kPi / 3}) {
      ContactAngle a(th);
      Rng rng(4001, static_cast<std::uint64_t>(16 * n) + static_cast<std::uint64_t>(th * 8));
      auto spot = [&](const Vec& z) { return support_potential(z, a); };
      double worst_det = 0.0, worst_grad = 0.0;
      for (int s = 0; s < 200; ++s) {
        double phi = a.theta() * rng.uniform(0.05, 0.92);
        Vec y = detail::point_at_polar_angle(rng, n, phi, rng.uniform(0.3, 3.0));
        double closed = support_potential_hessian_det(y, a);
        double fd = determinant(fd_hessian(spot, y));
        worst_det = std::max(worst_det, std::fabs(fd - closed) / std::fabs(closed));

        double phic = a.theta() + (0.5 * kPi - a.theta()) * rng.uniform(0.08, 0.95);
        Vec yc = detail::point_at_polar_angle(rng, n, phic, rng.uniform(0.3, 3.0));
        Vec g = support_potential_gradient(yc, a);
        Vec want(n);
        for (int i = 0; i + 1 < n; ++i) want[i] = a.sin() * a.sin() * yc[i];
        want.last() = 0.0;
        worst_grad = std::max(worst_grad, (g - want).norm());
      }
      require(out, worst_det <= 1e-5, "n=" + std::to_string(n) + " theta=" + num(th) +
                                          " det rel err " + num(worst_det));
      require(out, worst_grad <= 1e-8, "n=" + std::to_string(n) + " theta=" + num(th) +
                                           " cylinder gradient err " + num(worst_grad));
    }
  }
}

// --- 5. Gradient-map duality: Hessian determinants multiply to one and the
// two gradients invert each other. -------------------------------------------

void gradient_duality(Outcome& out) {
  for (int n : {2, 3}) {
    for (double th : {kPi / 6, kPi / 3}) {
      ContactAngle a(th);
      CheckResult det = check_hessian_det_product(n, a, 200, 5001 + n);
      require(out, det.pass, "det product n=" + std::to_string(n) + " theta=" + num(th) +
                                 " worst_margin=" + num(det.worst_margin));
      CheckResult trip = check_gradient_map(n, a, 200, 5101 + n);
      require(out, trip.pass, "round trip n=" + std::to_string(n) + " theta=" + num(th) +
                                  " worst_margin=" + num(trip.worst_margin));
    }
  }
}

// --- 6. Gaussian form of the product inequality at theta = pi/3, n = 2:
// equality for the doubled cap within noise, strict slack for ball and box. --

void gaussian_inequality(Outcome& out) {
  const ContactAngle a(kPi / 3);
  const int n = 2;
  const std::int64_t samples = 1'000'000;
  double rhs = gaussian_cap_mass_closed_form(n, a);

  auto gap_and_se = [&](const Body& body, std::uint64_t seed) {
    McEstimate i1 = orthant_mc(
        n, [&](const Vec& y) { return std::exp(-0.5 * body.gauge(y) * body.gauge(y)); },
        samples, detail::salt(seed, 2), body.outer_radius());
    double min_axis = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) min_axis = std::min(min_axis, body.support(Vec::unit(n, i)));
    McEstimate i2 = orthant_mc(
        n,
        [&](const Vec& y) {
          double r = y.norm();
          if (y.last() <= r * a.cos()) return 0.0;
          double h = body.support(y);
          return std::exp(-0.5 * h * h) * std::pow(1.0 - a.cos() * y.last() / r, n + 1);
        },
        samples, detail::salt(seed, 3), std::sqrt(static_cast<double>(n)) / min_axis);
    double se = std::hypot(i2.value * i1.std_error, i1.value * i2.std_error);
    return std::pair<double, double>(i1.value * i2.value - rhs * rhs, se);
  };

  auto [cap_gap, cap_se] = gap_and_se(Body::double_cap(n, a), 6001);
  require(out, std::fabs(cap_gap) <= 3.0 * cap_se,
          "cap |gap|=" + num(std::fabs(cap_gap)) + " > 3se=" + num(3.0 * cap_se));

  Vec w(n);
  w[0] = w[1] = 1.0;
  for (const Body& body : {Body::ball(n, 1.0), Body::box(w)}) {
    auto [gap, se] = gap_and_se(body, 6002);
    require(out, -gap > 3.0 * se,
            body.name() + " slack=" + num(-gap) + " not beyond 3se=" + num(3.0 * se));
  }
}

// --- 7. Obtuse cap-column family: the volume product increases strictly in
// the height parameter and grows by at least a factor of ten. ----------------

void column_divergence(Outcome& out) {
  FamilyTable t = cap_column_family(ContactAngle(2 * kPi / 3), {1, 2, 4, 8, 16}, 64);
  require(out, strictly_increasing_products(t), "products not strictly increasing");
  double ratio = t.rows.back().product / t.rows.front().product;
  require(out, ratio >= 10.0, "growth ratio " + num(ratio) + " < 10");
}

// --- 8. Obtuse ellipse-segment family: enclosed volume never drops below the
// half-disk, and products increase with a clearly positive log-log slope. ----

void segment_divergence(Outcome& out) {
  FamilyTable t = ellipse_segment_family(ContactAngle(2 * kPi / 3), {2, 4, 8, 16, 32}, 64);
  for (const FamilyRow& r : t.rows)
    require(out, r.vol_hat >= 0.5 * kPi - 1e-9,
            "b=" + num(r.param) + " vol_hat=" + num(r.vol_hat) + " below half-disk");
  require(out, strictly_increasing_products(t), "products not strictly increasing");
  double slope = product_growth_exponent(t);
  require(out, slope >= 0.8, "log-log slope " + num(slope) + " < 0.8");
}

// --- 9. Spectral gap of the centro-affine operator under the cone measure:
// nonnegative quadratic form on Neumann functions, zero exactly at constants.

void spectral_gap(Outcome& out) {
  for (double th : {kPi / 6, kPi / 3, 0.45 * kPi}) {
    ArcGrid g(ContactAngle(th), 64);
    std::vector<double> ones(g.ell.size(), 1.0);
    double at_const = cap_poincare_margin(g, ones);
    require(out, std::fabs(at_const) <= 1e-10,
            "theta=" + num(th) + " constant margin " + num(at_const));
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 20; ++s)
      worst = std::min(worst, cap_poincare_margin(g, random_neumann_function(g, 9100 + s)));
    require(out, worst >= -1e-7, "theta=" + num(th) + " worst margin " + num(worst));
  }
}

// --- 10. Second variation of the product along admissible perturbations:
// closed formula against a five-point stencil, both zero at the cap itself. --

void second_variation(Outcome& out) {
  const double t_step = 1e-3;
  const double tol = std::max(1e-4, 10.0 * t_step * t_step);
  for (double th : {kPi / 6, kPi / 3, 0.45 * kPi}) {
    ArcGrid g(ContactAngle(th), 64);
    for (int s = 0; s < 5; ++s) {
      std::vector<double> psi = admissible_from_neumann(g, random_neumann_function(g, 9200 + s));
      double closed = product_second_variation(g, psi);
      double fd = product_second_variation_fd(g, psi, t_step);
      require(out, std::fabs(closed - fd) <= tol,
              "theta=" + num(th) + " seed=" + std::to_string(9200 + s) + " |closed-fd|=" +
                  num(std::fabs(closed - fd)));
    }
    double at_cap = product_second_variation(g, g.ell);
    double at_cap_fd = product_second_variation_fd(g, g.ell, t_step);
    require(out, std::fabs(at_cap) <= 1e-8, "theta=" + num(th) + " closed at cap " + num(at_cap));
    require(out, std::fabs(at_cap_fd) <= 1e-8,
            "theta=" + num(th) + " stencil at cap " + num(at_cap_fd));
  }
}

// --- 11. Moment and entropy bounds for volume-normalized boxes and
// ellipsoids at theta = pi/3, with strictly positive margins. ----------------

void moment_bounds(Outcome& out) {
  const ContactAngle a(kPi / 3);
  const double aspects[5] = {0.5, 0.8, 1.0, 1.6, 2.5};
  for (int n : {2, 3}) {
    int res = n == 2 ? 64 : 48;
    double vc = cap_region_volume(n, a);
    for (int i = 0; i < 5; ++i) {
      Vec w(n);
      w[0] = 1.0;
      for (int d = 1; d < n; ++d) w[d] = aspects[i];
      Body raw = (i % 2 == 0) ? Body::box(w) : Body::ellipsoid(w);
      Body body = raw.scaled(std::pow(vc / upper_volume(raw), 1.0 / n));
      for (double p : {-0.5, -1.0, -1.5}) {
        CheckResult r = check_moment_bound(body, a, res, p);
        require(out, r.pass && r.worst_margin > 1e-6,
                raw.name() + " n=" + std::to_string(n) + " p=" + num(p) + " margin=" +
                    num(r.worst_margin));
      }
      CheckResult lg = check_log_moment_bound(body, a, res);
      require(out, lg.pass && lg.worst_margin > 1e-6,
              raw.name() + " n=" + std::to_string(n) + " log margin=" + num(lg.worst_margin));
    }
  }
}

// --- 12. Determinism: the verify pipeline is byte-identical across reruns
// with the same seed. ---------------------------------------------------------

void deterministic_reports(Outcome& out) {
  fs::path base = fs::temp_directory_path();
  fs::path d1 = base / "capvol_acceptance_rep1";
  fs::path d2 = base / "capvol_acceptance_rep2";
  fs::remove_all(d1);
  fs::remove_all(d2);

  RunConfig cfg;
  cfg.thetas = {kPi / 3};
  cfg.dims = {2};
  cfg.resolution = 16;
  cfg.samples = 20000;
  cfg.seed = 7;
  cfg.has_seed = true;
  cfg.out_dir = d1;
  require(out, run_verify(cfg) == 0, "first verify run failed");
  cfg.out_dir = d2;
  require(out, run_verify(cfg) == 0, "second verify run failed");

  std::string r1 = slurp(d1 / "verification_report.json");
  std::string r2 = slurp(d2 / "verification_report.json");
  require(out, !r1.empty(), "report missing or empty");
  require(out, r1 == r2, "reports differ between reruns");
  fs::remove_all(d1);
  fs::remove_all(d2);
}

}  // namespace

int main() {
  std::printf("capillary volume-product acceptance battery\n");
  criterion(1, "scaled caps attain the volume-product bound", 5.0, equality_case);
  criterion(2, "catalog sweep stays under the bound, strictly for non-caps", 60.0,
            catalog_sweep);
  criterion(3, "sqrt reparametrization is concave (acute) / convex (obtuse)", 10.0,
            sqrt_concavity);
  criterion(4, "conjugate Hessian determinant and cylinder-branch gradient", 10.0,
            conjugate_hessian);
  criterion(5, "Hessian determinant reciprocity and gradient round trip", 5.0,
            gradient_duality);
  criterion(6, "Gaussian product inequality: cap equality, ball/box slack", 30.0,
            gaussian_inequality);
  criterion(7, "cap-column family diverges: increasing products, ratio >= 10", 10.0,
            column_divergence);
  criterion(8, "ellipse-segment family diverges with volume floor", 10.0, segment_divergence);
  criterion(9, "cone-measure spectral gap: nonnegative margins, zero at constants", 10.0,
            spectral_gap);
  criterion(10, "second variation matches five-point stencil, zero at the cap", 20.0,
            second_variation);
  criterion(11, "moment and entropy bounds for normalized boxes/ellipsoids", 10.0,
            moment_bounds);
  criterion(12, "verify reruns with one seed are byte-identical", 0.0, deterministic_reports);
  std::printf("acceptance: %d of 12 criteria passed\n", 12 - failures);
  return failures;
}
