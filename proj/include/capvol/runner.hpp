#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "capvol/bodies.hpp"
#include "capvol/cap_geometry.hpp"
#include "capvol/families.hpp"
#include "capvol/functionals.hpp"
#include "capvol/linearized.hpp"
#include "capvol/serialize.hpp"
#include "capvol/verification.hpp"

// Command drivers behind the CLI: each validates its configuration, runs the
// job, writes the requested reports into the output directory, and returns a
// process exit code.  Contract: 0 all checks pass, 1 a check failed or a
// numeric precondition (such as positive support) was violated, 2 invalid
// configuration.  Every driver is deterministic given (config, seed); reports
// embed the configuration and carry no timestamps, so reruns are
// byte-identical.

namespace capvol {

/// Invalid configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<double> thetas;        // empty -> per-command default
  std::vector<int> dims = {2, 3};
  std::vector<Body> bodies;          // empty -> built-in catalog sweep
  int resolution = 0;                // 0 -> 64 (n=2) / 48 (n=3)
  std::int64_t samples = 0;          // 0 -> 1e6 (n=2) / 4e6 (n=3)
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::filesystem::path out_dir = ".";
  bool write_json = true;
  bool write_csv = false;
  bool write_svg = false;
  std::vector<double> lambdas = {1, 2, 4, 8, 16};    // column-family parameter list
  std::vector<double> b_values = {2, 4, 8, 16, 32};  // segment-family parameter list
  int modes = 8;                                     // seeded test functions per angle
};

namespace detail {

inline int resolution_for(const RunConfig& cfg, int n) {
  if (cfg.resolution > 0) return cfg.resolution;
  return n == 2 ? 64 : 48;
}

inline std::int64_t samples_for(const RunConfig& cfg, int n) {
  if (cfg.samples > 0) return cfg.samples;
  return n == 2 ? 1000000 : 4000000;
}

inline void require_seed(const RunConfig& cfg, const char* command) {
  if (!cfg.has_seed)
    throw ConfigError(std::string(command) +
                      ": --seed is required (the command runs Monte-Carlo or seeded checks)");
}

inline void require_dims(const RunConfig& cfg, const char* command) {
  if (cfg.dims.empty()) throw ConfigError(std::string(command) + ": at least one --dim required");
  for (int n : cfg.dims)
    if (n != 2 && n != 3)
      throw ConfigError(std::string(command) + ": dimension must be 2 or 3, got " +
                        std::to_string(n));
}

inline void require_resolution(const RunConfig& cfg, const char* command) {
  if (cfg.resolution != 0 && cfg.resolution < 8)
    throw ConfigError(std::string(command) + ": resolution must be at least 8, got " +
                      std::to_string(cfg.resolution));
}

inline std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

/// The built-in unconditional sweep catalog: ball, five box aspect ratios,
/// five ellipsoid aspect ratios, and four lp balls.
inline std::vector<Body> catalog_bodies(int n) {
  std::vector<Body> out;
  out.push_back(Body::ball(n, 1.0));
  const double aspects[5] = {0.5, 0.8, 1.0, 1.6, 2.5};
  for (double a : aspects) {
    Vec w(n);
    w[0] = 1.0;
    for (int i = 1; i < n; ++i) w[i] = a;
    out.push_back(Body::box(w, "box_1x" + short_double(a)));
    out.push_back(Body::ellipsoid(w, "ellipsoid_1x" + short_double(a)));
  }
  for (double p : {1.0, 1.5, 3.0}) out.push_back(Body::lp_ball(n, p, 1.0, "lp_p" + short_double(p)));
  out.push_back(Body::lp_ball(n, std::numeric_limits<double>::infinity(), 1.0, "lp_pinf"));
  return out;
}

inline OrderedJson config_to_json(const RunConfig& cfg, const char* command) {
  OrderedJson j;
  j["command"] = command;
  j["thetas"] = cfg.thetas;
  j["dims"] = cfg.dims;
  OrderedJson bj = OrderedJson::array();
  for (const Body& b : cfg.bodies) bj.push_back(body_to_json(b));
  j["bodies"] = std::move(bj);
  j["resolution"] = cfg.resolution;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["lambdas"] = cfg.lambdas;
  j["b_values"] = cfg.b_values;
  j["modes"] = cfg.modes;
  return j;
}

inline void write_report_files(const RunConfig& cfg, const std::string& stem,
                               const OrderedJson& report,
                               const std::vector<std::pair<std::string, std::string>>& csv_files,
                               const std::vector<std::pair<std::string, std::string>>& svg_files) {
  std::filesystem::create_directories(cfg.out_dir);
  if (cfg.write_json) atomic_write_file(cfg.out_dir / (stem + ".json"), report.dump(2) + "\n");
  if (cfg.write_csv)
    for (const auto& [name, content] : csv_files) atomic_write_file(cfg.out_dir / name, content);
  if (cfg.write_svg)
    for (const auto& [name, content] : svg_files) atomic_write_file(cfg.out_dir / name, content);
}

/// Fold the seeded cone-measure spectral-gap sweep on one arc grid into a
/// CheckResult: worst margin over `modes` seeded admissible functions.
inline CheckResult poincare_sweep_check(const ArcGrid& g, int modes, std::uint64_t seed) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < modes; ++k)
    worst = std::min(worst, cap_poincare_margin(g, random_neumann_function(g, salt(seed, k))));
  return finish_check("cap_poincare", modes, -worst, 1e-7, seed, g.angle.theta(), 2);
}

inline CheckResult poincare_sweep_check(const CapGrid3& g, double theta, int modes,
                                        std::uint64_t seed) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < modes; ++k)
    worst = std::min(worst, cap_poincare_margin(g, random_neumann_function(g, salt(seed, k))));
  return finish_check("cap_poincare", modes, -worst, 1e-7, seed, theta, 3);
}

/// Equality case of the spectral-gap inequality: constants give margin 0.
inline CheckResult poincare_constants_check(const ArcGrid& g, double theta) {
  std::vector<double> ones(g.phi.size(), 1.0);
  return finish_check("cap_poincare_constants", static_cast<int>(ones.size()),
                      std::fabs(cap_poincare_margin(g, ones)), 1e-10, 0, theta, 2);
}

inline CheckResult poincare_constants_check(const CapGrid3& g, double theta) {
  std::vector<double> ones(g.alpha.size() * g.nbeta, 1.0);
  return finish_check("cap_poincare_constants", static_cast<int>(ones.size()),
                      std::fabs(cap_poincare_margin(g, ones)), 1e-10, 0, theta, 3);
}

/// Agreement of the closed-form second variation with a centered five-point
/// finite difference of the product along psi, plus stationarity at the cap
/// itself (psi = ell): both variations vanish there.
inline CheckResult second_variation_check(const ArcGrid& g, double theta, int count,
                                          std::uint64_t seed) {
  const double t = 1e-3;
  const double tol = std::max(1e-4, 10.0 * t * t);
  double violation = 0.0;
  for (int k = 0; k < count; ++k) {
    std::vector<double> psi =
        admissible_from_neumann(g, random_neumann_function(g, salt(seed, 1000 + k)));
    violation = std::max(violation, std::fabs(product_second_variation(g, psi) -
                                              product_second_variation_fd(g, psi, t)));
  }
  return finish_check("second_variation_consistency", count, violation, tol, seed, theta, 2);
}

inline CheckResult stationarity_check(const ArcGrid& g, double theta) {
  const double t = 1e-3;
  double violation = std::max({std::fabs(product_first_variation_fd(g, g.ell, t)),
                               std::fabs(product_second_variation(g, g.ell)),
                               std::fabs(product_second_variation_fd(g, g.ell, t))});
  return finish_check("cap_stationarity", static_cast<int>(g.phi.size()), violation, 1e-8, 0,
                      theta, 2);
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

/// Console summary: one line overall, one line per failed check.
inline void print_summary(const char* command, const std::vector<CheckResult>& checks) {
  int failed = 0;
  for (const CheckResult& c : checks)
    if (!c.pass) ++failed;
  std::printf("%s: %d of %zu checks passed\n", command, static_cast<int>(checks.size()) - failed,
              checks.size());
  for (const CheckResult& c : checks)
    if (!c.pass)
      std::printf("  FAIL %s (n=%d, theta=%g): worst margin %.6e, tolerance %.1e\n",
                  c.name.c_str(), c.dim, c.theta, c.worst_margin, c.tolerance);
}

inline std::vector<BarDatum> margin_bars(const std::vector<CheckResult>& checks) {
  std::vector<BarDatum> bars;
  for (const CheckResult& c : checks)
    bars.push_back({c.name + " n=" + std::to_string(c.dim) + " theta=" + short_double(c.theta),
                    c.worst_margin});
  return bars;
}

}  // namespace detail

/// Full verification battery: closed-form consistency and concavity checks,
/// the Gaussian product inequality, the sharp volume-product sweep, and the
/// cone-measure spectral-gap sweep.  Writes verification_report.json (plus
/// optional CSV/SVG) and returns 0 iff every check passes.
inline int run_verify(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  detail::require_seed(cfg, "verify");
  detail::require_dims(cfg, "verify");
  detail::require_resolution(cfg, "verify");
  if (cfg.thetas.empty())
    cfg.thetas = {M_PI / 6.0, M_PI / 4.0, M_PI / 3.0, 0.49 * M_PI};
  for (double th : cfg.thetas)
    if (!(th > 0.0 && th < M_PI / 2.0))
      throw ConfigError(
          "verify: the concavity and product-bound checks hold in the acute regime only "
          "(0 < theta < pi/2); got theta=" +
          detail::short_double(th));
  for (const Body& b : cfg.bodies)
    if (b.kind() == BodyKind::custom_radial)
      throw ConfigError("verify: body \"" + b.name() +
                        "\" has no closed-form polar gauge; the Gaussian product check "
                        "supports catalog bodies only");

  std::vector<CheckResult> checks;
  std::vector<VolumeProductReport> products;
  for (int n : cfg.dims) {
    const int res = detail::resolution_for(cfg, n);
    const std::int64_t mc = detail::samples_for(cfg, n);
    std::vector<Body> bodies = cfg.bodies;
    if (bodies.empty()) bodies = detail::catalog_bodies(n);
    const double tol_bound = n == 2 ? 1e-6 : 1e-4;
    const double tol_eq = n == 2 ? 1e-8 : 1e-5;

    for (double th : cfg.thetas) {
      ContactAngle angle(th);
      checks.push_back(check_sqrt_concavity(n, angle, 500, detail::salt(cfg.seed, 11)));
      checks.push_back(check_conjugate_closed_forms(n, angle, 200, detail::salt(cfg.seed, 12)));
      checks.push_back(check_gradient_map(n, angle, 200, detail::salt(cfg.seed, 13)));
      checks.push_back(check_hessian_det_product(n, angle, 200, detail::salt(cfg.seed, 14)));
      checks.push_back(check_two_concavity(n, angle, 500, detail::salt(cfg.seed, 15)));
      checks.push_back(check_gaussian_cap_mass(n, angle, mc, detail::salt(cfg.seed, 16)));
      checks.push_back(check_gaussian_santalo(Body::ball(n, 1.0), angle, mc,
                                              detail::salt(cfg.seed, 17)));
      checks.push_back(check_gaussian_santalo(Body::lp_ball(n, INFINITY, 1.0, "box"), angle, mc,
                                              detail::salt(cfg.seed, 18)));
      checks.push_back(check_gaussian_santalo(Body::double_cap(n, angle), angle, mc,
                                              detail::salt(cfg.seed, 19), true));
      for (const Body& b : bodies) {
        if (b.dim() != n) continue;
        VolumeProductReport r = volume_product(b, angle, res);
        products.push_back(r);
        checks.push_back(check_product_bound(b, angle, res, tol_bound));
      }
      for (double scale : {0.5, 1.0, 3.0})
        checks.push_back(check_product_equality(n, angle, scale, res, tol_eq));

      if (n == 2) {
        ArcGrid grid(angle, std::max(res, 64));
        checks.push_back(detail::poincare_sweep_check(grid, 20, detail::salt(cfg.seed, 20)));
        checks.push_back(detail::poincare_constants_check(grid, th));
        checks.push_back(detail::second_variation_check(grid, th, 5, detail::salt(cfg.seed, 21)));
        checks.push_back(detail::stationarity_check(grid, th));
      } else {
        CapGrid3 grid(angle, 24);
        checks.push_back(detail::poincare_sweep_check(grid, th, 10, detail::salt(cfg.seed, 22)));
        checks.push_back(detail::poincare_constants_check(grid, th));
      }
    }
  }

  OrderedJson tables;
  OrderedJson prows = OrderedJson::array();
  for (const VolumeProductReport& r : products) prows.push_back(product_report_to_json(r));
  tables["volume_product"] = std::move(prows);
  OrderedJson report = make_report(detail::config_to_json(cfg, "verify"), checks, tables);
  detail::write_report_files(
      cfg, "verification_report", report,
      {{"volume_product.csv", volume_product_csv(products)}, {"checks.csv", checks_csv(checks)}},
      {{"verification_margins.svg",
        svg_margin_bars("verification margins", detail::margin_bars(checks))}});
  detail::print_summary("verify", checks);
  return detail::all_pass(checks) ? 0 : 1;
}

/// Volume products and margins for the requested bodies and angles.
inline int run_volume_product(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  detail::require_dims(cfg, "volume-product");
  detail::require_resolution(cfg, "volume-product");
  if (cfg.thetas.empty()) cfg.thetas = {M_PI / 6.0, M_PI / 4.0, M_PI / 3.0, 0.49 * M_PI};
  for (double th : cfg.thetas)
    if (!(th > 0.0 && th <= M_PI / 2.0))
      throw ConfigError(
          "volume-product: the product bound is stated for acute or right contact angles "
          "(0 < theta <= pi/2); got theta=" +
          detail::short_double(th));

  std::vector<VolumeProductReport> products;
  for (int n : cfg.dims) {
    const int res = detail::resolution_for(cfg, n);
    std::vector<Body> bodies = cfg.bodies;
    if (bodies.empty()) bodies = detail::catalog_bodies(n);
    for (double th : cfg.thetas) {
      ContactAngle angle(th);
      for (const Body& b : bodies) {
        if (b.dim() != n) continue;
        products.push_back(volume_product(b, angle, res));
      }
    }
  }

  std::vector<BarDatum> bars;
  for (const VolumeProductReport& r : products)
    bars.push_back({r.body_name + " n=" + std::to_string(r.dim) +
                        " theta=" + detail::short_double(r.theta),
                    r.margin});
  OrderedJson tables;
  OrderedJson prows = OrderedJson::array();
  for (const VolumeProductReport& r : products) prows.push_back(product_report_to_json(r));
  tables["volume_product"] = std::move(prows);
  OrderedJson report =
      make_report(detail::config_to_json(cfg, "volume-product"), {}, tables);
  detail::write_report_files(cfg, "volume_product_report", report,
                             {{"volume_product.csv", volume_product_csv(products)}},
                             {{"volume_product_margins.svg",
                               svg_margin_bars("volume product margins", bars)}});
  double worst = std::numeric_limits<double>::infinity();
  for (const VolumeProductReport& r : products) worst = std::min(worst, r.margin);
  std::printf("volume-product: %zu rows, worst margin %.6e\n", products.size(), worst);
  return 0;
}

namespace detail {

/// Shared driver for the two obtuse-angle families.
inline int run_family(const RunConfig& cfg, const char* command, bool column_family) {
  require_resolution(cfg, command);
  std::vector<double> thetas = cfg.thetas;
  if (thetas.empty()) thetas = {2.0 * M_PI / 3.0};
  for (double th : thetas)
    if (!(th > M_PI / 2.0 && th < M_PI))
      throw ConfigError(std::string(command) +
                        ": the divergent families live in the obtuse regime "
                        "(pi/2 < theta < pi); got theta=" +
                        short_double(th));
  const std::vector<double>& params = column_family ? cfg.lambdas : cfg.b_values;
  const double param_floor = 1.0;
  for (double p : params)
    if (!(p >= param_floor))
      throw ConfigError(std::string(command) + ": family parameter must be >= 1, got " +
                        short_double(p));
  const int res = cfg.resolution > 0 ? cfg.resolution : 64;

  std::vector<CheckResult> checks;
  OrderedJson tables;
  std::vector<std::pair<std::string, std::string>> csvs;
  std::vector<PlotSeries> series;
  for (double th : thetas) {
    ContactAngle angle(th);
    FamilyTable table = column_family ? cap_column_family(angle, params, res)
                                      : ellipse_segment_family(angle, params, res);
    double slope = product_growth_exponent(table);
    bool monotone = strictly_increasing_products(table);
    std::printf("%s theta=%.12g: fitted growth exponent %.4f, products %s\n", command, th, slope,
                monotone ? "strictly increasing" : "NOT strictly increasing");

    double mono_violation = 0.0;
    for (size_t i = 0; i + 1 < table.rows.size(); ++i)
      mono_violation =
          std::max(mono_violation, table.rows[i].product - table.rows[i + 1].product);
    checks.push_back(finish_check(std::string(command) + "_product_monotone",
                                  static_cast<int>(table.rows.size()), mono_violation, 0.0, 0,
                                  th, 2));
    if (!column_family) {
      // The segment family keeps at least the half-disk volume at every size.
      double floor_violation = 0.0;
      for (const FamilyRow& r : table.rows)
        floor_violation = std::max(floor_violation, M_PI / 2.0 - 1e-9 - r.vol_hat);
      checks.push_back(finish_check("segment_volume_floor",
                                    static_cast<int>(table.rows.size()), floor_violation, 0.0, 0,
                                    th, 2));
    }

    std::string suffix = thetas.size() > 1 ? "_theta" + short_double(th) : "";
    csvs.push_back({std::string(command) + suffix + ".csv", family_csv(table)});
    OrderedJson rows = OrderedJson::array();
    for (const FamilyRow& r : table.rows) {
      OrderedJson row;
      row["param"] = r.param;
      row["vol_hat"] = r.vol_hat;
      row["vol_polar"] = r.vol_polar;
      row["product"] = r.product;
      rows.push_back(std::move(row));
    }
    OrderedJson tj;
    tj["family"] = table.family;
    tj["theta"] = th;
    tj["resolution"] = table.resolution;
    tj["growth_exponent"] = slope;
    tj["rows"] = std::move(rows);
    tables[std::string(command) + suffix] = std::move(tj);

    PlotSeries s;
    s.label = "theta=" + short_double(th);
    for (const FamilyRow& r : table.rows) {
      s.x.push_back(r.param);
      s.y.push_back(r.product);
    }
    series.push_back(std::move(s));
  }

  OrderedJson report = make_report(config_to_json(cfg, command), checks, tables);
  write_report_files(cfg, std::string(command) + "_report", report, csvs,
                     {{std::string(command) + "_product.svg",
                       svg_loglog_plot(std::string(command) + " volume product growth",
                                       "family parameter", "volume product", series)}});
  return all_pass(checks) ? 0 : 1;
}

}  // namespace detail

/// Obtuse-regime family built from a shrunken cap and a tall thin column;
/// its volume product grows without bound in the column height.
inline int run_example1(const RunConfig& cfg) { return detail::run_family(cfg, "example1", true); }

/// Obtuse-regime family of shallow ellipse segments; its volume product
/// grows without bound in the ellipse aspect ratio.
inline int run_example2(const RunConfig& cfg) { return detail::run_family(cfg, "example2", false); }

/// Spectral-gap and second-variation checks on the cap grids.
inline int run_linearized(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  detail::require_seed(cfg, "linearized");
  detail::require_dims(cfg, "linearized");
  detail::require_resolution(cfg, "linearized");
  if (cfg.thetas.empty()) cfg.thetas = {M_PI / 6.0, M_PI / 3.0, 0.45 * M_PI};
  for (double th : cfg.thetas)
    if (!(th > 0.0 && th < M_PI / 2.0))
      throw ConfigError(
          "linearized: the spectral-gap inequality is verified in the acute regime "
          "(0 < theta < pi/2); got theta=" +
          detail::short_double(th));
  if (cfg.modes < 1) throw ConfigError("linearized: --modes must be at least 1");

  std::vector<CheckResult> checks;
  for (double th : cfg.thetas) {
    ContactAngle angle(th);
    for (int n : cfg.dims) {
      if (n == 2) {
        ArcGrid grid(angle, cfg.resolution > 0 ? cfg.resolution : 64);
        checks.push_back(detail::poincare_sweep_check(grid, cfg.modes,
                                                      detail::salt(cfg.seed, 31)));
        checks.push_back(detail::poincare_constants_check(grid, th));
        checks.push_back(detail::second_variation_check(grid, th, 5,
                                                        detail::salt(cfg.seed, 32)));
        checks.push_back(detail::stationarity_check(grid, th));
      } else {
        CapGrid3 grid(angle, cfg.resolution > 0 ? cfg.resolution : 24);
        checks.push_back(detail::poincare_sweep_check(grid, th, cfg.modes,
                                                      detail::salt(cfg.seed, 33)));
        checks.push_back(detail::poincare_constants_check(grid, th));
      }
    }
  }

  OrderedJson report = make_report(detail::config_to_json(cfg, "linearized"), checks);
  detail::write_report_files(cfg, "linearized_report", report,
                             {{"checks.csv", checks_csv(checks)}},
                             {{"linearized_margins.svg",
                               svg_margin_bars("spectral-gap margins",
                                               detail::margin_bars(checks))}});
  detail::print_summary("linearized", checks);
  return detail::all_pass(checks) ? 0 : 1;
}

}  // namespace capvol
