// Command-line driver: verification suites, volume products, the two
// divergent obtuse-angle families, and the spectral-gap checks, with JSON /
// CSV / SVG report emission.  Exit codes: 0 all checks passed, 1 a check
// failed or a numeric precondition was violated, 2 usage or configuration
// error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capvol/runner.hpp"
#include "capvol/serialize.hpp"

namespace {

using capvol::Body;
using capvol::ConfigError;
using capvol::OrderedJson;
using capvol::RunConfig;

/// Angles are radians; the four named fractions of pi are parsed exactly to
/// avoid decimal truncation at the regime boundaries.
double parse_theta(const std::string& s) {
  if (s == "pi/6") return M_PI / 6.0;
  if (s == "pi/4") return M_PI / 4.0;
  if (s == "pi/3") return M_PI / 3.0;
  if (s == "pi/2") return M_PI / 2.0;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size())
    throw ConfigError("--theta: expected radians or one of pi/6, pi/4, pi/3, pi/2; got \"" + s +
                      "\"");
  return v;
}

/// A --body value is either a catalog keyword (instantiated at unit size for
/// every requested dimension) or an inline JSON body spec with explicit dim.
std::vector<Body> parse_body(const std::string& s, const std::vector<int>& dims) {
  std::vector<Body> out;
  if (!s.empty() && s.front() == '{') {
    out.push_back(capvol::body_from_json(OrderedJson::parse(s)));
    return out;
  }
  for (int n : dims) {
    if (s == "ball")
      out.push_back(Body::ball(n, 1.0));
    else if (s == "box")
      out.push_back(Body::lp_ball(n, std::numeric_limits<double>::infinity(), 1.0, "box"));
    else if (s == "ellipsoid") {
      capvol::Vec a(n);
      a[0] = 1.0;
      for (int i = 1; i < n; ++i) a[i] = 2.0;
      out.push_back(Body::ellipsoid(a));
    } else if (s == "lp1")
      out.push_back(Body::lp_ball(n, 1.0, 1.0, "lp1"));
    else if (s == "lp3")
      out.push_back(Body::lp_ball(n, 3.0, 1.0, "lp3"));
    else
      throw ConfigError("--body: expected inline JSON or one of ball, box, ellipsoid, lp1, "
                        "lp3; got \"" +
                        s + "\"");
  }
  return out;
}

std::vector<Body> load_bodies_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--bodies-file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  OrderedJson doc = OrderedJson::parse(ss.str());
  std::vector<Body> out;
  if (doc.is_array())
    for (const OrderedJson& j : doc) out.push_back(capvol::body_from_json(j));
  else
    out.push_back(capvol::body_from_json(doc));
  return out;
}

struct CliOptions {
  std::vector<std::string> thetas;
  std::vector<int> dims;
  std::vector<std::string> bodies;
  std::string bodies_file;
  int resolution = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::vector<std::string> formats = {"json"};
  std::vector<double> lambdas;
  std::vector<double> b_values;
  int modes = 8;
};

void add_common_flags(CLI::App* cmd, CliOptions& o, bool& seed_given) {
  cmd->add_option("--theta", o.thetas,
                  "Contact angle(s) in radians; pi/6, pi/4, pi/3, pi/2 parsed exactly")
      ->delimiter(',');
  cmd->add_option("--dim", o.dims, "Ambient dimension(s), 2 or 3")->delimiter(',');
  cmd->add_option("--body", o.bodies,
                  "Body: catalog keyword or inline JSON spec (repeatable)");
  cmd->add_option("--bodies-file", o.bodies_file, "JSON file with one body spec or an array");
  cmd->add_option("--resolution", o.resolution, "Quadrature / grid resolution (>= 8)");
  cmd->add_option("--samples", o.samples, "Monte-Carlo sample count");
  cmd->add_option("--seed", o.seed, "Root seed for all randomized checks")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  cmd->add_option("--out", o.out_dir, "Output directory for reports");
  cmd->add_option("--format", o.formats, "Report formats: json, csv, svg")->delimiter(',');
}

RunConfig build_config(const CliOptions& o, bool seed_given) {
  RunConfig cfg;
  for (const std::string& s : o.thetas) cfg.thetas.push_back(parse_theta(s));
  if (!o.dims.empty()) cfg.dims = o.dims;
  std::vector<int> dims_for_bodies = cfg.dims;
  for (const std::string& s : o.bodies)
    for (Body& b : parse_body(s, dims_for_bodies)) cfg.bodies.push_back(std::move(b));
  if (!o.bodies_file.empty())
    for (Body& b : load_bodies_file(o.bodies_file)) cfg.bodies.push_back(std::move(b));
  cfg.resolution = o.resolution;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  cfg.has_seed = seed_given;
  cfg.out_dir = o.out_dir;
  cfg.write_json = cfg.write_csv = cfg.write_svg = false;
  for (const std::string& f : o.formats) {
    if (f == "json")
      cfg.write_json = true;
    else if (f == "csv")
      cfg.write_csv = true;
    else if (f == "svg")
      cfg.write_svg = true;
    else
      throw ConfigError("--format: expected json, csv, or svg; got \"" + f + "\"");
  }
  if (!o.lambdas.empty()) cfg.lambdas = o.lambdas;
  if (!o.b_values.empty()) cfg.b_values = o.b_values;
  cfg.modes = o.modes;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp volume-product bound for capillary bodies: verification and experiments"};
  app.require_subcommand(1);

  CliOptions opt;
  bool seed_given = false;

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the full randomized verification battery and write a JSON report");
  add_common_flags(verify, opt, seed_given);

  CLI::App* vp = app.add_subcommand(
      "volume-product", "Volume products and bound margins for a body sweep");
  add_common_flags(vp, opt, seed_given);

  CLI::App* ex1 = app.add_subcommand(
      "example1", "Obtuse-regime cap-plus-column family with divergent volume product");
  add_common_flags(ex1, opt, seed_given);
  ex1->add_option("--lambda", opt.lambdas, "Column heights (>= 1)")->delimiter(',');

  CLI::App* ex2 = app.add_subcommand(
      "example2", "Obtuse-regime ellipse-segment family with divergent volume product");
  add_common_flags(ex2, opt, seed_given);
  ex2->add_option("--b", opt.b_values, "Ellipse major semi-axes (>= 1)")->delimiter(',');

  CLI::App* lin = app.add_subcommand(
      "linearized", "Spectral-gap and second-variation checks on the cap grids");
  add_common_flags(lin, opt, seed_given);
  lin->add_option("--modes", opt.modes, "Seeded test functions per angle");

  try {
    app.parse(argc, argv);
    RunConfig cfg = build_config(opt, seed_given);
    if (verify->parsed()) return capvol::run_verify(cfg);
    if (vp->parsed()) return capvol::run_volume_product(cfg);
    if (ex1->parsed()) return capvol::run_example1(cfg);
    if (ex2->parsed()) return capvol::run_example2(cfg);
    if (lin->parsed()) return capvol::run_linearized(cfg);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
