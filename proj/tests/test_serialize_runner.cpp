#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "capvol/runner.hpp"

using namespace capvol;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("capvol_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("Body JSON round-trips byte for byte across every kind") {
  std::vector<Body> bodies;
  bodies.push_back(Body::ball(3, 0.8, "round"));
  bodies.push_back(Body::box(Vec{1.0, 0.5}, "slab"));
  bodies.push_back(Body::ellipsoid(Vec{0.7, 1.9, 1.1}));
  bodies.push_back(Body::lp_ball(2, 1.5, 2.0));
  bodies.push_back(Body::lp_ball(2, std::numeric_limits<double>::infinity()));
  bodies.push_back(Body::double_cap(2, ContactAngle(kPi / 3), 1.5));
  bodies.push_back(Body::diag_scaled_cap(ContactAngle(kPi / 4), Vec{1.2, 0.9, 1.0}));
  bodies.push_back(Body::custom_radial(2, 4, [](const Vec& u) { return 1.0 + 0.1 * u[0] * u[0]; }));

  for (const Body& b : bodies) {
    OrderedJson j = body_to_json(b);
    Body back = body_from_json(j);
    CHECK(body_to_json(back).dump() == j.dump());
    CHECK(back.dim() == b.dim());
    CHECK(back.name() == b.name());
  }
}

TEST_CASE("Body JSON rejects malformed input") {
  CHECK_THROWS_AS(body_from_json(OrderedJson::parse(
                      R"({"kind":"torus","dim":2,"params":{}})")),
                  std::invalid_argument);
  // Parameter vector longer than the declared dimension.
  CHECK_THROWS_AS(body_from_json(OrderedJson::parse(
                      R"({"kind":"box","dim":2,"params":{"half_widths":[1,1,1]}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(body_from_json(OrderedJson::parse(
                      R"({"kind":"lp_ball","dim":2,"params":{"exponent":"sup","scale":1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(vec_from_json(OrderedJson::parse("[1]"), "probe"), std::invalid_argument);
  CHECK_THROWS_AS(vec_from_json(OrderedJson::parse("[1,2,3,4,5]"), "probe"),
                  std::invalid_argument);
}

TEST_CASE("Reports carry the pinned key order and schema version") {
  OrderedJson config;
  config["command"] = "probe";
  CheckResult c;
  c.name = "demo";
  c.samples = 3;
  c.worst_margin = 0.5;
  c.tolerance = 1e-6;
  c.pass = true;
  c.seed = 42;
  c.theta = kPi / 3;
  c.dim = 2;
  OrderedJson report = make_report(config, {c});

  std::vector<std::string> keys;
  for (auto it = report.begin(); it != report.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"config", "checks", "tables", "version"});
  CHECK(report["version"] == kReportVersion);
  CHECK(std::string(kReportVersion) == "1.0");

  std::vector<std::string> ckeys;
  for (auto it = report["checks"][0].begin(); it != report["checks"][0].end(); ++it)
    ckeys.push_back(it.key());
  CHECK(ckeys == std::vector<std::string>{"name", "samples", "worst_margin", "tolerance",
                                          "pass", "seed", "theta", "dim"});
}

TEST_CASE("CSV headers are pinned and fields are RFC-4180 quoted") {
  CHECK(volume_product_csv({}).rfind(
            "name,n,theta,vol_hat,vol_polar,product,bound,margin,resolution\n", 0) == 0);
  CHECK(checks_csv({}).rfind("name,dim,theta,samples,worst_margin,tolerance,pass,seed\n", 0) ==
        0);
  FamilyTable t;
  CHECK(family_csv(t).rfind("param,vol_hat,vol_polar,product\n", 0) == 0);

  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("Decimal rendering round-trips doubles exactly") {
  for (double v : {kPi, 0.1, 1e-17, -3.5e300, 2.0 / 3.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("SVG emitters are deterministic and validate their input") {
  PlotSeries s;
  s.label = "demo";
  s.x = {1.0, 2.0, 4.0};
  s.y = {1.0, 3.0, 9.5};
  std::string svg = svg_loglog_plot("growth", "param", "product", {s});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg == svg_loglog_plot("growth", "param", "product", {s}));

  PlotSeries bad = s;
  bad.y[1] = -3.0;
  CHECK_THROWS_AS(svg_loglog_plot("t", "x", "y", {bad}), std::invalid_argument);
  bad = s;
  bad.y.pop_back();
  CHECK_THROWS_AS(svg_loglog_plot("t", "x", "y", {bad}), std::invalid_argument);
  CHECK_THROWS_AS(svg_loglog_plot("t", "x", "y", {}), std::invalid_argument);

  std::vector<BarDatum> bars{{"alpha", 0.5}, {"beta", -1e-9}, {"gamma", 0.0}};
  std::string barsvg = svg_margin_bars("margins", bars);
  CHECK(barsvg.find("</svg>") != std::string::npos);
  CHECK(barsvg == svg_margin_bars("margins", bars));
}

TEST_CASE("Atomic writes land complete and leave no temporaries") {
  fs::path dir = fresh_dir("atomic");
  fs::path target = dir / "payload.txt";
  atomic_write_file(target, "first\n");
  atomic_write_file(target, "second\n");
  CHECK(slurp(target) == "second\n");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++entries;
    CHECK(e.path().filename() == "payload.txt");
  }
  CHECK(entries == 1);
  fs::remove_all(dir);
}

TEST_CASE("Runner commands reject invalid configurations") {
  RunConfig base;
  base.out_dir = fresh_dir("cfg");
  base.dims = {2};

  // Seeded commands demand an explicit seed.
  CHECK_THROWS_AS(run_verify(base), ConfigError);

  RunConfig seeded = base;
  seeded.seed = 7;
  seeded.has_seed = true;

  RunConfig obtuse = seeded;
  obtuse.thetas = {2.0 * kPi / 3.0};
  CHECK_THROWS_AS(run_verify(obtuse), ConfigError);

  RunConfig radial = seeded;
  radial.bodies.push_back(Body::custom_radial(2, 8, [](const Vec&) { return 1.0; }));
  CHECK_THROWS_AS(run_verify(radial), ConfigError);

  RunConfig acute_family = base;
  acute_family.thetas = {kPi / 3.0};
  CHECK_THROWS_AS(run_example1(acute_family), ConfigError);

  RunConfig small_param = base;
  small_param.lambdas = {0.5, 2.0};
  CHECK_THROWS_AS(run_example1(small_param), ConfigError);

  RunConfig bad_modes = seeded;
  bad_modes.modes = 0;
  CHECK_THROWS_AS(run_linearized(bad_modes), ConfigError);

  RunConfig bad_res = seeded;
  bad_res.resolution = 4;
  CHECK_THROWS_AS(run_verify(bad_res), ConfigError);

  fs::remove_all(base.out_dir);
}

TEST_CASE("A small verify run passes and reruns byte-identically") {
  RunConfig cfg;
  cfg.thetas = {kPi / 3.0};
  cfg.dims = {2};
  cfg.resolution = 16;
  cfg.samples = 20000;
  cfg.seed = 99;
  cfg.has_seed = true;
  cfg.write_csv = true;
  cfg.write_svg = true;

  cfg.out_dir = fresh_dir("verify_a");
  REQUIRE(run_verify(cfg) == 0);
  RunConfig again = cfg;
  again.out_dir = fresh_dir("verify_b");
  REQUIRE(run_verify(again) == 0);

  for (const char* name : {"verification_report.json", "volume_product.csv", "checks.csv",
                           "verification_margins.svg"}) {
    INFO("artifact " << name);
    CHECK(slurp(cfg.out_dir / name) == slurp(again.out_dir / name));
  }

  OrderedJson report = OrderedJson::parse(slurp(cfg.out_dir / "verification_report.json"));
  CHECK(report["config"]["command"] == "verify");
  CHECK(report["version"] == "1.0");
  CHECK(report["checks"].size() > 0);
  for (const auto& c : report["checks"]) CHECK(c["pass"].get<bool>());
  CHECK(report["tables"].contains("volume_product"));

  fs::remove_all(cfg.out_dir);
  fs::remove_all(again.out_dir);
}

TEST_CASE("Family and linearized runs write their artifacts and succeed") {
  RunConfig cfg;
  cfg.resolution = 16;
  cfg.lambdas = {1.0, 2.0, 4.0};
  cfg.b_values = {2.0, 4.0, 8.0};
  cfg.write_csv = true;
  cfg.write_svg = true;

  cfg.out_dir = fresh_dir("fam1");
  REQUIRE(run_example1(cfg) == 0);
  CHECK(fs::exists(cfg.out_dir / "example1_report.json"));
  CHECK(fs::exists(cfg.out_dir / "example1.csv"));
  CHECK(fs::exists(cfg.out_dir / "example1_product.svg"));
  OrderedJson rep1 = OrderedJson::parse(slurp(cfg.out_dir / "example1_report.json"));
  CHECK(rep1["tables"]["example1"]["rows"].size() == 3);
  fs::remove_all(cfg.out_dir);

  cfg.out_dir = fresh_dir("fam2");
  REQUIRE(run_example2(cfg) == 0);
  CHECK(fs::exists(cfg.out_dir / "example2_report.json"));
  OrderedJson rep2 = OrderedJson::parse(slurp(cfg.out_dir / "example2_report.json"));
  for (const auto& c : rep2["checks"]) CHECK(c["pass"].get<bool>());
  fs::remove_all(cfg.out_dir);

  RunConfig lin;
  lin.thetas = {kPi / 3.0};
  lin.dims = {2, 3};
  lin.seed = 5;
  lin.has_seed = true;
  lin.modes = 4;
  lin.out_dir = fresh_dir("lin");
  REQUIRE(run_linearized(lin) == 0);
  CHECK(fs::exists(lin.out_dir / "linearized_report.json"));
  fs::remove_all(lin.out_dir);
}
