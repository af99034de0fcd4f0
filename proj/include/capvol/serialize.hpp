#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "capvol/bodies.hpp"
#include "capvol/families.hpp"
#include "capvol/functionals.hpp"
#include "capvol/vec.hpp"
#include "capvol/verification.hpp"

// Serialization and report emission.  All writers are deterministic: keys
// appear in fixed insertion order, numbers are printed with round-trippable
// precision, and no timestamps or environment data are embedded, so a rerun
// with the same configuration and seed produces byte-identical files.

namespace capvol {

/// Insertion-ordered JSON value; the only JSON type used for output.
using OrderedJson = nlohmann::ordered_json;

/// Report schema version; bump when a column set or key layout changes.
inline constexpr const char* kReportVersion = "1.0";

/// Round-trippable decimal rendering used for CSV and SVG cells.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Quote a CSV field only when it contains a delimiter, quote, or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q += c;
  }
  q += '"';
  return q;
}

inline OrderedJson vec_to_json(const Vec& v) {
  OrderedJson a = OrderedJson::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const OrderedJson& a, const std::string& what) {
  if (!a.is_array() || a.size() < 2 || a.size() > static_cast<size_t>(Vec::kMaxDim))
    throw std::invalid_argument(what + ": expected an array of 2 to " +
                                std::to_string(Vec::kMaxDim) + " numbers");
  Vec v(static_cast<int>(a.size()));
  for (int i = 0; i < v.dim(); ++i) v[i] = a.at(static_cast<size_t>(i)).get<double>();
  return v;
}

/// Body spec as JSON: {"kind": ..., "dim": n, "params": {...}, "name": ...}.
inline OrderedJson body_to_json(const Body& b) {
  OrderedJson j;
  j["kind"] = body_kind_name(b.kind());
  j["dim"] = b.dim();
  OrderedJson p = OrderedJson::object();
  switch (b.kind()) {
    case BodyKind::ball:
      p["radius"] = b.scale();
      break;
    case BodyKind::box:
      p["half_widths"] = vec_to_json(b.diagonal());
      break;
    case BodyKind::ellipsoid:
      p["semi_axes"] = vec_to_json(b.diagonal());
      break;
    case BodyKind::lp_ball:
      if (std::isinf(b.exponent()))
        p["exponent"] = "inf";
      else
        p["exponent"] = b.exponent();
      p["scale"] = b.scale();
      break;
    case BodyKind::double_cap:
      p["theta"] = b.theta();
      p["scale"] = b.scale();
      break;
    case BodyKind::diag_scaled_cap:
      p["theta"] = b.theta();
      p["diagonal"] = vec_to_json(b.diagonal());
      break;
    case BodyKind::custom_radial:
      p["resolution"] = b.mesh_resolution();
      p["values"] = b.radial_values();
      break;
  }
  j["params"] = std::move(p);
  j["name"] = b.name();
  return j;
}

/// Inverse of body_to_json.  Unknown kinds and malformed fields raise
/// std::invalid_argument (nlohmann access errors derive from it too).
inline Body body_from_json(const OrderedJson& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  const OrderedJson& p = j.at("params");
  const std::string name = j.contains("name") ? j.at("name").get<std::string>() : kind;

  auto require_dim = [&](const Vec& v, const char* field) {
    if (v.dim() != dim)
      throw std::invalid_argument("body \"" + name + "\": " + field + " has " +
                                  std::to_string(v.dim()) + " entries but dim is " +
                                  std::to_string(dim));
    return v;
  };

  if (kind == "ball") return Body::ball(dim, p.at("radius").get<double>(), name);
  if (kind == "box")
    return Body::box(require_dim(vec_from_json(p.at("half_widths"), "half_widths"),
                                 "half_widths"),
                     name);
  if (kind == "ellipsoid")
    return Body::ellipsoid(require_dim(vec_from_json(p.at("semi_axes"), "semi_axes"),
                                       "semi_axes"),
                           name);
  if (kind == "lp_ball") {
    double exponent;
    const OrderedJson& e = p.at("exponent");
    if (e.is_string()) {
      if (e.get<std::string>() != "inf")
        throw std::invalid_argument("lp_ball exponent: expected a number or \"inf\"");
      exponent = std::numeric_limits<double>::infinity();
    } else {
      exponent = e.get<double>();
    }
    double scale = p.contains("scale") ? p.at("scale").get<double>() : 1.0;
    return Body::lp_ball(dim, exponent, scale, name);
  }
  if (kind == "double_cap") {
    double scale = p.contains("scale") ? p.at("scale").get<double>() : 1.0;
    return Body::double_cap(dim, ContactAngle(p.at("theta").get<double>()), scale, name);
  }
  if (kind == "diag_scaled_cap")
    return Body::diag_scaled_cap(ContactAngle(p.at("theta").get<double>()),
                                 require_dim(vec_from_json(p.at("diagonal"), "diagonal"),
                                             "diagonal"),
                                 name);
  if (kind == "custom_radial")
    return Body::custom_radial_from_values(dim, p.at("resolution").get<int>(),
                                           p.at("values").get<std::vector<double>>(), name);
  throw std::invalid_argument("unknown body kind \"" + kind + "\"");
}

inline OrderedJson check_to_json(const CheckResult& c) {
  OrderedJson j;
  j["name"] = c.name;
  j["samples"] = c.samples;
  j["worst_margin"] = c.worst_margin;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  j["seed"] = c.seed;
  j["theta"] = c.theta;
  j["dim"] = c.dim;
  return j;
}

inline OrderedJson product_report_to_json(const VolumeProductReport& r) {
  OrderedJson j;
  j["name"] = r.body_name;
  j["n"] = r.dim;
  j["theta"] = r.theta;
  j["vol_hat"] = r.vol_hat;
  j["vol_polar"] = r.vol_polar;
  j["product"] = r.product;
  j["bound"] = r.bound;
  j["margin"] = r.margin;
  j["resolution"] = r.resolution;
  return j;
}

/// Assemble the standard report document: {config, checks[], tables{}, version}.
inline OrderedJson make_report(OrderedJson config, const std::vector<CheckResult>& checks,
                               OrderedJson tables = OrderedJson::object()) {
  OrderedJson j;
  j["config"] = std::move(config);
  OrderedJson arr = OrderedJson::array();
  for (const CheckResult& c : checks) arr.push_back(check_to_json(c));
  j["checks"] = std::move(arr);
  j["tables"] = std::move(tables);
  j["version"] = kReportVersion;
  return j;
}

// ---------------------------------------------------------------------------
// CSV.  Column sets are fixed; adding a column is a versioned change.
// ---------------------------------------------------------------------------

inline std::string volume_product_csv(const std::vector<VolumeProductReport>& rows) {
  std::string out = "name,n,theta,vol_hat,vol_polar,product,bound,margin,resolution\n";
  for (const VolumeProductReport& r : rows) {
    out += csv_field(r.body_name);
    out += ',';
    out += std::to_string(r.dim);
    out += ',';
    out += format_double(r.theta);
    out += ',';
    out += format_double(r.vol_hat);
    out += ',';
    out += format_double(r.vol_polar);
    out += ',';
    out += format_double(r.product);
    out += ',';
    out += format_double(r.bound);
    out += ',';
    out += format_double(r.margin);
    out += ',';
    out += std::to_string(r.resolution);
    out += '\n';
  }
  return out;
}

inline std::string checks_csv(const std::vector<CheckResult>& checks) {
  std::string out = "name,dim,theta,samples,worst_margin,tolerance,pass,seed\n";
  for (const CheckResult& c : checks) {
    out += csv_field(c.name);
    out += ',';
    out += std::to_string(c.dim);
    out += ',';
    out += format_double(c.theta);
    out += ',';
    out += std::to_string(c.samples);
    out += ',';
    out += format_double(c.worst_margin);
    out += ',';
    out += format_double(c.tolerance);
    out += ',';
    out += c.pass ? "1" : "0";
    out += ',';
    out += std::to_string(c.seed);
    out += '\n';
  }
  return out;
}

inline std::string family_csv(const FamilyTable& table) {
  std::string out = "param,vol_hat,vol_polar,product\n";
  for (const FamilyRow& r : table.rows) {
    out += format_double(r.param);
    out += ',';
    out += format_double(r.vol_hat);
    out += ',';
    out += format_double(r.vol_polar);
    out += ',';
    out += format_double(r.product);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG.  Hand-rolled emitters for the two chart styles the CLI produces;
// fixed canvas, fixed palette, no external renderer required.
// ---------------------------------------------------------------------------

/// One line of a log-log chart.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* series_color(size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace detail

/// Log-log line chart.  All data must be strictly positive; axes are padded
/// to whole decades with gridlines and 1e<k> tick labels.
inline std::string svg_loglog_plot(const std::string& title, const std::string& xlabel,
                                   const std::string& ylabel,
                                   const std::vector<PlotSeries>& series) {
  const double width = 640, height = 480;
  const double left = 70, right = 25, top = 45, bottom = 55;

  double lx0 = std::numeric_limits<double>::infinity(), lx1 = -lx0;
  double ly0 = lx0, ly1 = -lx0;
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("svg_loglog_plot: series \"" + s.label +
                                  "\" has mismatched x/y lengths");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0))
        throw std::invalid_argument("svg_loglog_plot: log-log data must be positive");
      lx0 = std::min(lx0, std::log10(s.x[i]));
      lx1 = std::max(lx1, std::log10(s.x[i]));
      ly0 = std::min(ly0, std::log10(s.y[i]));
      ly1 = std::max(ly1, std::log10(s.y[i]));
    }
  }
  if (!(lx0 <= lx1)) throw std::invalid_argument("svg_loglog_plot: no data");
  lx0 = std::floor(lx0);
  lx1 = std::ceil(lx1);
  ly0 = std::floor(ly0);
  ly1 = std::ceil(ly1);
  if (lx1 == lx0) lx1 += 1.0;
  if (ly1 == ly0) ly1 += 1.0;

  auto px = [&](double x) {
    return left + (std::log10(x) - lx0) / (lx1 - lx0) * (width - left - right);
  };
  auto py = [&](double y) {
    return height - bottom - (std::log10(y) - ly0) / (ly1 - ly0) * (height - top - bottom);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" +
         detail::svg_escape(title) + "</text>\n";

  // Decade gridlines and tick labels.
  for (int k = static_cast<int>(lx0); k <= static_cast<int>(lx1); ++k) {
    double x = left + (k - lx0) / (lx1 - lx0) * (width - left - right);
    svg += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(top) + "\" x2=\"" +
           detail::svg_num(x) + "\" y2=\"" + detail::svg_num(height - bottom) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(height - bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" +
           std::to_string(k) + "</text>\n";
  }
  for (int k = static_cast<int>(ly0); k <= static_cast<int>(ly1); ++k) {
    double y = height - bottom - (k - ly0) / (ly1 - ly0) * (height - top - bottom);
    svg += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(y) + "\" x2=\"" +
           detail::svg_num(width - right) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + detail::svg_num(left - 6) + "\" y=\"" + detail::svg_num(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
           std::to_string(k) + "</text>\n";
  }

  // Frame and axis labels.
  svg += "<rect x=\"" + detail::svg_num(left) + "\" y=\"" + detail::svg_num(top) + "\" width=\"" +
         detail::svg_num(width - left - right) + "\" height=\"" +
         detail::svg_num(height - top - bottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + detail::svg_num(left + (width - left - right) / 2) + "\" y=\"" +
         detail::svg_num(height - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         detail::svg_escape(xlabel) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::svg_num(top + (height - top - bottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " +
         detail::svg_num(top + (height - top - bottom) / 2) + ")\">" +
         detail::svg_escape(ylabel) + "</text>\n";

  // Data series with a small legend in the top-left corner of the frame.
  for (size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = detail::series_color(si);
    std::string pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      pts += detail::svg_num(px(s.x[i])) + "," + detail::svg_num(py(s.y[i]));
      if (i + 1 < s.x.size()) pts += ' ';
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    for (size_t i = 0; i < s.x.size(); ++i)
      svg += "<circle cx=\"" + detail::svg_num(px(s.x[i])) + "\" cy=\"" +
             detail::svg_num(py(s.y[i])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    double ly = top + 16 + 16 * static_cast<double>(si);
    svg += "<line x1=\"" + detail::svg_num(left + 8) + "\" y1=\"" + detail::svg_num(ly - 4) +
           "\" x2=\"" + detail::svg_num(left + 28) + "\" y2=\"" + detail::svg_num(ly - 4) +
           "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::svg_num(left + 34) + "\" y=\"" + detail::svg_num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::svg_escape(s.label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

/// One bar of a margin chart.
struct BarDatum {
  std::string label;
  double value = 0.0;
};

/// Horizontal bar chart of signed margins.  Margins span many orders of
/// magnitude, so bar length is symmetric-log: proportional to the number of
/// decades |value| sits above a 1e-16 floor, signed, with green bars for
/// nonnegative margins and red for negative ones.
inline std::string svg_margin_bars(const std::string& title, const std::vector<BarDatum>& bars) {
  const double width = 640;
  const double rowh = 22, top = 50, bottom = 30, left = 230, right = 30;
  const double height = top + bottom + rowh * static_cast<double>(bars.size());
  const double floor_decades = -16.0;

  auto decades = [&](double v) {
    double mag = std::log10(std::max(std::abs(v), 1e-300));
    double d = mag - floor_decades;
    if (d < 0.0) d = 0.0;
    return v < 0.0 ? -d : d;
  };
  double dmax = 1.0;
  for (const BarDatum& b : bars) dmax = std::max(dmax, std::abs(decades(b.value)));

  const double zero_x = left + (width - left - right) / 2.0;
  const double unit = (width - left - right) / 2.0 / dmax;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"" +
         detail::svg_num(height) + "\" viewBox=\"0 0 640 " + detail::svg_num(height) + "\">\n";
  svg += "<rect width=\"640\" height=\"" + detail::svg_num(height) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" +
         detail::svg_escape(title) + "</text>\n";
  svg += "<line x1=\"" + detail::svg_num(zero_x) + "\" y1=\"" + detail::svg_num(top - 8) +
         "\" x2=\"" + detail::svg_num(zero_x) + "\" y2=\"" +
         detail::svg_num(height - bottom + 4) + "\" stroke=\"#888888\"/>\n";
  svg += "<text x=\"" + detail::svg_num(zero_x) + "\" y=\"" + detail::svg_num(height - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">0 "
         "(bar length: decades of |margin| above 1e-16)</text>\n";

  for (size_t i = 0; i < bars.size(); ++i) {
    const BarDatum& b = bars[i];
    double y = top + rowh * static_cast<double>(i);
    double d = decades(b.value) * unit;
    double bx = d >= 0.0 ? zero_x : zero_x + d;
    double bw = std::abs(d);
    const char* color = b.value >= 0.0 ? "#2ca02c" : "#d62728";
    svg += "<rect x=\"" + detail::svg_num(bx) + "\" y=\"" + detail::svg_num(y + 3) +
           "\" width=\"" + detail::svg_num(bw) + "\" height=\"" + detail::svg_num(rowh - 6) +
           "\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + detail::svg_num(left - 8) + "\" y=\"" +
           detail::svg_num(y + rowh / 2 + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::svg_escape(b.label) + "</text>\n";
    svg += "<text x=\"" + detail::svg_num(zero_x + (d >= 0.0 ? bw + 6 : -bw - 6)) + "\" y=\"" +
           detail::svg_num(y + rowh / 2 + 4) + "\" text-anchor=\"" +
           (d >= 0.0 ? "start" : "end") + "\" font-family=\"sans-serif\" font-size=\"10\">" +
           format_double(b.value).substr(0, 10) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

/// Write a file atomically: stage the bytes next to the target and rename
/// into place, so readers never observe a partial file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace capvol
