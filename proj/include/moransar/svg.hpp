#pragma once

// Standalone SVG scatterplot with up to two trend lines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "moransar/autocorr.hpp"
#include "moransar/error.hpp"
#include "moransar/io.hpp"

namespace moransar {

namespace svg_detail {

inline constexpr double kWidth = 800.0;
inline constexpr double kHeight = 600.0;
inline constexpr double kLeft = 80.0;
inline constexpr double kRight = 560.0;  // legend sits to the right
inline constexpr double kTop = 50.0;
inline constexpr double kBottom = 530.0;

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Step from {1, 2, 5} x 10^k giving about `target` intervals.
inline double nice_step(double span, int target = 6) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
  return nice * mag;
}

struct Axis {
  double lo = 0.0, hi = 1.0, step = 0.2;
};

inline Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  Axis a;
  a.step = nice_step(hi - lo);
  a.lo = std::floor(lo / a.step) * a.step;
  a.hi = std::ceil(hi / a.step) * a.step;
  return a;
}

/// Clips y = intercept + slope x to the data box; nullopt when it misses.
inline std::optional<std::array<double, 4>> clip_line(const TrendLine& t, const Axis& ax,
                                                      const Axis& ay) {
  double x0 = ax.lo, x1 = ax.hi;
  if (t.slope != 0.0) {
    double xa = (ay.lo - t.intercept) / t.slope;
    double xb = (ay.hi - t.intercept) / t.slope;
    if (xa > xb) std::swap(xa, xb);
    x0 = std::max(x0, xa);
    x1 = std::min(x1, xb);
  } else if (t.intercept < ay.lo || t.intercept > ay.hi) {
    return std::nullopt;
  }
  if (!(x0 <= x1)) return std::nullopt;
  return std::array<double, 4>{x0, t(x0), x1, t(x1)};
}

}  // namespace svg_detail

inline std::string svg_string(const ScatterDataset& d) {
  using namespace svg_detail;
  if (d.points.empty()) throw Error(ErrorCode::InvalidArgument, "empty scatter dataset");

  double xmin = d.points[0].x, xmax = xmin, ymin = d.points[0].y, ymax = ymin;
  for (const auto& p : d.points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const Axis ax = make_axis(xmin, xmax);
  const Axis ay = make_axis(ymin, ymax);
  auto px = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (y - ay.lo) / (ay.hi - ay.lo) * (kBottom - kTop); };

  const bool autocorr = d.mode == ScatterMode::autocorrelation;
  const std::string xlabel = autocorr ? "z" : "Wz";
  const std::string ylabel = autocorr ? "nWz" : "z";

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
       "viewBox=\"0 0 800 600\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<title>Normalized scatterplot (" + std::string(to_string(d.mode)) + ")</title>\n";
  s += "<defs><clipPath id=\"plot-area\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) +
       "\" width=\"" + num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
       "\"/></clipPath></defs>\n";
  s += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s += "<rect class=\"frame\" x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
       num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  s += "<g class=\"axis x\">\n";
  for (double t = ax.lo; t <= ax.hi + 1e-9 * ax.step; t += ax.step) {
    const double v = std::abs(t) < 1e-12 * ax.step ? 0.0 : t;
    s += "<line x1=\"" + num(px(v)) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(px(v)) +
         "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"black\"/>";
    s += "<text class=\"tick\" x=\"" + num(px(v)) + "\" y=\"" + num(kBottom + 18) +
         "\" text-anchor=\"middle\">" + label_num(v) + "</text>\n";
  }
  s += "<text class=\"label\" x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" +
       num(kBottom + 40) + "\" text-anchor=\"middle\">" + xlabel + "</text>\n</g>\n";

  s += "<g class=\"axis y\">\n";
  for (double t = ay.lo; t <= ay.hi + 1e-9 * ay.step; t += ay.step) {
    const double v = std::abs(t) < 1e-12 * ay.step ? 0.0 : t;
    s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(py(v)) + "\" stroke=\"black\"/>";
    s += "<text class=\"tick\" x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(v) + 4) +
         "\" text-anchor=\"end\">" + label_num(v) + "</text>\n";
  }
  s += "<text class=\"label\" x=\"20\" y=\"" + num((kTop + kBottom) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + num((kTop + kBottom) / 2) +
       ")\">" + ylabel + "</text>\n</g>\n";

  s += "<g class=\"points\">\n";
  for (const auto& p : d.points)
    s += "<circle class=\"point\" cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) +
         "\" r=\"4\" fill=\"steelblue\" data-x=\"" + format_full(p.x) + "\" data-y=\"" +
         format_full(p.y) + "\"/>\n";
  s += "</g>\n";

  std::vector<std::pair<const TrendLine*, std::string>> lines;
  if (d.theoretical) lines.emplace_back(&*d.theoretical, "firebrick");
  lines.emplace_back(&d.empirical, "darkgreen");

  s += "<g class=\"trends\" clip-path=\"url(#plot-area)\">\n";
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const TrendLine& t = *lines[k].first;
    const auto seg = clip_line(t, ax, ay);
    s += "<line class=\"trend " + escape(t.label) + "\" data-slope=\"" + format_full(t.slope) +
         "\" data-intercept=\"" + format_full(t.intercept) + "\"";
    if (seg) {
      s += " x1=\"" + num(px((*seg)[0])) + "\" y1=\"" + num(py((*seg)[1])) + "\" x2=\"" +
           num(px((*seg)[2])) + "\" y2=\"" + num(py((*seg)[3])) + "\"";
    } else {
      s += " x1=\"0\" y1=\"0\" x2=\"0\" y2=\"0\" visibility=\"hidden\"";
    }
    s += " stroke=\"" + lines[k].second + "\" stroke-width=\"2\"" +
         (k == 0 ? "" : " stroke-dasharray=\"6 4\"") + "/>\n";
  }
  s += "</g>\n";

  s += "<g class=\"legend\">\n";
  double ly = kTop + 10;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const TrendLine& t = *lines[k].first;
    s += "<line x1=\"580\" y1=\"" + num(ly) + "\" x2=\"610\" y2=\"" + num(ly) + "\" stroke=\"" +
         lines[k].second + "\" stroke-width=\"2\"" +
         (k == 0 ? "" : " stroke-dasharray=\"6 4\"") + "/>";
    s += "<text x=\"616\" y=\"" + num(ly + 4) + "\">" + escape(t.label) + "</text>\n";
    s += "<text x=\"616\" y=\"" + num(ly + 20) + "\">y = " + label_num(t.slope) + " x " +
         (t.intercept < 0 ? "- " : "+ ") + label_num(std::abs(t.intercept)) + "</text>\n";
    ly += 44;
  }
  s += "</g>\n</svg>\n";
  return s;
}

inline void render_svg(const ScatterDataset& d, const std::filesystem::path& path) {
  io::write_text(path, svg_string(d));
}

}  // namespace moransar
