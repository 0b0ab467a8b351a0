#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace trendshift::plot {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.2f", v); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step (1, 2, 5 x 10^k) giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
};

// Blue (low) to red (high) through pale yellow.
std::string ramp(double u) {
  u = std::clamp(u, 0.0, 1.0);
  static constexpr double stops[3][3] = {{49, 54, 149}, {255, 255, 191}, {165, 0, 38}};
  const int i = u < 0.5 ? 0 : 1;
  const double f = u < 0.5 ? u / 0.5 : (u - 0.5) / 0.5;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

}  // namespace

std::string line_chart(const Chart& c, int width, int height) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  Range xr, yr;
  for (double v : c.points_x) xr.add(v);
  for (double v : c.points_y) yr.add(v);
  for (const auto& l : c.lines) {
    for (double v : l.x) xr.add(v);
    for (double v : l.y) yr.add(v);
  }
  xr.pad();
  yr.pad();
  auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(c.title) +
       "</text>\n";
  // axes and grid
  const double xs = nice_step(xr.hi - xr.lo, 8), ys = nice_step(yr.hi - yr.lo, 6);
  for (double x = std::ceil(xr.lo / xs) * xs; x <= xr.hi; x += xs) {
    s += "<line x1=\"" + num(sx(x)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(sx(x)) + "\" y2=\"" + num(top + ph) +
         "\" stroke=\"#e6e6e6\"/>\n";
    s += "<text x=\"" + num(sx(x)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" +
         fmt("%g", x) + "</text>\n";
  }
  for (double y = std::ceil(yr.lo / ys) * ys; y <= yr.hi; y += ys) {
    const double yy = std::abs(y) < 1e-12 ? 0.0 : y;
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(yy)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
         num(sy(yy)) + "\" stroke=\"#e6e6e6\"/>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(yy) + 4) + "\" text-anchor=\"end\">" + fmt("%g", yy) +
         "</text>\n";
  }
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"#444\"/>\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 10.0) + "\" text-anchor=\"middle\">" +
       escape(c.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(c.y_label) + "</text>\n";
  for (double v : c.vlines) {
    s += "<line x1=\"" + num(sx(v)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(sx(v)) + "\" y2=\"" + num(top + ph) +
         "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (!c.points_x.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#9ab\" stroke-width=\"0.8\" points=\"";
    for (std::size_t i = 0; i < c.points_x.size(); ++i) {
      s += num(sx(c.points_x[i])) + "," + num(sy(c.points_y[i])) + (i + 1 < c.points_x.size() ? " " : "");
    }
    s += "\"/>\n";
    for (std::size_t i = 0; i < c.points_x.size(); ++i) {
      s += "<circle cx=\"" + num(sx(c.points_x[i])) + "\" cy=\"" + num(sy(c.points_y[i])) +
           "\" r=\"2\" fill=\"#35a\"/>\n";
    }
  }
  for (const auto& l : c.lines) {
    s += "<polyline fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"" + num(l.width) + "\" points=\"";
    for (std::size_t i = 0; i < l.x.size(); ++i) {
      s += num(sx(l.x[i])) + "," + num(sy(l.y[i])) + (i + 1 < l.x.size() ? " " : "");
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string heatmap(const Heatmap& m) {
  const double cell_w = 58, cell_h = 30, left = 80, top = 60;
  const double width = left + cell_w * m.cols.size() + 20;
  const double height = top + cell_h * m.rows.size() + 50;
  Range r;
  for (const auto& row : m.value) {
    for (double v : row) r.add(v);
  }
  if (!(r.hi > r.lo)) r.hi = r.lo + 1.0;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(m.title) +
       "</text>\n";
  s += "<text x=\"" + num(left + cell_w * m.cols.size() / 2) + "\" y=\"44\" text-anchor=\"middle\" font-size=\"12\">" +
       escape(m.col_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num(top + cell_h * m.rows.size() / 2) +
       ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(m.row_label) + "</text>\n";
  for (std::size_t j = 0; j < m.cols.size(); ++j) {
    s += "<text x=\"" + num(left + cell_w * (j + 0.5)) + "\" y=\"" + num(top - 4) + "\" text-anchor=\"middle\">" +
         std::to_string(m.cols[j]) + "</text>\n";
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const double y = top + cell_h * i;
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y + cell_h / 2 + 4) + "\" text-anchor=\"end\">" +
         std::to_string(m.rows[i]) + "</text>\n";
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      const double x = left + cell_w * j;
      const double v = m.value[i][j];
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell_w) + "\" height=\"" + num(cell_h) +
           "\" fill=\"" + ramp((v - r.lo) / (r.hi - r.lo)) + "\" stroke=\"white\"/>\n";
      const bool two = !m.detail.empty();
      s += "<text x=\"" + num(x + cell_w / 2) + "\" y=\"" + num(y + (two ? 13 : 19)) + "\" text-anchor=\"middle\">" +
           fmt(m.value_format.c_str(), v) + "</text>\n";
      if (two) {
        s += "<text x=\"" + num(x + cell_w / 2) + "\" y=\"" + num(y + 25) + "\" text-anchor=\"middle\" fill=\"#333\">" +
             fmt(m.detail_format.c_str(), m.detail[i][j]) + "</text>\n";
      }
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace trendshift::plot
