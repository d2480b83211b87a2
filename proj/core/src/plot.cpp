#include "levitodyn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "levitodyn/errors.hpp"

namespace levitodyn {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log_axis) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", log_axis ? std::pow(10.0, v) : v);
  return buf;
}

}  // namespace

std::string svg_line_plot(std::span<const double> x, std::span<const double> y,
                          const PlotOptions& options) {
  if (x.size() != y.size()) throw IoFailure("plot: x and y sizes differ");
  std::vector<double> px;
  std::vector<double> py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double u = x[i];
    double v = y[i];
    if (options.log_x) u = u > 0.0 ? std::log10(u) : std::numeric_limits<double>::quiet_NaN();
    if (options.log_y) v = v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(u) && std::isfinite(v)) {
      px.push_back(u);
      py.push_back(v);
    }
  }
  if (px.empty()) throw IoFailure("plot: empty trace, nothing to draw");

  auto [x_lo, x_hi] = std::minmax_element(px.begin(), px.end());
  auto [y_lo, y_hi] = std::minmax_element(py.begin(), py.end());
  double x0 = *x_lo, x1 = *x_hi, y0 = *y_lo, y1 = *y_hi;
  if (x1 <= x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 <= y0) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 80, right = 20, top = 40, bottom = 60;
  const double w = options.width - left - right;
  const double h = options.height - top - bottom;
  auto sx = [&](double u) { return left + (u - x0) / (x1 - x0) * w; };
  auto sy = [&](double v) { return top + (y1 - v) / (y1 - y0) * h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" font-family=\"sans-serif\" "
         "font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(w) +
         "\" height=\"" + fixed(h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double u = x0 + (x1 - x0) * i / 4.0;
    const double v = y0 + (y1 - y0) * i / 4.0;
    svg += "<text x=\"" + fixed(sx(u)) + "\" y=\"" + fixed(top + h + 18) +
           "\" text-anchor=\"middle\">" + tick_label(u, options.log_x) + "</text>\n";
    svg += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(sy(v) + 4) +
           "\" text-anchor=\"end\">" + tick_label(v, options.log_y) + "</text>\n";
  }
  if (!options.title.empty()) {
    svg += "<text x=\"" + fixed(left + w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-size=\"14\">" + escape(options.title) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(left + w / 2) + "\" y=\"" + fixed(options.height - 12.0) +
         "\" text-anchor=\"middle\">" + escape(options.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + fixed(top + h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(options.y_label) + "</text>\n";
  svg += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (i) svg += ' ';
    svg += fixed(sx(px[i])) + "," + fixed(sy(py[i]));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

void write_svg(const std::filesystem::path& path, std::span<const double> x,
               std::span<const double> y, const PlotOptions& options) {
  const std::string svg = svg_line_plot(x, y, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path.string() + ": cannot open for writing");
  out << svg;
  if (!out) throw IoFailure(path.string() + ": write failed");
}

}  // namespace levitodyn
