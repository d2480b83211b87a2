#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace levitodyn {

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 800;
  int height = 500;
};

// Self-contained SVG polyline plot. Non-positive values are dropped on log
// axes. Throws IoFailure when nothing is left to draw or the sizes differ.
std::string svg_line_plot(std::span<const double> x, std::span<const double> y,
                          const PlotOptions& options);

void write_svg(const std::filesystem::path& path, std::span<const double> x,
               std::span<const double> y, const PlotOptions& options);

}  // namespace levitodyn
