#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ipvt {

/// Linear or log10 axis mapping data coordinates to pixels.
struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  std::string label;
};

/// Single-panel plot with a fixed style sheet. Output is a pure function of
/// the calls made, so identical inputs give identical files.
class SvgPlot {
 public:
  SvgPlot(std::string title, Axis x, Axis y, int width = 640, int height = 480);

  void polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color,
                double stroke_width = 1.5);
  /// Circles of pixel radius `radii[i]` (or 2 when `radii` is empty).
  void scatter(std::span<const double> xs, std::span<const double> ys, std::span<const double> radii,
               const std::string& color, double opacity = 0.6);
  /// Filled rectangle between data corners.
  void rect(double x0, double y0, double x1, double y1, const std::string& color, double opacity = 1.0);
  void hline(double y, const std::string& color, bool dashed = true);
  void vline(double x, const std::string& color, bool dashed = true);
  /// Vertical error bar with a center dot.
  void error_bar(double x, double lo, double mid, double hi, const std::string& color);
  void legend(const std::string& text, const std::string& color);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  double px(double x) const;
  double py(double y) const;

  std::string title_;
  Axis x_, y_;
  int width_, height_;
  std::vector<std::string> body_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

}  // namespace ipvt
