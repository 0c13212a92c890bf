#include "ipvt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace ipvt {

namespace {

constexpr double kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 55;

double axis_value(const Axis& a, double v) { return a.log ? std::log10(v) : v; }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    for (double e = std::ceil(std::log10(a.lo)); e <= std::floor(std::log10(a.hi)); ++e) out.push_back(std::pow(10.0, e));
    return out;
  }
  const double span = a.hi - a.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {2.0, 5.0, 10.0})
    if (raw > step) step = m * mag;
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * span; v += step) out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, Axis x, Axis y, int width, int height)
    : title_(std::move(title)), x_(std::move(x)), y_(std::move(y)), width_(width), height_(height) {
  for (const Axis* a : {&x_, &y_}) {
    if (!(a->hi > a->lo)) throw std::invalid_argument("SvgPlot: empty axis range");
    if (a->log && !(a->lo > 0.0)) throw std::invalid_argument("SvgPlot: log axis needs positive range");
  }
}

double SvgPlot::px(double x) const {
  const double lo = axis_value(x_, x_.lo), hi = axis_value(x_, x_.hi);
  return kMarginLeft + (axis_value(x_, x) - lo) / (hi - lo) * (width_ - kMarginLeft - kMarginRight);
}

double SvgPlot::py(double y) const {
  const double lo = axis_value(y_, y_.lo), hi = axis_value(y_, y_.hi);
  return height_ - kMarginBottom - (axis_value(y_, y) - lo) / (hi - lo) * (height_ - kMarginTop - kMarginBottom);
}

void SvgPlot::polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color,
                       double stroke_width) {
  if (xs.size() != ys.size()) throw std::invalid_argument("SvgPlot::polyline: size mismatch");
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    pts += fmt::format("{:.2f},{:.2f} ", px(xs[i]), py(ys[i]));
  }
  body_.push_back(fmt::format(R"(<polyline class="line" points="{}" stroke="{}" stroke-width="{:.2f}"/>)", pts, color,
                              stroke_width));
}

void SvgPlot::scatter(std::span<const double> xs, std::span<const double> ys, std::span<const double> radii,
                      const std::string& color, double opacity) {
  if (xs.size() != ys.size() || (!radii.empty() && radii.size() != xs.size()))
    throw std::invalid_argument("SvgPlot::scatter: size mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = radii.empty() ? 2.0 : radii[i];
    body_.push_back(fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="{}" fill-opacity="{:.2f}"/>)",
                                px(xs[i]), py(ys[i]), r, color, opacity));
  }
}

void SvgPlot::rect(double x0, double y0, double x1, double y1, const std::string& color, double opacity) {
  const double a = px(x0), b = px(x1), c = py(y0), d = py(y1);
  body_.push_back(fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}" fill-opacity="{:.2f}"/>)",
                              std::min(a, b), std::min(c, d), std::abs(b - a), std::abs(d - c), color, opacity));
}

void SvgPlot::hline(double y, const std::string& color, bool dashed) {
  body_.push_back(fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"{}/>)", px(x_.lo),
                              py(y), px(x_.hi), py(y), color, dashed ? R"( stroke-dasharray="6,4")" : ""));
}

void SvgPlot::vline(double x, const std::string& color, bool dashed) {
  body_.push_back(fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"{}/>)", px(x),
                              py(y_.lo), px(x), py(y_.hi), color, dashed ? R"( stroke-dasharray="6,4")" : ""));
}

void SvgPlot::error_bar(double x, double lo, double mid, double hi, const std::string& color) {
  body_.push_back(fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="{3}"/>)", px(x),
                              py(lo), py(hi), color));
  body_.push_back(fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)", px(x), py(mid), color));
}

void SvgPlot::legend(const std::string& text, const std::string& color) { legend_.emplace_back(text, color); }

std::string SvgPlot::str() const {
  std::string out = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">)"
      "\n<style>text{{font-family:sans-serif;font-size:12px}} .title{{font-size:14px}} "
      ".line{{fill:none}} .axis{{stroke:#000;stroke-width:1}} .grid{{stroke:#ddd;stroke-width:0.5}}</style>\n"
      R"(<rect width="{0}" height="{1}" fill="#fff"/>)"
      "\n",
      width_, height_);
  const double left = kMarginLeft, right = width_ - kMarginRight, top = kMarginTop, bottom = height_ - kMarginBottom;
  out += fmt::format(R"(<clipPath id="plot"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>)"
                     "\n",
                     left, top, right - left, bottom - top);
  for (double t : ticks(x_)) {
    out += fmt::format(R"(<line class="grid" x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}"/>)"
                       R"(<text x="{0:.2f}" y="{3}" text-anchor="middle">{4:g}</text>)"
                       "\n",
                       px(t), top, bottom, bottom + 16, t);
  }
  for (double t : ticks(y_)) {
    out += fmt::format(R"(<line class="grid" x1="{0}" y1="{1:.2f}" x2="{2}" y2="{1:.2f}"/>)"
                       R"(<text x="{3}" y="{4:.2f}" text-anchor="end">{5:g}</text>)"
                       "\n",
                       left, py(t), right, left - 6, py(t) + 4, t);
  }
  out += fmt::format(R"(<rect class="axis" x="{}" y="{}" width="{}" height="{}" fill="none"/>)"
                     "\n",
                     left, top, right - left, bottom - top);
  out += "<g clip-path=\"url(#plot)\">\n";
  for (const auto& element : body_) out += element + "\n";
  out += "</g>\n";
  out += fmt::format(R"(<text class="title" x="{}" y="24" text-anchor="middle">{}</text>)"
                     "\n",
                     width_ / 2.0, escape(title_));
  out += fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)"
                     "\n",
                     (left + right) / 2.0, height_ - 12, escape(x_.label));
  out += fmt::format(R"x(<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>)x"
                     "\n",
                     (top + bottom) / 2.0, escape(y_.label));
  for (std::size_t i = 0; i < legend_.size(); ++i) {
    const double y = top + 16 + 16 * static_cast<double>(i);
    out += fmt::format(R"(<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>)"
                       "\n",
                       right - 170, y - 9, legend_[i].second, right - 155, y, escape(legend_[i].first));
  }
  out += "</svg>\n";
  return out;
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << str();
}

}  // namespace ipvt
