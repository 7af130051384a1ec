#include "app/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace amln::app {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kMarginL = 60.0;
constexpr double kMarginT = 40.0;
constexpr double kGap = 80.0;
constexpr double kLegendH = 22.0;

constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) hi = lo + 1.0;
  }
};

void axes(std::ostringstream& out, double x0, const Range& xr, const Range& yr, const std::string& xlabel) {
  const double y0 = kMarginT;
  out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << kPanelW << "\" height=\"" << kPanelH
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fy = static_cast<double>(i) / 4.0;
    const double py = y0 + kPanelH * (1.0 - fy);
    const double v = yr.lo + fy * (yr.hi - yr.lo);
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << std::round(v * 10.0) / 10.0 << "</text>\n";
    const double px = x0 + kPanelW * fy;
    const double u = xr.lo + fy * (xr.hi - xr.lo);
    out << "<text x=\"" << px << "\" y=\"" << y0 + kPanelH + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << std::round(u * 1000.0) / 1000.0 << "</text>\n";
  }
  out << "<text x=\"" << x0 + kPanelW / 2 << "\" y=\"" << y0 + kPanelH + 34
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"" << x0 - 44 << "\" y=\"" << y0 + kPanelH / 2 << "\" font-size=\"12\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 " << x0 - 44 << ' ' << y0 + kPanelH / 2 << ")\">log10 ||grad F||</text>\n";
}

void polyline(std::ostringstream& out, double x0, const Range& xr, const Range& yr, const std::vector<double>& xs,
              const std::vector<double>& gs, const char* color, const std::string& label) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-series=\"" << escape(label)
      << "\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < xs.size() && i < gs.size(); ++i) {
    if (!(gs[i] > 0.0) || !std::isfinite(xs[i])) continue;
    const double px = x0 + kPanelW * (xs[i] - xr.lo) / (xr.hi - xr.lo);
    const double py = kMarginT + kPanelH * (1.0 - (std::log10(gs[i]) - yr.lo) / (yr.hi - yr.lo));
    out << (first ? "" : " ") << std::round(px * 100.0) / 100.0 << ',' << std::round(py * 100.0) / 100.0;
    first = false;
  }
  out << "\"/>\n";
}

}  // namespace

std::string convergence_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  Range iters, secs, logs;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.grad_norm.size(); ++i) {
      if (!(s.grad_norm[i] > 0.0)) continue;
      logs.add(std::log10(s.grad_norm[i]));
      if (i < s.iteration.size()) iters.add(s.iteration[i]);
      if (i < s.seconds.size()) secs.add(s.seconds[i]);
    }
  }
  iters.settle();
  secs.settle();
  logs.settle();
  logs.lo = std::floor(logs.lo);
  logs.hi = std::ceil(logs.hi);
  if (logs.hi - logs.lo < 1.0) logs.hi = logs.lo + 1.0;

  const double width = kMarginL + 2 * kPanelW + kGap + 20;
  const double height = kMarginT + kPanelH + 50 + kLegendH * static_cast<double>(series.size());
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";

  const double left = kMarginL;
  const double right = kMarginL + kPanelW + kGap;
  out << "<g class=\"panel\" id=\"by-iteration\">\n";
  axes(out, left, iters, logs, "iteration");
  for (std::size_t s = 0; s < series.size(); ++s) {
    polyline(out, left, iters, logs, series[s].iteration, series[s].grad_norm, kColors[s % kColors.size()],
             series[s].label);
  }
  out << "</g>\n<g class=\"panel\" id=\"by-time\">\n";
  axes(out, right, secs, logs, "cumulative wall time (s)");
  for (std::size_t s = 0; s < series.size(); ++s) {
    polyline(out, right, secs, logs, series[s].seconds, series[s].grad_norm, kColors[s % kColors.size()],
             series[s].label);
  }
  out << "</g>\n<g class=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kMarginT + kPanelH + 50 + kLegendH * static_cast<double>(s);
    out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + 24 << "\" y2=\"" << y << "\" stroke=\""
        << kColors[s % kColors.size()] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + 30 << "\" y=\"" << y + 4 << "\" font-size=\"12\">" << escape(series[s].label)
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace amln::app
