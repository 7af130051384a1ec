#pragma once

#include <string>
#include <vector>

namespace amln::app {

struct PlotSeries {
  std::string label;
  std::vector<double> iteration;
  std::vector<double> seconds;     // cumulative wall time
  std::vector<double> grad_norm;   // plotted as log10; non-positive entries are dropped
};

/// Two side-by-side panels: log10 gradient norm against iteration and against
/// cumulative wall time. One polyline per series per panel.
std::string convergence_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace amln::app
