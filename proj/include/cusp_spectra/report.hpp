#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cusp_spectra/metrics.hpp"

namespace cusp {

// 17 significant digits; round-trips a double exactly.
std::string fmt17(double v);

struct LogLogPlot {
  std::string title, xlabel, ylabel;
  std::vector<double> xs, ys;
  bool has_fit = false;
  FitResult fit; // natural-log slope/intercept
};

// Self-contained SVG, log-log scatter plus optional fitted line.
void write_loglog_svg(std::ostream& os, const LogLogPlot& plot);

} // namespace cusp
