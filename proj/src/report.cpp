#include "cusp_spectra/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace cusp {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

} // namespace

void write_loglog_svg(std::ostream& os, const LogLogPlot& plot) {
  const int width = 640, height = 480;
  const double ml = 70, mr = 25, mt = 40, mb = 55;
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  std::vector<double> lxs, lys;
  for (std::size_t i = 0; i < plot.xs.size(); ++i) {
    if (!(plot.xs[i] > 0.0) || !(plot.ys[i] > 0.0)) continue;
    lxs.push_back(std::log10(plot.xs[i]));
    lys.push_back(std::log10(plot.ys[i]));
    lx0 = std::min(lx0, lxs.back());
    lx1 = std::max(lx1, lxs.back());
    ly0 = std::min(ly0, lys.back());
    ly1 = std::max(ly1, lys.back());
  }
  if (lxs.empty()) {
    lx0 = ly0 = 0.0;
    lx1 = ly1 = 1.0;
  }
  if (lx1 - lx0 < 1e-12) { lx0 -= 0.5; lx1 += 0.5; }
  if (ly1 - ly0 < 1e-12) { ly0 -= 0.5; ly1 += 0.5; }
  const double padx = 0.06 * (lx1 - lx0), pady = 0.06 * (ly1 - ly0);
  lx0 -= padx; lx1 += padx; ly0 -= pady; ly1 += pady;
  auto px = [&](double lx) {
    return ml + (lx - lx0) / (lx1 - lx0) * (width - ml - mr);
  };
  auto py = [&](double ly) {
    return height - mb - (ly - ly0) / (ly1 - ly0) * (height - mt - mb);
  };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
     << height << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << fmtg(ml) << "\" y=\"" << fmtg(mt) << "\" width=\""
     << fmtg(width - ml - mr) << "\" height=\"" << fmtg(height - mt - mb)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        "font-family=\"monospace\" font-size=\"14\">"
     << plot.title << "</text>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
     << plot.xlabel << " (log10)</text>\n";
  os << "<text x=\"16\" y=\"" << height / 2
     << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
        "transform=\"rotate(-90 16 "
     << height / 2 << ")\">" << plot.ylabel << " (log10)</text>\n";

  // corner tick labels
  os << "<text x=\"" << fmtg(ml) << "\" y=\"" << height - mb + 16
     << "\" font-family=\"monospace\" font-size=\"11\">" << fmtg(lx0 + padx)
     << "</text>\n";
  os << "<text x=\"" << fmtg(width - mr - 40) << "\" y=\"" << height - mb + 16
     << "\" font-family=\"monospace\" font-size=\"11\">" << fmtg(lx1 - padx)
     << "</text>\n";
  os << "<text x=\"" << fmtg(ml - 45) << "\" y=\"" << fmtg(py(ly0 + pady))
     << "\" font-family=\"monospace\" font-size=\"11\">" << fmtg(ly0 + pady)
     << "</text>\n";
  os << "<text x=\"" << fmtg(ml - 45) << "\" y=\"" << fmtg(py(ly1 - pady))
     << "\" font-family=\"monospace\" font-size=\"11\">" << fmtg(ly1 - pady)
     << "</text>\n";

  if (plot.has_fit && !lxs.empty()) {
    const double ln10 = std::log(10.0);
    auto fit_ly = [&](double lx) {
      return (plot.fit.intercept + plot.fit.slope * lx * ln10) / ln10;
    };
    const double fx0 = lx0 + padx, fx1 = lx1 - padx;
    os << "<line x1=\"" << fmtg(px(fx0)) << "\" y1=\"" << fmtg(py(fit_ly(fx0)))
       << "\" x2=\"" << fmtg(px(fx1)) << "\" y2=\"" << fmtg(py(fit_ly(fx1)))
       << "\" stroke=\"#c02020\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << fmtg(ml + 10) << "\" y=\"" << fmtg(mt + 18)
       << "\" font-family=\"monospace\" font-size=\"12\" fill=\"#c02020\">slope "
       << fmtg(plot.fit.slope) << ", r2 " << fmtg(plot.fit.r2) << "</text>\n";
  }
  for (std::size_t i = 0; i < lxs.size(); ++i) {
    os << "<circle cx=\"" << fmtg(px(lxs[i])) << "\" cy=\"" << fmtg(py(lys[i]))
       << "\" r=\"3.5\" fill=\"#2040c0\"/>\n";
  }
  os << "</svg>\n";
}

} // namespace cusp
