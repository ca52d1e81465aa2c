#include "subkernel/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "subkernel/errors.hpp"

namespace subkernel {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "suite,n_or_t,x,y,d,value,target,ratio\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out << r[i] << (i + 1 < r.size() ? "," : "");
    out << "\n";
  }
}

void write_svg_loglog(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = 0.0;
  double ymin = xmin, ymax = 0.0;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmax > 0.0)) {
    xmin = ymin = 0.1;
    xmax = ymax = 10.0;
  }
  if (xmin == xmax) xmax = 2.0 * xmin;
  if (ymin == ymax) ymax = 2.0 * ymin;

  const double w = 640, h = 420, ml = 60, mr = 20, mt = 36, mb = 40;
  auto sx = [&](double x) {
    return ml + (std::log(x) - std::log(xmin)) / (std::log(xmax) - std::log(xmin)) *
                    (w - ml - mr);
  };
  auto sy = [&](double y) {
    return h - mb -
           (std::log(y) - std::log(ymin)) / (std::log(ymax) - std::log(ymin)) *
               (h - mt - mb);
  };

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "' viewBox='0 0 " << w << " " << h << "'>\n";
  out << "<rect width='" << w << "' height='" << h << "' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='14'>"
      << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='"
      << h - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
      << "' stroke='black'/>\n";
  // decade ticks
  for (int e = static_cast<int>(std::ceil(std::log10(xmin)));
       e <= static_cast<int>(std::floor(std::log10(xmax))); ++e) {
    double x = std::pow(10.0, e);
    out << "<line x1='" << sx(x) << "' y1='" << h - mb << "' x2='" << sx(x) << "' y2='"
        << h - mb + 5 << "' stroke='black'/>\n";
    out << "<text x='" << sx(x) << "' y='" << h - mb + 18
        << "' text-anchor='middle' font-size='10'>1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(std::log10(ymin)));
       e <= static_cast<int>(std::floor(std::log10(ymax))); ++e) {
    double y = std::pow(10.0, e);
    out << "<line x1='" << ml - 5 << "' y1='" << sy(y) << "' x2='" << ml << "' y2='"
        << sy(y) << "' stroke='black'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << sy(y) + 3
        << "' text-anchor='end' font-size='10'>1e" << e << "</text>\n";
  }
  int legend_y = mt + 8;
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
    for (auto [x, y] : s.points)
      if (x > 0.0 && y > 0.0) out << sx(x) << "," << sy(y) << " ";
    out << "'/>\n";
    out << "<text x='" << w - mr - 150 << "' y='" << legend_y << "' font-size='11' fill='"
        << s.color << "'>" << s.name << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
}

}  // namespace subkernel
