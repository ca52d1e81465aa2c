#pragma once

#include <array>
#include <string>
#include <vector>

namespace subkernel {

/// Grid dump schema shared by every suite:
/// suite, n_or_t, x, y, d, value, target, ratio
using CsvRow = std::array<std::string, 8>;

void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;  // positive values only
};

/// Minimal log-log overlay plot written as plain SVG.
void write_svg_loglog(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series);

std::string format_double(double v);

}  // namespace subkernel
