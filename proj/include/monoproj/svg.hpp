#pragma once

#include <string>
#include <utility>
#include <vector>

namespace monoproj {

// One ECDF curve: a label plus the raw sample.
using EcdfSeries = std::pair<std::string, std::vector<double>>;

// Renders empirical distribution functions of one or more samples as a
// self-contained SVG (axes, ticks, step curves, legend). No plotting
// dependency; pure geometry.
std::string ecdf_svg(const std::string& title, const std::string& x_label,
                     const std::vector<EcdfSeries>& series);

void write_ecdf_svg(const std::string& path, const std::string& title,
                    const std::string& x_label,
                    const std::vector<EcdfSeries>& series);

}  // namespace monoproj
