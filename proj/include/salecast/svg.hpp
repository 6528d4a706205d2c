#pragma once

#include <string>
#include <vector>

#include "salecast/metrics.hpp"

namespace salecast {

// Dependency-free fixed-size (800x600) SVG charts.
void write_curve_svg(const Curve& curve, const std::string& title,
                     const std::string& path);

void write_bar_svg(const std::vector<std::pair<std::string, double>>& bars,
                   const std::string& title, const std::string& path);

}  // namespace salecast
