#pragma once

#include <string>
#include <vector>

namespace mimo::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal self-contained SVG line chart with axes, ticks and a legend.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

}  // namespace mimo::cli
