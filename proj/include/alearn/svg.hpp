#pragma once

#include <string>
#include <vector>

namespace alearn {

/// One line on a chart: points (x[i], mean[i]) with a ±1 std band.
struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> std_dev;
};

/// Format a real with 6 significant digits, locale-independent.
std::string format_real(double value);

/// Render an 800x600 SVG 1.1 line chart: one polyline per series, shaded
/// ±1 std band, axis ticks and labels, legend in series order. Output bytes
/// are a pure function of the inputs.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<ChartSeries>& series);

} // namespace alearn
