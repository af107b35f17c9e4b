#pragma once

#include <string>
#include <vector>

#include "bench.hpp"

namespace wbesprit::plot {

// Renders the sweep records of a CSV file as a log-log SVG (one panel per
// metric present, one series per method, vertical lines at both narrowband
// thresholds).
void emit_plot(const std::string& csv_path, const std::string& svg_path, double threshold_hz_a,
               double threshold_hz_b);

void emit_plot_records(const std::vector<bench::RmseRecord>& records, const std::string& svg_path,
                       double threshold_hz_a, double threshold_hz_b);

}  // namespace wbesprit::plot
