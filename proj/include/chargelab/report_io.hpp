#pragma once

// Serialization of reports: CSV rows with 17 significant digits and a fixed
// column order, JSON records, and log-log SVG charts.

#include <string>
#include <vector>

#include "chargelab/inequality.hpp"

namespace chargelab {

// "%.17g" in the C locale; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

// case,d,m,h,grid,lhs,rhs,slack,equality,coverage
std::string csv_header();
std::string csv_row(const InequalityReport& r);

// One JSON object per report.
std::string report_json(const InequalityReport& r);
// A JSON array of reports.
std::string reports_json(const std::vector<InequalityReport>& reports);

// Writes `content` to `path`, creating parent directories. Throws on failure.
void write_text_file(const std::string& path, const std::string& content);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool line = true;  // polyline, otherwise point markers
  std::string color = "#1f77b4";
};

// 800x600 log-log chart with decade ticks. Non-positive points are skipped.
std::string svg_loglog(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series);

}  // namespace chargelab
