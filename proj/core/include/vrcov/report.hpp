#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vrcov/linalg.hpp"

namespace vrcov {

/// Shortest form with 17 significant digits, locale independent.
std::string format_number(double value);

struct ReportRow {
  double t = 0.0;
  std::string statistic;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Header "t,statistic,value,tolerance,pass".
std::string report_csv(const std::vector<ReportRow>& rows);

/// Row-major matrix with a header of column names (default c0, c1, ...).
std::string matrix_csv(const Matrix& a, const std::vector<std::string>& header = {});

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vrcov
