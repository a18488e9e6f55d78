#include "vrcov/report.hpp"

#include <charconv>
#include <fstream>

#include "vrcov/error.hpp"

namespace vrcov {

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "t,statistic,value,tolerance,pass\n";
  for (const auto& r : rows) {
    out += format_number(r.t) + ',' + r.statistic + ',' + format_number(r.value) + ',' +
           format_number(r.tolerance) + ',' + (r.pass ? "true" : "false") + '\n';
  }
  return out;
}

std::string matrix_csv(const Matrix& a, const std::vector<std::string>& header) {
  require(header.empty() || header.size() == a.cols(), ErrorCode::ContractViolation,
          "CSV header does not match the column count");
  std::string out;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (j) out += ',';
    out += header.empty() ? "c" + std::to_string(j) : header[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_number(a(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace vrcov
