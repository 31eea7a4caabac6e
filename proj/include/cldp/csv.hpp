#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace cldp {

/// Shortest representation with 17 significant digits ("%.17g", C locale);
/// round-trips any finite double bit-exactly through strtod.
std::string format_double(double x);

/// Minimal CSV emitter: UTF-8, LF line endings, '.' decimal separator,
/// header row first. Opened in binary mode so output is byte-identical
/// across platforms.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void header(const std::vector<std::string>& names);
  /// One row; fields are written verbatim (use format_double for reals,
  /// empty string for missing values).
  void row(const std::vector<std::string>& fields);

  static std::string field(double x) { return format_double(x); }
  static std::string field(long x) { return std::to_string(x); }

 private:
  std::ofstream out_;
};

}  // namespace cldp
