#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "modwhittle/core.hpp"

namespace modwhittle::io {

std::string read_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

nlohmann::json read_json(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column, or npos when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(std::size_t index) const;
};

/// Numeric CSV with one header line. Blank lines and lines starting with '#' are skipped.
CsvTable parse_csv(const std::string& text);
std::string format_csv(const CsvTable& table);

/// CSV "t,re,im" of a series.
std::string series_csv(const Series& series);
/// Reads "re[,im]" columns (a leading "t" column is ignored).
Series series_from_csv(const std::string& text, double delta = 1.0);

/// 64-bit FNV-1a hash as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace modwhittle::io
