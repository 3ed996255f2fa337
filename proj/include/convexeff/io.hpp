#pragma once

// Small text I/O helpers shared by the CSV writers and readers.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace convexeff::io {

// Shortest representation that round-trips exactly ('.' decimal separator,
// independent of locale).
std::string fmt(double v);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

// Splits on any character in `delims`, collapsing runs when `collapse`.
std::vector<std::string> split(std::string_view line, std::string_view delims, bool collapse);

std::string_view trim(std::string_view s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Index of a header column; throws InputError when missing.
  std::size_t column(std::string_view name) const;
};

// Comma-separated with a header row; no quoting support beyond plain fields.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// JSON-style string escaping for short labels.
std::string csv_field(std::string_view s);

}  // namespace convexeff::io
