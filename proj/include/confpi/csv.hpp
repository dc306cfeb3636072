#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace confpi {

/// Comma-separated table with a header row. Fields are not unquoted beyond
/// stripping surrounding double quotes; none of the formats here need more.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Shortest decimal text that reads back to the same double; "inf"/"-inf"/"nan" otherwise.
std::string format_number(double value);

/// Parses a decimal number, accepting "inf", "-inf" and "nan". Returns nullopt on failure.
std::optional<double> parse_number(std::string_view text);

}  // namespace confpi
