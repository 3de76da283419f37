#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace saw::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // source line of each row

  std::optional<std::size_t> column(std::string_view name) const;
};

/// RFC-4180-style reader: comma separated, double-quoted fields may contain
/// commas and doubled quotes. Blank lines are skipped; a UTF-8 BOM is dropped.
Table read(std::istream& in);

std::vector<std::string> split_line(std::string_view line);

std::optional<double> parse_double(std::string_view text);

/// Quotes a field when it contains a delimiter, quote or newline.
std::string escape(std::string_view field);

}  // namespace saw::csv
