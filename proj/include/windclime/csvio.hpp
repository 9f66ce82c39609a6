#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace windclime::csv {

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double value);

std::string format_optional(const std::optional<double>& value);

std::vector<std::string> split_line(const std::string& line, char sep = ',');

/// Strict field parse; throws ParseError on junk. Empty string is not valid.
double parse_double(const std::string& field, std::size_t line_no = 0);

/// Empty field -> nullopt; otherwise parse_double.
std::optional<double> parse_optional(const std::string& field, std::size_t line_no = 0);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws ParseError if absent
};

Table read_table(std::istream& in);
Table read_table_file(const std::string& path);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace windclime::csv
