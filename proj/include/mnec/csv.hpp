#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mnec::csv {

using Row = std::vector<std::string>;

/// A parsed CSV file: header plus data rows tagged with 1-based line numbers.
struct Table {
  Row header;
  std::vector<Row> rows;
  std::vector<std::size_t> line_numbers;
};

/// Splits one line, honouring double-quoted fields ("" escapes a quote).
Row split_line(std::string_view line);

/// Reads a whole file. Blank lines are skipped; a trailing '\r' is stripped.
/// Throws Error(Io) when the file cannot be opened and Error(Parse) when the
/// header differs from `expected_header`.
Table read(const std::filesystem::path& path, const Row& expected_header);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// Shortest decimal representation that round-trips exactly.
std::string format_exact(double value);
/// Fixed number of significant digits (printf %.Ng).
std::string format_sig(double value, int digits = 12);

double parse_double(std::string_view text, std::size_t line, std::string_view what);
long long parse_int(std::string_view text, std::size_t line, std::string_view what);

}  // namespace mnec::csv
