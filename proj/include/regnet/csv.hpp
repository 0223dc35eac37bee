#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace regnet::csv {

struct Table {
  std::vector<std::string> header;
  // Data rows with the line number they came from (1-based, header = 1).
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

// Splits one CSV line. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_line(std::string_view line);

// Reads a whole file. A zero-byte file yields an empty header and no rows.
Table read_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string quote_if_needed(std::string_view field);

long long parse_integer(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace regnet::csv
