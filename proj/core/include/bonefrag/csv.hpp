#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bonefrag::csv {

// Minimal RFC-4180 style reader: comma separated, double-quoted fields may
// contain commas and doubled quotes. Lines starting with '#' are skipped.
struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<std::size_t> line_numbers;

  // Index of a header column, or -1.
  int column(std::string_view name) const;
  // Like column() but throws DataError naming `context` when missing.
  std::size_t require_column(std::string_view name, std::string_view context) const;
};

Document read(const std::filesystem::path& path);
Document parse(std::string_view text, std::string_view source_name = "<memory>");

std::vector<std::string> split_line(std::string_view line);
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest text form that parses back to the identical double.
std::string format_double(double value);
// Strict parse of the whole field; returns false on any trailing garbage.
bool parse_double(std::string_view text, double& out);

}  // namespace bonefrag::csv
