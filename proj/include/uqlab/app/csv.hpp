#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace uqlab::app {

/// Semicolon-separated table: optional "# " comment lines, then the header,
/// then rows with exactly as many cells as the header. No quoting; cells may
/// not contain ';' or line breaks.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  /// Column `name` parsed as doubles.
  std::vector<double> numbers(std::string_view name) const;
};

inline constexpr char kCsvSeparator = ';';

std::string emit_csv(const CsvTable& table);

/// Strict reader for the format above; throws ParseError with the byte
/// offset of the offending line.
CsvTable parse_csv(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace uqlab::app
