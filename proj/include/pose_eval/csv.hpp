#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pose_eval {

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 style: comma separated, double-quoted fields may contain commas,
/// quotes ("") and newlines. A trailing newline and CRLF endings are accepted.
/// Lines starting with '#' before the header carry metadata and are skipped.
struct CsvTable {
  std::string origin;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Index of a header column; throws MalformedFile when absent.
  std::size_t column(std::string_view name) const;
  /// Throws MalformedFile unless the header starts with exactly these columns.
  void require_header(const std::vector<std::string_view>& expected) const;
  /// "origin:line N: msg" for error messages.
  std::string where(const CsvRow& row) const;
};

/// With `ragged`, data rows may have a different field count than the header.
CsvTable parse_csv(std::string_view text, const std::string& origin = "<memory>",
                   bool ragged = false);
CsvTable read_csv(const std::filesystem::path& path, bool ragged = false);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads a whole text file; throws IoFailure.
std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories and overwrites the file; throws IoFailure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pose_eval
