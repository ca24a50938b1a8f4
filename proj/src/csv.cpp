#include "pose_eval/csv.hpp"

#include <fstream>
#include <sstream>

#include "pose_eval/error.hpp"

namespace pose_eval {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorCode::MalformedFile, origin + ":line 1: missing column '" + std::string(name) + "'");
}

void CsvTable::require_header(const std::vector<std::string_view>& expected) const {
  bool ok = header.size() >= expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = header[i] == expected[i];
  if (!ok) {
    std::string want;
    for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
    fail(ErrorCode::MalformedFile, origin + ":line 1: expected header '" + want + "'");
  }
}

std::string CsvTable::where(const CsvRow& row) const {
  return origin + ":line " + std::to_string(row.line);
}

CsvTable parse_csv(std::string_view text, const std::string& origin, bool ragged) {
  CsvTable table;
  table.origin = origin;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::size_t line = 1;
  while (text.starts_with("#")) {
    const auto eol = text.find('\n');
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line;
  }
  std::size_t i = 0;
  bool first = true;
  while (i < text.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        if (quoted) fail(ErrorCode::MalformedFile, origin + ":line " + std::to_string(row.line) +
                                                       ": unterminated quoted field");
        row.fields.push_back(std::move(field));
        break;
      }
      const char c = text[i++];
      if (quoted) {
        if (c == '"') {
          if (i < text.size() && text[i] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        continue;
      }
      switch (c) {
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          after_quote = false;
          break;
        case '\r':
          if (i < text.size() && text[i] == '\n') break;
          field += c;
          break;
        case '\n':
          row.fields.push_back(std::move(field));
          ++line;
          done = true;
          break;
        case '"':
          if (!field.empty() || after_quote) {
            fail(ErrorCode::MalformedFile,
                 origin + ":line " + std::to_string(line) + ": stray quote inside a field");
          }
          quoted = true;
          break;
        default:
          if (after_quote) {
            fail(ErrorCode::MalformedFile, origin + ":line " + std::to_string(line) +
                                               ": text after closing quote");
          }
          field += c;
      }
    }
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (first) {
      table.header = std::move(row.fields);
      first = false;
    } else if (!blank) {
      if (!ragged && row.fields.size() != table.header.size()) {
        fail(ErrorCode::MalformedFile, table.where(row) + ": expected " +
                                           std::to_string(table.header.size()) + " fields, got " +
                                           std::to_string(row.fields.size()));
      }
      table.rows.push_back(std::move(row));
    }
  }
  if (first) fail(ErrorCode::MalformedFile, origin + ":line 1: missing header");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, bool ragged) {
  return parse_csv(read_text_file(path), path.string(), ragged);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoFailure, "cannot read '" + path.string() + "'");
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::IoFailure, "short write to '" + path.string() + "'");
}

}  // namespace pose_eval
