#include "moralvig/csv.hpp"

#include <istream>
#include <iterator>
#include <ostream>

#include "moralvig/error.hpp"

namespace moralvig::csv {

std::vector<Record> read(std::istream& in) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::size_t pos = 0;
  if (bytes.starts_with("\xEF\xBB\xBF")) pos = 3;

  std::vector<Record> records;
  std::size_t line = 1;
  while (pos < bytes.size()) {
    Record record;
    record.line = line;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool record_done = false;
    while (pos < bytes.size() && !record_done) {
      const char c = bytes[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < bytes.size() && bytes[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || field_was_quoted) {
            throw Error(ErrorCode::malformed_row, "unexpected quote inside unquoted field", line);
          }
          in_quotes = true;
          field_was_quoted = true;
          ++pos;
          break;
        case ',':
          record.fields.push_back(std::move(field));
          field.clear();
          field_was_quoted = false;
          ++pos;
          break;
        case '\r':
          ++pos;
          break;
        case '\n':
          ++line;
          ++pos;
          record_done = true;
          break;
        default:
          if (field_was_quoted) {
            throw Error(ErrorCode::malformed_row, "text after closing quote", line);
          }
          field.push_back(c);
          ++pos;
      }
    }
    if (in_quotes) throw Error(ErrorCode::malformed_row, "unterminated quoted field", record.line);
    record.fields.push_back(std::move(field));
    const bool blank = record.fields.size() == 1 && record.fields[0].empty() && !field_was_quoted;
    if (!blank) records.push_back(std::move(record));
  }
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace moralvig::csv
