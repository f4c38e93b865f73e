#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace moralvig::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
// A leading UTF-8 byte-order mark is skipped. Blank lines are ignored.
std::vector<Record> read(std::istream& in);

// Quotes the field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace moralvig::csv
