#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace enacode::csv {

struct Record {
  std::size_t line = 0; // physical line on which the record starts (1-based)
  std::vector<std::string> fields;
};

/// RFC-4180 reader: quoted fields may hold commas, doubled quotes and line
/// breaks; CRLF and LF are both accepted. A leading UTF-8 BOM is dropped.
std::vector<Record> parse(std::string_view text);
std::vector<Record> read_file(const std::string& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace enacode::csv
