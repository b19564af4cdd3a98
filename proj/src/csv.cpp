#include "enacode/csv.hpp"

#include "enacode/error.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace enacode::csv {

std::vector<Record> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF"))
    text.remove_prefix(3);

  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // a blank physical line is not a record
    if (record_has_content || current.fields.size() > 1 || !current.fields.front().empty())
      records.push_back(std::move(current));
    current = Record{};
    current.line = line;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n')
          ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
    case '"':
      if (!field.empty() || field_was_quoted)
        throw RowError(current.line, "unexpected quote inside unquoted field");
      in_quotes = true;
      field_was_quoted = true;
      record_has_content = true;
      break;
    case ',':
      end_field();
      record_has_content = true;
      break;
    case '\r':
      if (i + 1 < text.size() && text[i + 1] == '\n')
        ++i;
      ++line;
      end_record();
      break;
    case '\n':
      ++line;
      end_record();
      break;
    default:
      if (field_was_quoted)
        throw RowError(current.line, "characters after closing quote");
      field.push_back(ch);
      record_has_content = true;
    }
  }
  if (in_quotes)
    throw RowError(current.line, "unterminated quoted field");
  if (record_has_content || !field.empty())
    end_record();
  return records;
}

std::vector<Record> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos)
    return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"')
      out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i)
      out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

} // namespace enacode::csv
