#include "enacode/corpus.hpp"

#include "enacode/csv.hpp"
#include "enacode/error.hpp"
#include "enacode/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace enacode {

std::string to_string(UnitKey key) {
  return key == UnitKey::user ? "user" : "user+semester";
}

UnitKey parse_unit_key(const std::string& text) {
  if (text == "user")
    return UnitKey::user;
  if (text == "user+semester")
    return UnitKey::user_semester;
  throw ConfigError("unit key must be 'user' or 'user+semester', got '" + text + "'");
}

std::string Corpus::unit_of(const Post& post) const {
  if (unit_key == UnitKey::user_semester)
    return post.user_id + "|" + post.semester.value_or("");
  return post.user_id;
}

std::size_t Corpus::unit_count() const {
  std::set<std::string> units;
  for (const auto& p : posts)
    units.insert(unit_of(p));
  return units.size();
}

const Post* Corpus::find(EntryId id) const {
  auto it = std::lower_bound(posts.begin(), posts.end(), id,
                             [](const Post& p, EntryId v) { return p.entry_id < v; });
  return it != posts.end() && it->entry_id == id ? &*it : nullptr;
}

void to_json(nlohmann::json& j, const IngestReport& report) {
  j = nlohmann::json{{"rows_read", report.rows_read},
                     {"rows_kept", report.rows_kept},
                     {"warnings", report.warnings}};
}

namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& value) {
  if (pos + n > s.size())
    return false;
  auto res = std::from_chars(s.data() + pos, s.data() + pos + n, value);
  return res.ec == std::errc{} && res.ptr == s.data() + pos + n;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

EntryId parse_entry_id(const std::string& text, std::size_t line) {
  EntryId id = 0;
  const auto t = trim(text);
  auto res = std::from_chars(t.data(), t.data() + t.size(), id);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || id <= 0)
    throw RowError(line, "entry id must be a positive integer, got '" + text + "'");
  return id;
}

std::map<std::string, std::size_t> header_index(const csv::Record& header) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.fields.size(); ++i)
    index.emplace(trim(header.fields[i]), i);
  return index;
}

std::size_t require_column(const std::map<std::string, std::size_t>& index,
                           const std::string& name) {
  auto it = index.find(name);
  if (it == index.end())
    throw SchemaError("missing column '" + name + "'");
  return it->second;
}

const std::string& field_at(const csv::Record& rec, std::size_t col) {
  if (col >= rec.fields.size())
    throw RowError(rec.line, "row has " + std::to_string(rec.fields.size()) +
                                 " fields, expected at least " + std::to_string(col + 1));
  return rec.fields[col];
}

IngestResult ingest_records(const std::vector<csv::Record>& records, const ColumnMap& columns,
                            UnitKey unit_key) {
  if (records.empty())
    throw SchemaError("input has no header row");
  const auto index = header_index(records.front());
  const auto user_col = require_column(index, columns.user_id);
  const auto time_col = require_column(index, columns.timestamp);
  const auto text_col = require_column(index, columns.text);
  std::optional<std::size_t> id_col;
  if (columns.entry_id && index.count(*columns.entry_id))
    id_col = index.at(*columns.entry_id);
  std::optional<std::size_t> semester_col;
  if (columns.semester)
    semester_col = require_column(index, *columns.semester);
  if (unit_key == UnitKey::user_semester && !semester_col)
    throw ConfigError("unit key user+semester needs a semester column");

  IngestResult result;
  result.corpus.unit_key = unit_key;
  std::unordered_set<EntryId> seen;
  EntryId next_id = 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++result.report.rows_read;
    Post post;
    post.text = field_at(rec, text_col);
    if (trim(post.text).empty()) {
      result.report.warnings.push_back("line " + std::to_string(rec.line) +
                                       ": empty text, row skipped");
      continue;
    }
    post.user_id = trim(field_at(rec, user_col));
    if (post.user_id.empty())
      throw RowError(rec.line, "empty user id");
    post.timestamp = trim(field_at(rec, time_col));
    if (!is_iso8601(post.timestamp))
      throw RowError(rec.line, "unparseable timestamp '" + post.timestamp + "'");
    if (semester_col)
      post.semester = trim(field_at(rec, *semester_col));
    post.entry_id = id_col ? parse_entry_id(field_at(rec, *id_col), rec.line) : next_id++;
    if (!seen.insert(post.entry_id).second)
      throw RowError(rec.line, "duplicate entry id " + std::to_string(post.entry_id));
    result.corpus.posts.push_back(std::move(post));
  }
  std::stable_sort(result.corpus.posts.begin(), result.corpus.posts.end(),
                   [](const Post& a, const Post& b) { return a.entry_id < b.entry_id; });
  result.report.rows_kept = result.corpus.posts.size();
  return result;
}


} // namespace

bool is_iso8601(const std::string& text) {
  std::string_view s = text;
  int y, mo, d;
  if (!digits(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !digits(s, 5, 2, mo) ||
      s[7] != '-' || !digits(s, 8, 2, d))
    return false;
  static constexpr int days[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (mo < 1 || mo > 12 || d < 1 || d > days[mo - 1])
    return false;
  if (mo == 2 && d == 29 && !((y % 4 == 0 && y % 100 != 0) || y % 400 == 0))
    return false;
  std::size_t pos = 10;
  if (pos == s.size())
    return true;
  if (s[pos] != 'T' && s[pos] != ' ')
    return false;
  int h, mi;
  if (!digits(s, pos + 1, 2, h) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
      !digits(s, pos + 4, 2, mi) || h > 23 || mi > 59)
    return false;
  pos += 6;
  if (pos < s.size() && s[pos] == ':') {
    int sec;
    if (!digits(s, pos + 1, 2, sec) || sec > 60)
      return false;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const auto start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        ++pos;
      if (pos == start)
        return false;
    }
  }
  if (pos == s.size())
    return true;
  if (s[pos] == 'Z')
    return pos + 1 == s.size();
  if (s[pos] == '+' || s[pos] == '-') {
    int oh, om;
    return pos + 6 == s.size() && digits(s, pos + 1, 2, oh) && s[pos + 3] == ':' &&
           digits(s, pos + 4, 2, om) && oh <= 14 && om <= 59;
  }
  return false;
}

IngestResult ingest_csv_text(const std::string& text, const ColumnMap& columns, UnitKey unit_key) {
  return ingest_records(csv::parse(text), columns, unit_key);
}

IngestResult ingest_csv(const std::string& path, const ColumnMap& columns, UnitKey unit_key) {
  return ingest_records(csv::read_file(path), columns, unit_key);
}

std::string to_csv(const Corpus& corpus) {
  const bool with_semester = std::any_of(corpus.posts.begin(), corpus.posts.end(),
                                         [](const Post& p) { return p.semester.has_value(); });
  std::ostringstream out;
  std::vector<std::string> header{"entry_id", "user_id", "timestamp", "text"};
  if (with_semester)
    header.emplace_back("semester");
  csv::write_row(out, header);
  for (const auto& p : corpus.posts) {
    std::vector<std::string> row{std::to_string(p.entry_id), p.user_id, p.timestamp, p.text};
    if (with_semester)
      row.push_back(p.semester.value_or(""));
    csv::write_row(out, row);
  }
  return out.str();
}

void write_csv(const Corpus& corpus, const std::string& path) { io::write_text(path, to_csv(corpus)); }

// ---------------------------------------------------------------------------

std::string to_string(Source source) {
  return source == Source::algorithm ? "algorithm" : "human";
}

Source parse_source(const std::string& text) {
  if (text == "algorithm")
    return Source::algorithm;
  if (text == "human")
    return Source::human;
  throw SchemaError("source must be 'algorithm' or 'human', got '" + text + "'");
}

std::string to_string(Provenance provenance) {
  switch (provenance) {
  case Provenance::lda_only:
    return "lda_only";
  case Provenance::lda_plus_instructor:
    return "lda_plus_instructor";
  case Provenance::external:
    break;
  }
  return "external";
}

std::size_t CodedTable::code_index(const std::string& code) const {
  auto it = std::find(codes.begin(), codes.end(), code);
  if (it == codes.end())
    throw SchemaError("unknown code '" + code + "'");
  return static_cast<std::size_t>(it - codes.begin());
}

namespace {

const std::vector<std::string> kIdentityColumns{"entry_id", "user_id", "timestamp", "text"};

CodedTable coded_from_records(const std::vector<csv::Record>& records, Source default_source) {
  if (records.empty())
    throw SchemaError("coded table has no header row");
  const auto& header = records.front().fields;
  for (std::size_t i = 0; i < kIdentityColumns.size(); ++i)
    if (i >= header.size() || trim(header[i]) != kIdentityColumns[i])
      throw SchemaError("coded table column " + std::to_string(i + 1) + " must be '" +
                        kIdentityColumns[i] + "'");
  std::size_t code_end = header.size();
  const bool has_source = trim(header.back()) == "source";
  if (has_source)
    --code_end;
  CodedTable table;
  std::set<std::string> names;
  for (std::size_t i = kIdentityColumns.size(); i < code_end; ++i) {
    auto name = trim(header[i]);
    if (name.empty() || !names.insert(name).second)
      throw SchemaError("empty or duplicate code column '" + name + "'");
    table.codes.push_back(std::move(name));
  }
  std::unordered_set<EntryId> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw RowError(rec.line, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(rec.fields.size()));
    CodedRow row;
    row.entry_id = parse_entry_id(rec.fields[0], rec.line);
    row.user_id = rec.fields[1];
    row.timestamp = rec.fields[2];
    row.text = rec.fields[3];
    for (std::size_t i = kIdentityColumns.size(); i < code_end; ++i) {
      const auto v = trim(rec.fields[i]);
      if (v != "0" && v != "1")
        throw RowError(rec.line, "flag for '" + header[i] + "' must be 0 or 1, got '" + v + "'");
      row.flags.push_back(v == "1" ? 1 : 0);
    }
    row.source = has_source ? parse_source(trim(rec.fields.back())) : default_source;
    if (!seen.insert(row.entry_id).second && !has_source)
      throw RowError(rec.line, "duplicate entry id " + std::to_string(row.entry_id));
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace

CodedTable parse_coded_csv(const std::string& text, Source default_source) {
  return coded_from_records(csv::parse(text), default_source);
}

CodedTable read_coded_csv(const std::string& path, Source default_source) {
  return coded_from_records(csv::read_file(path), default_source);
}

std::string to_csv(const CodedTable& table) {
  std::ostringstream out;
  auto header = kIdentityColumns;
  header.insert(header.end(), table.codes.begin(), table.codes.end());
  header.emplace_back("source");
  csv::write_row(out, header);
  for (const auto& row : table.rows) {
    std::vector<std::string> fields{std::to_string(row.entry_id), row.user_id, row.timestamp,
                                    row.text};
    for (auto f : row.flags)
      fields.push_back(f ? "1" : "0");
    fields.push_back(to_string(row.source));
    csv::write_row(out, fields);
  }
  return out.str();
}

void write_csv(const CodedTable& table, const std::string& path) { io::write_text(path, to_csv(table)); }

CodedTable merge_tables(const CodedTable& algorithm, const CodedTable& human) {
  for (const auto& r : algorithm.rows)
    if (r.source != Source::algorithm)
      throw SchemaError("row " + std::to_string(r.entry_id) + " of the algorithm table is tagged " +
                        to_string(r.source));
  for (const auto& r : human.rows)
    if (r.source != Source::human)
      throw SchemaError("row " + std::to_string(r.entry_id) + " of the human table is tagged " +
                        to_string(r.source));

  const std::set<std::string> a_codes(algorithm.codes.begin(), algorithm.codes.end());
  const std::set<std::string> h_codes(human.codes.begin(), human.codes.end());
  if (a_codes != h_codes) {
    std::string msg = "code names differ:";
    for (const auto& c : a_codes)
      if (!h_codes.count(c))
        msg += " " + c + " (algorithm only)";
    for (const auto& c : h_codes)
      if (!a_codes.count(c))
        msg += " " + c + " (human only)";
    throw SchemaError(msg);
  }

  std::set<EntryId> a_ids, h_ids;
  for (const auto& r : algorithm.rows)
    a_ids.insert(r.entry_id);
  for (const auto& r : human.rows)
    h_ids.insert(r.entry_id);
  if (a_ids != h_ids) {
    std::vector<EntryId> diff;
    std::set_symmetric_difference(a_ids.begin(), a_ids.end(), h_ids.begin(), h_ids.end(),
                                  std::back_inserter(diff));
    std::string msg = "entry ids differ: {";
    for (std::size_t i = 0; i < diff.size(); ++i)
      msg += (i ? "," : "") + std::to_string(diff[i]);
    throw MergeError(msg + "}");
  }

  std::vector<std::size_t> remap;
  for (const auto& c : algorithm.codes)
    remap.push_back(human.code_index(c));

  CodedTable out;
  out.codes = algorithm.codes;
  out.provenance = algorithm.provenance;
  out.rows = algorithm.rows;
  out.rows.reserve(algorithm.rows.size() + human.rows.size());
  for (const auto& r : human.rows) {
    CodedRow row = r;
    for (std::size_t i = 0; i < remap.size(); ++i)
      row.flags[i] = r.flags[remap[i]];
    out.rows.push_back(std::move(row));
  }
  return out;
}

} // namespace enacode
