#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace enacode {

using EntryId = std::int64_t;

struct Post {
  EntryId entry_id = 0;
  std::string user_id;
  std::string timestamp; // validated ISO-8601, stored as written
  std::string text;
  std::optional<std::string> semester;
};

/// Grouping used to form units of analysis (one network per unit).
enum class UnitKey { user, user_semester };

std::string to_string(UnitKey key);
UnitKey parse_unit_key(const std::string& text);

/// Posts ordered by entry_id. Immutable once built by ingest_csv.
struct Corpus {
  std::vector<Post> posts;
  UnitKey unit_key = UnitKey::user;

  std::string unit_of(const Post& post) const;
  std::size_t unit_count() const;
  const Post* find(EntryId id) const;
};

/// Logical field -> header name. entry_id and semester are optional columns.
struct ColumnMap {
  std::optional<std::string> entry_id = "entry_id";
  std::string user_id = "user_id";
  std::string timestamp = "timestamp";
  std::string text = "text";
  std::optional<std::string> semester;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const IngestReport& report);

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// Accepts YYYY-MM-DD, optionally followed by 'T' or ' ' and HH:MM[:SS[.fff]]
/// and an optional 'Z' or +HH:MM offset.
bool is_iso8601(const std::string& text);

/// Reads a discussion export. When the entry id column named in the map is
/// not present in the file, ids are assigned 1..n over the kept rows.
IngestResult ingest_csv(const std::string& path, const ColumnMap& columns,
                        UnitKey unit_key = UnitKey::user);
IngestResult ingest_csv_text(const std::string& text, const ColumnMap& columns,
                             UnitKey unit_key = UnitKey::user);

/// Canonical export: entry_id,user_id,timestamp,text[,semester].
void write_csv(const Corpus& corpus, const std::string& path);
std::string to_csv(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Coded ("well-formatted") tables

enum class Source { algorithm, human };

std::string to_string(Source source);
Source parse_source(const std::string& text);

struct CodedRow {
  EntryId entry_id = 0;
  std::string user_id;
  std::string timestamp;
  std::string text;
  std::vector<std::uint8_t> flags; // aligned with CodedTable::codes
  Source source = Source::algorithm;
};

enum class Provenance { lda_only, lda_plus_instructor, external };

std::string to_string(Provenance provenance);

struct CodedTable {
  std::vector<std::string> codes;
  std::vector<CodedRow> rows;
  Provenance provenance = Provenance::external;

  std::size_t code_index(const std::string& code) const; // throws SchemaError
};

/// Columns entry_id,user_id,timestamp,text,<codes...>[,source]. Rows without
/// a source column take `default_source`.
CodedTable read_coded_csv(const std::string& path, Source default_source = Source::human);
CodedTable parse_coded_csv(const std::string& text, Source default_source = Source::human);
std::string to_csv(const CodedTable& table);
void write_csv(const CodedTable& table, const std::string& path);

/// Joint table for model comparison: algorithm rows then human rows. Both
/// inputs must cover the same entry ids and code names; `human` is reordered
/// to the algorithm table's code order.
CodedTable merge_tables(const CodedTable& algorithm, const CodedTable& human);

} // namespace enacode
