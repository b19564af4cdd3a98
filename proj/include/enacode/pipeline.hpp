#pragma once

#include "enacode/agreement.hpp"
#include "enacode/autocoder.hpp"
#include "enacode/corpus.hpp"
#include "enacode/error.hpp"
#include "enacode/ena.hpp"
#include "enacode/preprocess.hpp"
#include "enacode/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enacode::pipeline {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct TopicsConfig {
  std::string k_range = "5";
  std::uint64_t seed = 42;
  int iterations = 1000;
  double alpha = 0.0; // <= 0: 50 / K
  double beta = 0.01;
  std::size_t n_top = 10;
};

/// Everything a run needs. Input paths are only read by `ingest`, which
/// copies the inputs into the run directory; later stages never leave it.
struct RunConfig {
  std::string corpus;
  ColumnMap columns;
  UnitKey unit_key = UnitKey::user;
  preprocess::Config preprocess;
  TopicsConfig topics;
  std::string scheme;
  std::optional<std::string> reference;
  ena::Accumulation accumulation = ena::Accumulation::binary;
  agreement::BandThresholds bands;
  stats::Alternative alternative = stats::Alternative::two_sided;

  /// Relative input paths resolve against this directory (not serialized).
  std::filesystem::path base_dir;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Reads a config file; relative input paths resolve against its directory.
RunConfig load_run_config(const std::string& path);

std::string sha256_hex(std::string_view data);

/// Artifact names inside a run directory.
namespace files {
inline constexpr const char* config = "config.json";
inline constexpr const char* manifest = "run_manifest.json";
inline constexpr const char* input_scheme = "scheme_input.json";
inline constexpr const char* reference = "reference.csv";
inline constexpr const char* corpus = "corpus.csv";
inline constexpr const char* ingest_report = "ingest_report.json";
inline constexpr const char* tokens = "tokens.json";
inline constexpr const char* vocab = "vocab.json";
inline constexpr const char* preprocess_config = "preprocess_config.json";
inline constexpr const char* model = "model.json";
inline constexpr const char* coherence = "coherence.csv";
inline constexpr const char* topics = "topics.csv";
inline constexpr const char* scheme = "scheme.json";
inline constexpr const char* coded_lda = "coded_lda.csv";
inline constexpr const char* coded = "coded.csv";
inline constexpr const char* kappa_lda_csv = "kappa_lda.csv";
inline constexpr const char* kappa_lda_json = "kappa_lda.json";
inline constexpr const char* kappa_csv = "kappa.csv";
inline constexpr const char* kappa_json = "kappa.json";
inline constexpr const char* merged = "merged.csv";
inline constexpr const char* ena_space = "ena_space.json";
inline constexpr const char* networks = "networks.json";
inline constexpr const char* svg_algorithm = "network_algorithm.svg";
inline constexpr const char* svg_human = "network_human.svg";
inline constexpr const char* svg_difference = "network_difference.svg";
inline constexpr const char* stats_json = "stats.json";
inline constexpr const char* stats_csv = "stats.csv";
inline constexpr const char* report = "report.html";
} // namespace files

/// A run directory with staged writes. Reads see staged content first;
/// commit() publishes every staged file (each by atomic rename) and then
/// refreshes the manifest. Nothing touches disk before commit().
class Workspace {
public:
  explicit Workspace(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  bool has(const std::string& name) const;
  std::string read(const std::string& name) const;
  /// Like read() but a missing file is a StageError naming `producer`.
  std::string require(const std::string& name, const std::string& producer) const;
  nlohmann::json require_json(const std::string& name, const std::string& producer) const;
  void put(const std::string& name, std::string data);
  void put_json(const std::string& name, const nlohmann::json& j);

  RunConfig config() const;

  /// Publishes staged files; `stages` are recorded as completed.
  void commit(const std::vector<std::string>& stages);
  const std::map<std::string, std::string>& staged() const { return staged_; }

private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> staged_;
};

/// Run id: first 16 hex digits of sha256 over the canonical config (input
/// paths omitted) and the digests of the copied inputs.
std::string run_id(const Workspace& ws);

/// Which external inputs store_config copies into the run directory.
struct InputCopies {
  bool scheme = false;
  bool reference = false;
  bool stopwords = false;
};

/// Stores `config` as the run's config.json and copies the flagged inputs.
void store_config(Workspace& ws, const RunConfig& config, InputCopies copies);

// Stages. Each reads its inputs through the workspace and stages its outputs.
void ingest(Workspace& ws, const RunConfig& config);
void preprocess_stage(Workspace& ws);
void topics_stage(Workspace& ws);
/// Derives scheme.json from the topic summaries and the input scheme, then codes.
void code_stage(Workspace& ws);
/// Codes the corpus with the current scheme.json only.
void recode(Workspace& ws);
void agreement_stage(Workspace& ws);
void ena_stage(Workspace& ws);
void stats_stage(Workspace& ws);
void report_stage(Workspace& ws);

/// Stage names in execution order.
const std::vector<std::string>& stage_names();

/// Runs the named stage and commits it.
void run_stage(const std::filesystem::path& dir, const std::string& stage);

/// ingest through report, committed stage by stage.
void run_all(const std::filesystem::path& dir, const RunConfig& config);

/// The stored scheme revision moved on since the client read it.
class RevisionConflict : public Error {
public:
  using Error::Error;
};

class InvalidScheme : public Error {
public:
  explicit InvalidScheme(std::vector<autocoder::FieldError> errors)
      : Error("invalid scheme"), errors_(std::move(errors)) {}
  const std::vector<autocoder::FieldError>& errors() const { return errors_; }

private:
  std::vector<autocoder::FieldError> errors_;
};

/// Stages a validated replacement of scheme.json plus every downstream
/// artifact; the caller publishes with commit(update.stages) or drops the
/// workspace. `expected_revision` must equal the stored revision.
struct SchemeUpdate {
  int revision = 0;
  std::vector<std::string> stages;
};
SchemeUpdate update_scheme(Workspace& ws, const nlohmann::json& scheme, int expected_revision);

/// Posts behind one network connection: the unit's rows from `source` that
/// carry `code_a` or `code_b`, with the keywords that fired for algorithm rows.
struct Excerpt {
  EntryId entry_id = 0;
  std::string text;
  std::vector<std::string> codes;                            // flagged codes
  std::map<std::string, std::vector<std::string>> keywords; // code -> matched keywords
};
std::vector<Excerpt> connection_excerpts(const Workspace& ws, const std::string& unit, Source source,
                                         const std::string& code_a, const std::string& code_b);

/// Revision stored in scheme.json (0 before the code stage).
int scheme_revision(const Workspace& ws);

} // namespace enacode::pipeline
