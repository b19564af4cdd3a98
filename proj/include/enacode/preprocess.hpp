#pragma once

#include "enacode/corpus.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace enacode::preprocess {

/// Version tag of the built-in English stopword list; bump on any edit.
inline constexpr std::string_view kStopwordListVersion = "enacode-en-1";
const std::vector<std::string>& builtin_stopwords();

struct Config {
  std::string stopword_file; // empty: built-in list
  std::size_t min_token_length = 2;
  bool entity_removal = true;
  bool stemming = true;
  int min_doc_freq = 2;
  double max_doc_fraction = 0.9;
  int ngram_min_count = 5;
  double ngram_threshold = 10.0;
};

void to_json(nlohmann::json& j, const Config& c);
void from_json(const nlohmann::json& j, Config& c);
Config load_config(const std::string& path);

/// A word as it appears in the text after NFC normalization.
struct RawToken {
  std::string text;
  bool sentence_initial = false;
};

/// NFC-normalizes and splits on non-alphanumeric code points.
std::vector<RawToken> tokenize(std::string_view utf8);
std::string to_lower(std::string_view utf8);

/// Lowercase forms seen anywhere in a corpus. A title-case token that is not
/// sentence-initial and whose lowercase form never occurs is treated as a
/// named entity. All-caps tokens (acronyms) are never entities.
class EntityLexicon {
public:
  EntityLexicon() = default;
  static EntityLexicon build(const Corpus& corpus);
  static EntityLexicon build(const std::vector<std::string>& texts);

  bool is_entity(const RawToken& token) const;
  std::size_t size() const { return lowercase_.size(); }

private:
  std::unordered_set<std::string> lowercase_;
};

struct TokenStream {
  EntryId post_ref = 0;
  std::vector<std::string> tokens;
};

/// Every intermediate form keyword matching needs.
struct AnalyzedPost {
  EntryId post_ref = 0;
  std::vector<std::string> lowered;     // entity-free, lowercased, not stemmed
  std::vector<std::string> with_stops;  // stemmed, stopwords retained
  std::vector<std::string> unigrams;    // stemmed, stopwords removed
};

class Normalizer {
public:
  explicit Normalizer(Config config, EntityLexicon lexicon = {});

  const Config& config() const { return config_; }
  bool is_stopword(const std::string& lowered) const { return stopwords_.count(lowered) > 0; }

  AnalyzedPost analyze(const Post& post) const;
  TokenStream normalize(const Post& post) const;

  /// Keyword phrases go through the same chain without entity removal and
  /// with stopwords retained.
  std::vector<std::string> normalize_phrase(std::string_view phrase) const;

private:
  Config config_;
  EntityLexicon lexicon_;
  std::unordered_set<std::string> stopwords_;
};

/// Single-post form; the entity lexicon is built from the post alone.
TokenStream normalize(const Post& post, const Config& config);

/// Per-document normalization, OpenMP-parallel, output in corpus order.
std::vector<TokenStream> normalize_corpus(const Corpus& corpus, const Normalizer& normalizer);
std::vector<AnalyzedPost> analyze_corpus(const Corpus& corpus, const Normalizer& normalizer);

namespace serial {
std::vector<TokenStream> normalize_corpus(const Corpus& corpus, const Normalizer& normalizer);
std::vector<AnalyzedPost> analyze_corpus(const Corpus& corpus, const Normalizer& normalizer);
} // namespace serial

/// Collocation score (count(a,b) - min_count) * N / (count(a) * count(b)).
double collocation_score(std::size_t pair_count, std::size_t count_a, std::size_t count_b,
                         std::size_t total_tokens, int min_count);

/// Two greedy left-to-right phrase passes: the first joins qualifying pairs
/// into bigrams, the second joins over the bigrammed streams into trigrams.
/// A joined token never carries more than two underscores.
std::vector<TokenStream> detect_ngrams(const std::vector<TokenStream>& streams, int min_count,
                                       double threshold);

struct Vocabulary {
  std::vector<std::string> terms; // lexicographic
  std::vector<int> doc_freq;      // aligned with terms
  std::size_t num_docs = 0;

  std::size_t size() const { return terms.size(); }
  int index_of(const std::string& term) const; // -1 when absent
  bool contains(const std::string& term) const { return index_of(term) >= 0; }
};

void to_json(nlohmann::json& j, const Vocabulary& v);
void from_json(const nlohmann::json& j, Vocabulary& v);

/// Keeps terms with doc_freq >= min_doc_freq and doc_freq / D <= max_doc_fraction.
Vocabulary build_vocabulary(const std::vector<TokenStream>& streams, int min_doc_freq,
                            double max_doc_fraction);

/// Full chain: normalize, n-grams, vocabulary.
struct Result {
  std::vector<TokenStream> streams;
  Vocabulary vocabulary;
};
Result run(const Corpus& corpus, const Config& config);

void to_json(nlohmann::json& j, const TokenStream& s);
void from_json(const nlohmann::json& j, TokenStream& s);

} // namespace enacode::preprocess
