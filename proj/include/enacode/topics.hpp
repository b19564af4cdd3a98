#pragma once

#include "enacode/corpus.hpp"
#include "enacode/preprocess.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace enacode::topics {

struct LdaParams {
  int k = 5;
  double alpha = 0.0; // <= 0 selects 50 / k
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 42;

  double resolved_alpha() const { return alpha > 0.0 ? alpha : 50.0 / k; }
};

/// Documents as term indices; tokens outside the vocabulary are dropped.
struct Documents {
  std::vector<std::vector<int>> docs;
  std::vector<EntryId> refs;
  std::size_t vocab_size = 0;
};

Documents encode(const std::vector<preprocess::TokenStream>& streams,
                 const preprocess::Vocabulary& vocab);

class LdaModel {
public:
  int K = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  std::size_t V = 0;
  std::size_t D = 0;

  std::vector<EntryId> doc_refs;
  std::vector<std::vector<int>> z; // per-token topics; empty for loaded checkpoints
  std::vector<int> n_dk;           // D x K, row-major
  std::vector<int> n_kw;           // K x V, row-major
  std::vector<int> n_k;

  int doc_topic(std::size_t d, int k) const { return n_dk[d * K + k]; }
  int topic_word(int k, std::size_t w) const { return n_kw[k * V + w]; }

  /// Smoothed topic-word probability (n_kw + beta) / (n_k + V beta).
  double word_probability(int k, std::size_t w) const;

  /// Throws std::logic_error when a count table disagrees with z.
  void check_invariants(const Documents* docs = nullptr) const;
};

using SweepObserver = std::function<void(const LdaModel&, int sweep)>;

/// Collapsed Gibbs sampling. Documents are swept in ascending entry id order,
/// so permuting the input only permutes the rows of n_dk.
LdaModel fit(const Documents& docs, const LdaParams& params, const SweepObserver& observer = {});

struct TopicSummary {
  int topic_id = 0;
  std::vector<int> term_ids;
  std::vector<std::string> terms;
  std::vector<double> probabilities;
};

/// Top n words per topic, descending probability, ties to the lower term index.
std::vector<TopicSummary> summarize(const LdaModel& model, const preprocess::Vocabulary& vocab,
                                    std::size_t n_top);

/// Document sets per term over the training documents.
class CoDocumentIndex {
public:
  explicit CoDocumentIndex(const Documents& docs);

  int doc_freq(int term) const;
  int co_doc_freq(int a, int b) const;
  std::size_t num_docs() const { return num_docs_; }

private:
  std::vector<std::vector<int>> postings_;
  std::size_t num_docs_ = 0;
};

/// UMass: sum over i > j of log((D(w_i, w_j) + 1) / D(w_j)) for words in
/// descending probability order.
double umass(const std::vector<int>& ranked_terms, const CoDocumentIndex& index);
double umass(const std::vector<std::string>& ranked_words, const preprocess::Vocabulary& vocab,
             const CoDocumentIndex& index);

/// Mean UMass over the model's topics.
double coherence(const LdaModel& model, const CoDocumentIndex& index, std::size_t n_top);

struct CoherenceReport {
  std::map<int, double> per_k;
  int selected_k = 0;
};

struct Selection {
  CoherenceReport report;
  std::map<int, LdaModel> models;

  const LdaModel& selected() const { return models.at(report.selected_k); }
};

/// One fit per K with seed derive_seed(base.seed, K); argmax coherence, ties
/// (relative difference below 1e-12) to the smaller K. Fits run in parallel over K.
Selection select_k(const Documents& docs, const std::vector<int>& k_range, const LdaParams& base,
                   std::size_t n_top);

namespace serial {
Selection select_k(const Documents& docs, const std::vector<int>& k_range, const LdaParams& base,
                   std::size_t n_top);
}

/// Parses "5" or "2..8".
std::vector<int> parse_k_range(const std::string& text);

void to_json(nlohmann::json& j, const LdaModel& m);
void from_json(const nlohmann::json& j, LdaModel& m);

std::string summaries_csv(const std::vector<TopicSummary>& summaries);
std::vector<TopicSummary> parse_summaries_csv(const std::string& text);
std::string coherence_csv(const CoherenceReport& report);

} // namespace enacode::topics
