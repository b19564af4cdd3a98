#include "enacode/topics.hpp"

#include "enacode/csv.hpp"
#include "enacode/error.hpp"
#include "enacode/numfmt.hpp"
#include "enacode/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace enacode::topics {

Documents encode(const std::vector<preprocess::TokenStream>& streams,
                 const preprocess::Vocabulary& vocab) {
  Documents out;
  out.vocab_size = vocab.size();
  out.docs.reserve(streams.size());
  out.refs.reserve(streams.size());
  for (const auto& s : streams) {
    std::vector<int> ids;
    ids.reserve(s.tokens.size());
    for (const auto& t : s.tokens)
      if (int w = vocab.index_of(t); w >= 0)
        ids.push_back(w);
    out.docs.push_back(std::move(ids));
    out.refs.push_back(s.post_ref);
  }
  return out;
}

double LdaModel::word_probability(int k, std::size_t w) const {
  return (topic_word(k, w) + beta) / (n_k[k] + static_cast<double>(V) * beta);
}

void LdaModel::check_invariants(const Documents* docs) const {
  if (n_dk.size() != D * K || n_kw.size() != static_cast<std::size_t>(K) * V ||
      n_k.size() != static_cast<std::size_t>(K))
    throw std::logic_error("count table shapes do not match K, V, D");
  for (int k = 0; k < K; ++k) {
    long sum = 0;
    for (std::size_t w = 0; w < V; ++w)
      sum += topic_word(k, w);
    if (sum != n_k[k])
      throw std::logic_error(fmt::format("sum_w n_kw[{}] = {} but n_k = {}", k, sum, n_k[k]));
  }
  if (z.empty())
    return;
  if (z.size() != D)
    throw std::logic_error("assignment table has wrong document count");
  std::vector<int> recount_kw(n_kw.size(), 0);
  for (std::size_t d = 0; d < D; ++d) {
    long row = 0;
    for (int k = 0; k < K; ++k)
      row += doc_topic(d, k);
    if (row != static_cast<long>(z[d].size()))
      throw std::logic_error(
          fmt::format("sum_k n_dk[{}] = {} but document length is {}", d, row, z[d].size()));
    std::vector<int> recount(K, 0);
    for (std::size_t i = 0; i < z[d].size(); ++i) {
      const int k = z[d][i];
      if (k < 0 || k >= K)
        throw std::logic_error("topic assignment out of range");
      ++recount[k];
      if (docs)
        ++recount_kw[k * V + docs->docs[d][i]];
    }
    for (int k = 0; k < K; ++k)
      if (recount[k] != doc_topic(d, k))
        throw std::logic_error(fmt::format("n_dk[{},{}] disagrees with assignments", d, k));
  }
  if (docs && recount_kw != n_kw)
    throw std::logic_error("n_kw disagrees with assignments");
}

LdaModel fit(const Documents& docs, const LdaParams& params, const SweepObserver& observer) {
  if (docs.docs.empty())
    throw ConfigError("cannot fit a topic model on an empty document set");
  if (params.k < 1)
    throw ConfigError("number of topics must be at least 1");
  if (static_cast<std::size_t>(params.k) > docs.docs.size())
    throw ConfigError(fmt::format("K = {} exceeds the number of documents ({})", params.k,
                                  docs.docs.size()));
  if (params.iterations < 1)
    throw ConfigError("iterations must be at least 1");
  if (docs.vocab_size == 0)
    throw ConfigError("vocabulary is empty");
  if (!(params.beta > 0.0))
    throw ConfigError("beta must be positive");

  LdaModel m;
  m.K = params.k;
  m.alpha = params.resolved_alpha();
  m.beta = params.beta;
  m.seed = params.seed;
  m.iterations = params.iterations;
  m.V = docs.vocab_size;
  m.D = docs.docs.size();
  m.doc_refs = docs.refs;
  m.n_dk.assign(m.D * m.K, 0);
  m.n_kw.assign(m.K * m.V, 0);
  m.n_k.assign(m.K, 0);
  m.z.resize(m.D);

  std::vector<std::size_t> order(m.D);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return docs.refs[a] < docs.refs[b]; });

  Rng rng(params.seed);
  const auto K = static_cast<std::uint32_t>(m.K);
  for (auto d : order) {
    const auto& doc = docs.docs[d];
    m.z[d].resize(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int k = static_cast<int>(rng.below(K));
      m.z[d][i] = k;
      ++m.n_dk[d * m.K + k];
      ++m.n_kw[k * m.V + doc[i]];
      ++m.n_k[k];
    }
  }

  const double vbeta = static_cast<double>(m.V) * m.beta;
  std::vector<double> cumulative(m.K);
  for (int sweep = 1; sweep <= params.iterations; ++sweep) {
    for (auto d : order) {
      const auto& doc = docs.docs[d];
      int* dk = &m.n_dk[d * m.K];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const int w = doc[i];
        int k = m.z[d][i];
        --dk[k];
        --m.n_kw[k * m.V + w];
        --m.n_k[k];

        double total = 0.0;
        for (int t = 0; t < m.K; ++t) {
          total += (dk[t] + m.alpha) * (m.n_kw[t * m.V + w] + m.beta) / (m.n_k[t] + vbeta);
          cumulative[t] = total;
        }
        const double u = rng.uniform() * total;
        k = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                             cumulative.begin());
        if (k >= m.K)
          k = m.K - 1;

        m.z[d][i] = k;
        ++dk[k];
        ++m.n_kw[k * m.V + w];
        ++m.n_k[k];
      }
    }
#ifndef NDEBUG
    m.check_invariants(&docs);
#endif
    if (observer)
      observer(m, sweep);
  }
  m.check_invariants(&docs);
  return m;
}

std::vector<TopicSummary> summarize(const LdaModel& model, const preprocess::Vocabulary& vocab,
                                    std::size_t n_top) {
  if (n_top < 1 || n_top > model.V)
    throw ConfigError(fmt::format("top-word count must lie in [1, {}]", model.V));
  if (vocab.size() != model.V)
    throw SchemaError("vocabulary size does not match the model");
  std::vector<TopicSummary> out;
  std::vector<int> idx(model.V);
  for (int k = 0; k < model.K; ++k) {
    std::iota(idx.begin(), idx.end(), 0);
    // probability order equals count order within a topic
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_top), idx.end(),
                      [&](int a, int b) {
                        const int ca = model.topic_word(k, a), cb = model.topic_word(k, b);
                        return ca != cb ? ca > cb : a < b;
                      });
    TopicSummary s;
    s.topic_id = k;
    for (std::size_t r = 0; r < n_top; ++r) {
      s.term_ids.push_back(idx[r]);
      s.terms.push_back(vocab.terms[idx[r]]);
      s.probabilities.push_back(model.word_probability(k, idx[r]));
    }
    out.push_back(std::move(s));
  }
  return out;
}

CoDocumentIndex::CoDocumentIndex(const Documents& docs)
    : postings_(docs.vocab_size), num_docs_(docs.docs.size()) {
  for (std::size_t d = 0; d < docs.docs.size(); ++d)
    for (int w : docs.docs[d])
      if (postings_[w].empty() || postings_[w].back() != static_cast<int>(d))
        postings_[w].push_back(static_cast<int>(d));
}

int CoDocumentIndex::doc_freq(int term) const {
  return static_cast<int>(postings_.at(static_cast<std::size_t>(term)).size());
}

int CoDocumentIndex::co_doc_freq(int a, int b) const {
  const auto& pa = postings_.at(static_cast<std::size_t>(a));
  const auto& pb = postings_.at(static_cast<std::size_t>(b));
  int n = 0;
  auto i = pa.begin();
  auto j = pb.begin();
  while (i != pa.end() && j != pb.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

double umass(const std::vector<int>& ranked_terms, const CoDocumentIndex& index) {
  double score = 0.0;
  for (std::size_t i = 1; i < ranked_terms.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const int dj = index.doc_freq(ranked_terms[j]);
      if (dj == 0)
        throw Error("coherence: a top word never occurs in the training documents");
      score += std::log((index.co_doc_freq(ranked_terms[i], ranked_terms[j]) + 1.0) / dj);
    }
  return score;
}

double umass(const std::vector<std::string>& ranked_words, const preprocess::Vocabulary& vocab,
             const CoDocumentIndex& index) {
  std::vector<int> ids;
  for (const auto& w : ranked_words) {
    const int id = vocab.index_of(w);
    if (id < 0)
      throw Error("coherence: '" + w + "' is not in the vocabulary");
    ids.push_back(id);
  }
  return umass(ids, index);
}

double coherence(const LdaModel& model, const CoDocumentIndex& index, std::size_t n_top) {
  const std::size_t n = std::min(n_top, model.V);
  double sum = 0.0;
  std::vector<int> idx(model.V);
  for (int k = 0; k < model.K; ++k) {
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                      [&](int a, int b) {
                        const int ca = model.topic_word(k, a), cb = model.topic_word(k, b);
                        return ca != cb ? ca > cb : a < b;
                      });
    sum += umass(std::vector<int>(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n)), index);
  }
  return sum / model.K;
}

namespace {

void check_k_range(const std::vector<int>& k_range) {
  if (k_range.empty())
    throw ConfigError("K range is empty");
}

Selection assemble(const std::vector<int>& k_range, std::vector<std::optional<LdaModel>>& models,
                   const std::vector<double>& scores) {
  Selection sel;
  std::optional<int> best;
  for (std::size_t i = 0; i < k_range.size(); ++i) {
    const int k = k_range[i];
    sel.report.per_k[k] = scores[i];
    sel.models.emplace(k, std::move(*models[i]));
  }
  // ascending K, so ties keep the smaller; means over different K can differ
  // in the last bits, hence the tolerance
  for (const auto& [k, score] : sel.report.per_k) {
    if (!best) {
      best = k;
      continue;
    }
    const double top = sel.report.per_k.at(*best);
    if (score > top + 1e-12 * std::max(1.0, std::fabs(top)))
      best = k;
  }
  sel.report.selected_k = *best;
  return sel;
}

LdaParams params_for(const LdaParams& base, int k) {
  LdaParams p = base;
  p.k = k;
  p.seed = derive_seed(base.seed, static_cast<std::uint64_t>(k));
  return p;
}

} // namespace

Selection select_k(const Documents& docs, const std::vector<int>& k_range, const LdaParams& base,
                   std::size_t n_top) {
  check_k_range(k_range);
  const CoDocumentIndex index(docs);
  const auto n = static_cast<std::ptrdiff_t>(k_range.size());
  std::vector<std::optional<LdaModel>> models(k_range.size());
  std::vector<double> scores(k_range.size(), 0.0);
  std::vector<std::exception_ptr> errors(k_range.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      models[i] = fit(docs, params_for(base, k_range[i]));
      scores[i] = coherence(*models[i], index, n_top);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i])
      continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("K = {}: {}", k_range[i], e.what()));
    }
  }
  return assemble(k_range, models, scores);
}

namespace serial {

Selection select_k(const Documents& docs, const std::vector<int>& k_range, const LdaParams& base,
                   std::size_t n_top) {
  check_k_range(k_range);
  const CoDocumentIndex index(docs);
  std::vector<std::optional<LdaModel>> models(k_range.size());
  std::vector<double> scores(k_range.size(), 0.0);
  for (std::size_t i = 0; i < k_range.size(); ++i) {
    try {
      models[i] = fit(docs, params_for(base, k_range[i]));
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("K = {}: {}", k_range[i], e.what()));
    }
    scores[i] = coherence(*models[i], index, n_top);
  }
  return assemble(k_range, models, scores);
}

} // namespace serial

std::vector<int> parse_k_range(const std::string& text) {
  auto parse_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 1)
      throw ConfigError("invalid K range '" + text + "' (expected N or A..B)");
    return v;
  };
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = parse_int(text.substr(0, dots));
    const int hi = parse_int(text.substr(dots + 2));
    if (hi < lo)
      throw ConfigError("invalid K range '" + text + "': upper bound below lower bound");
    for (int k = lo; k <= hi; ++k)
      out.push_back(k);
  } else {
    out.push_back(parse_int(text));
  }
  return out;
}

void to_json(nlohmann::json& j, const LdaModel& m) {
  j = nlohmann::json{{"K", m.K},
                     {"alpha", m.alpha},
                     {"beta", m.beta},
                     {"seed", m.seed},
                     {"iterations", m.iterations},
                     {"rng", std::string(kRngName)},
                     {"V", m.V},
                     {"D", m.D},
                     {"doc_refs", m.doc_refs},
                     {"n_kw", m.n_kw},
                     {"n_dk", m.n_dk}};
}

void from_json(const nlohmann::json& j, LdaModel& m) {
  j.at("K").get_to(m.K);
  j.at("alpha").get_to(m.alpha);
  j.at("beta").get_to(m.beta);
  j.at("seed").get_to(m.seed);
  j.at("iterations").get_to(m.iterations);
  j.at("V").get_to(m.V);
  j.at("D").get_to(m.D);
  j.at("doc_refs").get_to(m.doc_refs);
  j.at("n_kw").get_to(m.n_kw);
  j.at("n_dk").get_to(m.n_dk);
  if (m.n_kw.size() != static_cast<std::size_t>(m.K) * m.V || m.n_dk.size() != m.D * m.K)
    throw SchemaError("model checkpoint matrices do not match K, V, D");
  m.n_k.assign(m.K, 0);
  for (int k = 0; k < m.K; ++k)
    for (std::size_t w = 0; w < m.V; ++w)
      m.n_k[k] += m.topic_word(k, w);
  m.z.clear();
}

std::string summaries_csv(const std::vector<TopicSummary>& summaries) {
  std::ostringstream out;
  csv::write_row(out, {"topic_id", "rank", "term", "prob"});
  for (const auto& s : summaries)
    for (std::size_t r = 0; r < s.terms.size(); ++r)
      csv::write_row(out, {std::to_string(s.topic_id), std::to_string(r + 1), s.terms[r],
                           fmt::format("{:.6f}", s.probabilities[r])});
  return out.str();
}

std::vector<TopicSummary> parse_summaries_csv(const std::string& text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front().fields != std::vector<std::string>{"topic_id", "rank", "term", "prob"})
    throw SchemaError("topic summary CSV must have columns topic_id,rank,term,prob");
  std::map<int, TopicSummary> by_topic;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 4)
      throw RowError(records[i].line, "expected 4 fields");
    try {
      const int topic = std::stoi(f[0]);
      auto& s = by_topic[topic];
      s.topic_id = topic;
      s.terms.push_back(f[2]);
      s.probabilities.push_back(std::stod(f[3]));
    } catch (const std::logic_error&) {
      throw RowError(records[i].line, "malformed topic summary row");
    }
  }
  std::vector<TopicSummary> out;
  for (auto& [k, s] : by_topic)
    out.push_back(std::move(s));
  return out;
}

std::string coherence_csv(const CoherenceReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"k", "coherence", "selected"});
  for (const auto& [k, score] : report.per_k)
    csv::write_row(out, {std::to_string(k), fixed(score, 6),
                         k == report.selected_k ? "1" : "0"});
  return out.str();
}

} // namespace enacode::topics
