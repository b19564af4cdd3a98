#pragma once

// Synthetic corpora with known topics.

#include "enacode/preprocess.hpp"
#include "enacode/rng.hpp"
#include "enacode/topics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace testsupport {

struct PlantedCorpus {
  enacode::topics::Documents docs;
  enacode::preprocess::Vocabulary vocab;
  std::vector<std::vector<std::string>> truth; // top words per planted topic, most probable first
};

// `topics` topics, each owning `own` words with Zipf weights; a share
// `noise` of every document comes from a common background vocabulary.
inline PlantedCorpus planted_corpus(int topics, int docs_per_topic, int doc_len, std::uint64_t seed,
                                    int own = 12, int background = 60, double noise = 0.1,
                                    std::size_t n_truth = 10) {
  std::vector<std::string> words;
  for (int k = 0; k < topics; ++k)
    for (int i = 0; i < own; ++i)
      words.push_back(fmt::format("t{}w{:02}", k, i));
  for (int i = 0; i < background; ++i)
    words.push_back(fmt::format("zbg{:03}", i));
  std::vector<std::string> sorted = words;
  std::sort(sorted.begin(), sorted.end());
  std::map<std::string, int> id;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    id[sorted[i]] = static_cast<int>(i);

  std::vector<double> zipf(own);
  double total = 0.0;
  for (int i = 0; i < own; ++i)
    total += zipf[i] = 1.0 / (i + 1);
  for (auto& z : zipf)
    z /= total;

  PlantedCorpus out;
  enacode::Rng rng(seed);
  std::vector<int> df(sorted.size(), 0);
  enacode::EntryId ref = 1;
  for (int k = 0; k < topics; ++k) {
    for (int d = 0; d < docs_per_topic; ++d) {
      std::vector<int> doc;
      for (int t = 0; t < doc_len; ++t) {
        if (rng.uniform() < noise) {
          doc.push_back(id[fmt::format("zbg{:03}", rng.below(static_cast<std::uint32_t>(background)))]);
          continue;
        }
        double u = rng.uniform(), acc = 0.0;
        int w = own - 1;
        for (int i = 0; i < own; ++i)
          if ((acc += zipf[i]) > u) {
            w = i;
            break;
          }
        doc.push_back(id[fmt::format("t{}w{:02}", k, w)]);
      }
      std::vector<int> seen = doc;
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (int w : seen)
        ++df[w];
      out.docs.docs.push_back(std::move(doc));
      out.docs.refs.push_back(ref++);
    }
    std::vector<std::string> top;
    for (std::size_t i = 0; i < n_truth; ++i)
      top.push_back(fmt::format("t{}w{:02}", k, i));
    out.truth.push_back(top);
  }
  out.docs.vocab_size = sorted.size();
  out.vocab.terms = sorted;
  out.vocab.doc_freq = df;
  out.vocab.num_docs = out.docs.docs.size();
  return out;
}

// Planted topics whose top words overlap some learned topic in at least
// `min_overlap` positions.
inline int recovered_topics(const PlantedCorpus& c, const std::vector<enacode::topics::TopicSummary>& learned,
                            std::size_t min_overlap) {
  int recovered = 0;
  for (const auto& truth : c.truth) {
    std::size_t best = 0;
    for (const auto& s : learned) {
      std::size_t hit = 0;
      for (const auto& w : truth)
        hit += std::find(s.terms.begin(), s.terms.end(), w) != s.terms.end();
      best = std::max(best, hit);
    }
    recovered += best >= min_overlap;
  }
  return recovered;
}

} // namespace testsupport
