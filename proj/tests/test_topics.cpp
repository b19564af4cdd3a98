#include "enacode/error.hpp"
#include "enacode/topics.hpp"

#include "planted.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace enacode;
using topics::Documents;
using topics::LdaParams;

namespace {

// Two documents over disjoint vocabularies: terms 0..4 and 5..9.
Documents two_docs() {
  Documents d;
  d.vocab_size = 10;
  d.refs = {1, 2};
  d.docs.resize(2);
  for (int r = 0; r < 12; ++r)
    for (int w = 0; w < 5; ++w) {
      d.docs[0].push_back(w);
      d.docs[1].push_back(5 + w);
    }
  return d;
}

preprocess::Vocabulary vocab_of(std::size_t v) {
  preprocess::Vocabulary vocab;
  for (std::size_t i = 0; i < v; ++i)
    vocab.terms.push_back("w" + std::string(1, static_cast<char>('a' + i)));
  vocab.doc_freq.assign(v, 1);
  return vocab;
}

} // namespace

TEST_CASE("encode drops out-of-vocabulary tokens") {
  preprocess::Vocabulary v;
  v.terms = {"apple", "motor"};
  v.doc_freq = {1, 1};
  const auto docs = topics::encode({{7, {"apple", "zebra", "motor", "apple"}}}, v);
  CHECK(docs.docs[0] == std::vector<int>{0, 1, 0});
  CHECK(docs.refs[0] == 7);
  CHECK(docs.vocab_size == 2);
}

TEST_CASE("two planted documents separate into two topics") {
  LdaParams p;
  p.k = 2;
  p.alpha = 0.1;
  p.iterations = 200;
  const auto docs = two_docs();
  const auto m = topics::fit(docs, p);
  const auto tops = topics::summarize(m, vocab_of(10), 5);
  for (const auto& s : tops) {
    const bool low = s.term_ids.front() < 5;
    for (int id : s.term_ids)
      CHECK((id < 5) == low);
  }
  CHECK((tops[0].term_ids.front() < 5) != (tops[1].term_ids.front() < 5));
}

TEST_CASE("K = 1 reproduces smoothed term frequencies") {
  LdaParams p;
  p.k = 1;
  p.iterations = 5;
  Documents docs;
  docs.vocab_size = 3;
  docs.refs = {1, 2};
  docs.docs = {{0, 0, 1}, {0, 2, 2, 2}};
  const auto m = topics::fit(docs, p);
  for (const auto& z : m.z)
    for (int k : z)
      CHECK(k == 0);
  const double n = 7, vb = 3 * p.beta;
  CHECK(m.word_probability(0, 0) == doctest::Approx((3 + p.beta) / (n + vb)));
  CHECK(m.word_probability(0, 1) == doctest::Approx((1 + p.beta) / (n + vb)));
  CHECK(m.word_probability(0, 2) == doctest::Approx((3 + p.beta) / (n + vb)));

  const auto tops = topics::summarize(m, vocab_of(3), 3);
  CHECK(tops[0].term_ids == std::vector<int>{0, 2, 1}); // tie 0/2 goes to the lower index
}

TEST_CASE("count invariants hold after every sweep") {
  const auto c = testsupport::planted_corpus(3, 20, 30, 11);
  LdaParams p;
  p.k = 3;
  p.iterations = 40;
  int sweeps = 0;
  topics::fit(c.docs, p, [&](const topics::LdaModel& m, int sweep) {
    CHECK(sweep == ++sweeps);
    CHECK_NOTHROW(m.check_invariants(&c.docs));
    for (std::size_t d = 0; d < m.D; ++d) {
      int row = 0;
      for (int k = 0; k < m.K; ++k)
        row += m.doc_topic(d, k);
      CHECK(row == static_cast<int>(c.docs.docs[d].size()));
    }
    for (int k = 0; k < m.K; ++k) {
      long col = 0;
      for (std::size_t w = 0; w < m.V; ++w)
        col += m.topic_word(k, w);
      CHECK(col == m.n_k[k]);
    }
  });
  CHECK(sweeps == 40);
}

TEST_CASE("check_invariants detects a corrupted table") {
  LdaParams p;
  p.k = 2;
  p.iterations = 3;
  const auto docs = two_docs();
  auto m = topics::fit(docs, p);
  m.n_kw[0] += 1;
  CHECK_THROWS_AS(m.check_invariants(&docs), std::logic_error);
}

TEST_CASE("determinism and document order") {
  const auto c = testsupport::planted_corpus(3, 10, 20, 5);
  LdaParams p;
  p.k = 3;
  p.iterations = 30;
  const auto a = topics::fit(c.docs, p);
  const auto b = topics::fit(c.docs, p);
  CHECK(a.z == b.z);
  CHECK(a.n_kw == b.n_kw);

  p.seed = 43;
  CHECK(topics::fit(c.docs, p).z != a.z);
  p.seed = 42;

  // reversing the input permutes rows only
  Documents rev = c.docs;
  std::reverse(rev.docs.begin(), rev.docs.end());
  std::reverse(rev.refs.begin(), rev.refs.end());
  const auto r = topics::fit(rev, p);
  CHECK(r.n_kw == a.n_kw);
  for (std::size_t d = 0; d < a.D; ++d)
    CHECK(r.z[a.D - 1 - d] == a.z[d]);
}

TEST_CASE("fit rejects impossible settings") {
  LdaParams p;
  p.k = 3;
  CHECK_THROWS_AS(topics::fit(two_docs(), p), ConfigError);
  CHECK_THROWS_AS(topics::fit(Documents{}, LdaParams{}), ConfigError);
}

TEST_CASE("UMass against the direct formula") {
  // 20 docs; term 0 and 1 in docs 0..9, term 2 in docs 10..19
  Documents docs;
  docs.vocab_size = 3;
  for (int d = 0; d < 20; ++d) {
    docs.refs.push_back(d + 1);
    docs.docs.push_back(d < 10 ? std::vector<int>{0, 1} : std::vector<int>{2});
  }
  const topics::CoDocumentIndex index(docs);
  CHECK(index.doc_freq(0) == 10);
  CHECK(index.co_doc_freq(0, 1) == 10);
  CHECK(index.co_doc_freq(0, 2) == 0);

  CHECK(topics::umass(std::vector<int>{0}, index) == 0.0);
  CHECK(topics::umass(std::vector<int>{0, 1}, index) == doctest::Approx(std::log(11.0 / 10.0)));
  CHECK(topics::umass(std::vector<int>{0, 1}, index) == doctest::Approx(0.0953).epsilon(1e-3));
  CHECK(topics::umass(std::vector<int>{0, 2}, index) == doctest::Approx(std::log(1.0 / 10.0)));
  CHECK(topics::umass(std::vector<int>{0, 2}, index) == doctest::Approx(-2.3026).epsilon(1e-4));
}

TEST_CASE("UMass decreases when a co-document count drops") {
  Documents docs;
  docs.vocab_size = 3;
  for (int d = 0; d < 10; ++d) {
    docs.refs.push_back(d + 1);
    docs.docs.push_back({0, 1, 2});
  }
  const topics::CoDocumentIndex full(docs);
  docs.docs[3] = {0, 2}; // term 1 leaves one doc: D(1, 0) drops, D(0) unchanged
  docs.docs.push_back({1});
  docs.refs.push_back(11);
  const topics::CoDocumentIndex less(docs);
  const std::vector<int> ranked{0, 1, 2};
  CHECK(topics::umass(ranked, less) < topics::umass(ranked, full));
}

TEST_CASE("K range parsing") {
  CHECK(topics::parse_k_range("5") == std::vector<int>{5});
  CHECK(topics::parse_k_range("2..4") == std::vector<int>{2, 3, 4});
  CHECK_THROWS_AS(topics::parse_k_range("4..2"), ConfigError);
  CHECK_THROWS_AS(topics::parse_k_range("x"), ConfigError);
}

TEST_CASE("select_k with a single K") {
  const auto c = testsupport::planted_corpus(3, 10, 20, 9);
  LdaParams p;
  p.iterations = 20;
  const auto sel = topics::select_k(c.docs, {3}, p, 5);
  CHECK(sel.report.selected_k == 3);
  CHECK(sel.report.per_k.count(3) == 1);
  CHECK(sel.selected().K == 3);
  CHECK(sel.selected().seed == derive_seed(42, 3));
}

TEST_CASE("select_k breaks ties to the smaller K") {
  // one repeated document: every topic's top words co-occur everywhere,
  // so every K scores the same
  Documents docs;
  docs.vocab_size = 2;
  for (int d = 0; d < 6; ++d) {
    docs.refs.push_back(d + 1);
    docs.docs.push_back({0, 1});
  }
  LdaParams p;
  p.iterations = 5;
  const auto sel = topics::select_k(docs, {2, 3, 4}, p, 2);
  CHECK(sel.report.per_k.at(2) == sel.report.per_k.at(4));
  CHECK(sel.report.selected_k == 2);
}

TEST_CASE("model checkpoint and summaries round-trip") {
  const auto c = testsupport::planted_corpus(2, 5, 10, 3);
  LdaParams p;
  p.k = 2;
  p.iterations = 10;
  const auto m = topics::fit(c.docs, p);
  const nlohmann::json j = m;
  const auto back = j.get<topics::LdaModel>();
  CHECK(back.n_kw == m.n_kw);
  CHECK(back.n_dk == m.n_dk);
  CHECK(back.doc_refs == m.doc_refs);

  const auto sums = topics::summarize(m, c.vocab, 4);
  const auto parsed = topics::parse_summaries_csv(topics::summaries_csv(sums));
  REQUIRE(parsed.size() == sums.size());
  CHECK(parsed[1].terms == sums[1].terms);
}
