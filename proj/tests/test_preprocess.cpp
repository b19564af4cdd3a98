#include "enacode/corpus.hpp"
#include "enacode/error.hpp"
#include "enacode/preprocess.hpp"
#include "enacode/stem.hpp"

#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

using namespace enacode;
using preprocess::TokenStream;
using Tokens = std::vector<std::string>;

namespace {

Post post(const std::string& text, EntryId id = 1) {
  return Post{id, "u", "2021-01-01", text, std::nullopt};
}

Corpus corpus_of(const std::vector<std::string>& texts) {
  Corpus c;
  EntryId id = 1;
  for (const auto& t : texts)
    c.posts.push_back(post(t, id++));
  return c;
}

} // namespace

TEST_CASE("porter matches the frozen reference table") {
  std::ifstream in(testsupport::source_dir() / "tests/data/porter_original.tsv");
  REQUIRE(in);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    const auto tab = line.find('\t');
    const auto word = line.substr(0, tab);
    const auto expected = line.substr(tab + 1);
    INFO(word);
    CHECK(porter_stem(word) == expected);
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("stem is the porter fixpoint") {
  CHECK(porter_stem("agreed") == "agre");
  CHECK(stem("agreed") == "agr");
  for (const char* w : {"generalizations", "retrieval", "interleaving", "difficulties", "agreed", "as"}) {
    const auto s = stem(w);
    CHECK(stem(s) == s);
  }
  CHECK(stem("caf\xc3\xa9") == "caf\xc3\xa9");
  CHECK(stem("") == "");
}

TEST_CASE("normalization chain") {
  preprocess::Config cfg;
  CHECK(preprocess::normalize(post("Retrieval practice helps!"), cfg).tokens ==
        Tokens{"retriev", "practic", "help"});
  CHECK(preprocess::normalize(post(""), cfg).tokens.empty());
  CHECK(preprocess::normalize(post("the a an of"), cfg).tokens.empty());

  SUBCASE("short tokens dropped after stemming") {
    CHECK(preprocess::normalize(post("x y quizzes"), cfg).tokens == Tokens{"quizz"});
  }
  SUBCASE("stemming can be switched off") {
    cfg.stemming = false;
    CHECK(preprocess::normalize(post("Retrieval practice helps!"), cfg).tokens ==
          Tokens{"retrieval", "practice", "helps"});
  }
  SUBCASE("NFC: composed and decomposed forms agree") {
    cfg.stemming = false;
    const auto composed = preprocess::normalize(post("caf\xc3\xa9 menu"), cfg).tokens;
    const auto decomposed = preprocess::normalize(post("cafe\xcc\x81 menu"), cfg).tokens;
    CHECK(composed == decomposed);
    CHECK(composed.front() == "caf\xc3\xa9");
  }
}

TEST_CASE("named entities") {
  const auto corpus = corpus_of({"Thanks for sharing, Maria, your point was helpful.",
                                 "We used RPAs in class. Practice matters.",
                                 "Quizzes help. My practice improved."});
  const auto lex = preprocess::EntityLexicon::build(corpus);
  preprocess::Normalizer norm(preprocess::Config{}, lex);

  const auto first = norm.normalize(corpus.posts[0]).tokens;
  CHECK(std::find(first.begin(), first.end(), "maria") == first.end());
  CHECK(std::find(first.begin(), first.end(), "thank") != first.end()); // sentence-initial stays

  const auto second = norm.analyze(corpus.posts[1]);
  CHECK(std::find(second.lowered.begin(), second.lowered.end(), "rpas") != second.lowered.end());
  // "Practice" opens a sentence and its lowercase form occurs elsewhere
  CHECK(std::find(second.unigrams.begin(), second.unigrams.end(), "practic") != second.unigrams.end());

  CHECK(lex.is_entity({"Maria", false}));
  CHECK_FALSE(lex.is_entity({"Maria", true}));
  CHECK_FALSE(lex.is_entity({"RPA", false}));
}

TEST_CASE("phrases keep stopwords") {
  preprocess::Normalizer norm(preprocess::Config{});
  CHECK(norm.normalize_phrase("spaced out practice") == Tokens{"space", "out", "practic"});
  CHECK(norm.normalize_phrase("Desirable Difficulty") == Tokens{"desir", "difficulti"});
  const auto a = norm.analyze(post("I used spaced out practice daily"));
  CHECK(a.with_stops == Tokens{"space", "out", "practic", "daili"}); // used -> u, too short
  CHECK(a.unigrams == Tokens{"space", "practic", "daili"});
}

TEST_CASE("collocation score") {
  CHECK(preprocess::collocation_score(20, 40, 25, 1000, 5) == doctest::Approx(15.0));
  CHECK(preprocess::collocation_score(3, 0, 25, 1000, 5) == 0.0);
}

TEST_CASE("n-grams against hand enumeration") {
  // "a b a b a b" in 50 docs: count(a) = count(b) = 150, count(a b) = 150,
  // count(b a) = 100, N = 300
  std::vector<TokenStream> streams;
  for (int d = 0; d < 50; ++d)
    streams.push_back({d + 1, {"a", "b", "a", "b", "a", "b"}});

  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  std::map<std::string, std::size_t> uni;
  std::size_t n = 0;
  for (const auto& s : streams)
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      ++uni[s.tokens[i]];
      ++n;
      if (i + 1 < s.tokens.size())
        ++pairs[{s.tokens[i], s.tokens[i + 1]}];
    }
  REQUIRE(uni["a"] == 150);
  REQUIRE((pairs[{"a", "b"}]) == 150);
  REQUIRE((pairs[{"b", "a"}]) == 100);
  const double ab = (150.0 - 5) * 300 / (150.0 * 150.0);
  CHECK(preprocess::collocation_score(150, 150, 150, n, 5) == doctest::Approx(ab));

  const auto out = preprocess::detect_ngrams(streams, 5, 1.0);
  for (const auto& s : out)
    CHECK(s.tokens == Tokens{"a_b", "a_b", "a_b"}); // a_b_a_b would need three underscores

  SUBCASE("threshold above the score leaves streams alone") {
    const auto none = preprocess::detect_ngrams(streams, 5, ab + 0.01);
    CHECK(none[0].tokens == streams[0].tokens);
  }
  SUBCASE("min_count above every pair count leaves streams alone") {
    const auto none = preprocess::detect_ngrams(streams, 151, 0.0);
    CHECK(none[0].tokens == streams[0].tokens);
  }
}

TEST_CASE("trigrams form on the second pass") {
  std::vector<TokenStream> streams;
  for (int d = 0; d < 30; ++d)
    streams.push_back({d + 1, {"x" + std::to_string(d), "new", "york", "city", "y" + std::to_string(d)}});
  const auto out = preprocess::detect_ngrams(streams, 5, 1.0);
  CHECK(out[0].tokens == Tokens{"x0", "new_york_city", "y0"});
}

TEST_CASE("a frequent collocation becomes one token") {
  std::vector<std::string> texts;
  const char* fillers[] = {"students reviewed notes",   "group discussed chapters", "teachers planned lessons",
                           "readers compared examples", "learners tracked progress"};
  for (int i = 0; i < 20; ++i)
    texts.push_back(std::string("Mass practice, then ") + fillers[i % 5] + ".");
  for (int i = 0; i < 20; ++i)
    texts.push_back(std::string("Some ") + fillers[i % 5] + " with tables and charts.");
  preprocess::Config cfg;
  cfg.ngram_min_count = 5;
  cfg.ngram_threshold = 5.0;
  const auto res = preprocess::run(corpus_of(texts), cfg);
  CHECK(res.vocabulary.contains("mass_practic"));
  const auto& first = res.streams.front().tokens;
  CHECK(std::find(first.begin(), first.end(), "mass_practic") != first.end());
}

TEST_CASE("vocabulary filtering") {
  std::vector<TokenStream> streams = {{1, {"common", "rare", "pair"}}, {2, {"common", "pair"}},
                                      {3, {"common"}}, {4, {"common", "other", "other"}}};
  SUBCASE("term in every doc excluded at max_doc_fraction 0.5") {
    const auto v = preprocess::build_vocabulary(streams, 1, 0.5);
    CHECK_FALSE(v.contains("common"));
    CHECK(v.contains("pair"));
  }
  SUBCASE("term in one doc excluded at min_doc_freq 2") {
    const auto v = preprocess::build_vocabulary(streams, 2, 1.0);
    CHECK_FALSE(v.contains("rare"));
    CHECK_FALSE(v.contains("other"));
    CHECK(v.terms == Tokens{"common", "pair"});
    CHECK(v.doc_freq == std::vector<int>{4, 2});
  }
  SUBCASE("empty vocabulary is a configuration error") {
    CHECK_THROWS_AS(preprocess::build_vocabulary(streams, 9, 1.0), ConfigError);
  }
}

TEST_CASE("sample vocabulary matches a brute-force recount") {
  ColumnMap cols;
  cols.semester = "semester";
  const auto corpus = ingest_csv(testsupport::sample("discussion.csv").string(), cols).corpus;
  preprocess::Config cfg;
  const auto res = preprocess::run(corpus, cfg);

  std::vector<std::string> all;
  for (const auto& s : res.streams)
    all.insert(all.end(), s.tokens.begin(), s.tokens.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::size_t expected = 0;
  for (const auto& term : all) {
    int df = 0;
    for (const auto& s : res.streams)
      df += std::find(s.tokens.begin(), s.tokens.end(), term) != s.tokens.end();
    const bool keep = df >= 2 && df <= 0.9 * static_cast<double>(res.streams.size());
    expected += keep;
    CHECK(res.vocabulary.contains(term) == keep);
    if (keep)
      CHECK(res.vocabulary.doc_freq[res.vocabulary.index_of(term)] == df);
  }
  CHECK(res.vocabulary.size() == expected);

  nlohmann::json a = res.streams, b = preprocess::run(corpus, cfg).streams;
  CHECK(a.dump() == b.dump());
}

TEST_CASE("stopword file overrides the built-in list") {
  testsupport::TempDir dir("stop");
  {
    std::ofstream f(dir / "stop.txt");
    f << "# custom\npractice\n";
  }
  preprocess::Config cfg;
  cfg.stopword_file = (dir / "stop.txt").string();
  CHECK(preprocess::normalize(post("the practice helps"), cfg).tokens == Tokens{"the", "help"});
  CHECK(preprocess::builtin_stopwords().size() > 100);
}
