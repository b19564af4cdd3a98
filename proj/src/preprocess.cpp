#include "enacode/preprocess.hpp"

#include "enacode/error.hpp"
#include "enacode/stem.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

namespace enacode::preprocess {

const std::vector<std::string>& builtin_stopwords() {
  // Common English function words. Contractions are listed by their
  // apostrophe-free fragments because tokenization splits on apostrophes.
  static const std::vector<std::string> words{
      "a",        "about",   "above",     "after",   "again",      "against", "ain",
      "all",      "am",      "an",        "and",     "any",        "are",     "aren",
      "as",       "at",      "be",        "because", "been",       "before",  "being",
      "below",    "between", "both",      "but",     "by",         "can",     "couldn",
      "d",        "did",     "didn",      "do",      "does",       "doesn",   "doing",
      "don",      "down",    "during",    "each",    "few",        "for",     "from",
      "further",  "had",     "hadn",      "has",     "hasn",       "have",    "haven",
      "having",   "he",      "her",       "here",    "hers",       "herself", "him",
      "himself",  "his",     "how",       "i",       "if",         "in",      "into",
      "is",       "isn",     "it",        "its",     "itself",     "just",    "ll",
      "m",        "ma",      "me",        "mightn",  "more",       "most",    "mustn",
      "my",       "myself",  "needn",     "no",      "nor",        "not",     "now",
      "o",        "of",      "off",       "on",      "once",       "only",    "or",
      "other",    "our",     "ours",      "ourselves", "out",      "over",    "own",
      "re",       "s",       "same",      "shan",    "she",        "should",  "shouldn",
      "so",       "some",    "such",      "t",       "than",       "that",    "the",
      "their",    "theirs",  "them",      "themselves", "then",    "there",   "these",
      "they",     "this",    "those",     "through", "to",         "too",     "under",
      "until",    "up",      "ve",        "very",    "was",        "wasn",    "we",
      "were",     "weren",   "what",      "when",    "where",      "which",   "while",
      "who",      "whom",    "why",       "will",    "with",       "won",     "wouldn",
      "y",        "you",     "your",      "yours",   "yourself",   "yourselves"};
  return words;
}

void to_json(nlohmann::json& j, const Config& c) {
  j = nlohmann::json{{"stopword_file", c.stopword_file},
                     {"min_token_length", c.min_token_length},
                     {"entity_removal", c.entity_removal},
                     {"stemming", c.stemming},
                     {"min_doc_freq", c.min_doc_freq},
                     {"max_doc_fraction", c.max_doc_fraction},
                     {"ngram_min_count", c.ngram_min_count},
                     {"ngram_threshold", c.ngram_threshold}};
}

void from_json(const nlohmann::json& j, Config& c) {
  if (!j.is_object())
    throw ConfigError("preprocess config must be a JSON object");
  Config d;
  try {
    c.stopword_file = j.value("stopword_file", d.stopword_file);
    c.min_token_length = j.value("min_token_length", d.min_token_length);
    c.entity_removal = j.value("entity_removal", d.entity_removal);
    c.stemming = j.value("stemming", d.stemming);
    c.min_doc_freq = j.value("min_doc_freq", d.min_doc_freq);
    c.max_doc_fraction = j.value("max_doc_fraction", d.max_doc_fraction);
    c.ngram_min_count = j.value("ngram_min_count", d.ngram_min_count);
    c.ngram_threshold = j.value("ngram_threshold", d.ngram_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("preprocess config: ") + e.what());
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open preprocess config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j.get<Config>();
}

namespace {

bool is_word_char(UChar32 c) {
  return u_hasBinaryProperty(c, UCHAR_ALPHABETIC) || u_isdigit(c) ||
         (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool ends_sentence(UChar32 c) { return c == '.' || c == '!' || c == '?' || c == '\n'; }

std::size_t codepoint_length(std::string_view utf8) {
  return static_cast<std::size_t>(std::count_if(
      utf8.begin(), utf8.end(), [](char ch) { return (static_cast<unsigned char>(ch) & 0xC0) != 0x80; }));
}

std::vector<std::string> read_stopword_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open stopword file " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    for (const auto& tok : tokenize(line))
      words.push_back(to_lower(tok.text));
  }
  return words;
}

} // namespace

std::vector<RawToken> tokenize(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (U_SUCCESS(status))
    text = nfc->normalize(text, status);
  if (U_FAILURE(status))
    throw Error(std::string("unicode normalization failed: ") + u_errorName(status));

  std::vector<RawToken> tokens;
  bool sentence_start = true;
  int32_t i = 0;
  const int32_t n = text.length();
  while (i < n) {
    UChar32 c = text.char32At(i);
    if (!is_word_char(c)) {
      if (ends_sentence(c))
        sentence_start = true;
      i = text.moveIndex32(i, 1);
      continue;
    }
    const int32_t start = i;
    while (i < n && is_word_char(text.char32At(i)))
      i = text.moveIndex32(i, 1);
    RawToken tok;
    text.tempSubStringBetween(start, i).toUTF8String(tok.text);
    tok.sentence_initial = sentence_start;
    sentence_start = false;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::string to_lower(std::string_view utf8) {
  bool ascii = std::all_of(utf8.begin(), utf8.end(),
                           [](char ch) { return static_cast<unsigned char>(ch) < 0x80; });
  std::string out;
  if (ascii) {
    out.reserve(utf8.size());
    for (char ch : utf8)
      out.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a') : ch);
    return out;
  }
  icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(out);
  return out;
}

EntityLexicon EntityLexicon::build(const std::vector<std::string>& texts) {
  EntityLexicon lex;
  for (const auto& t : texts)
    for (const auto& tok : tokenize(t))
      if (to_lower(tok.text) == tok.text)
        lex.lowercase_.insert(tok.text);
  return lex;
}

EntityLexicon EntityLexicon::build(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.posts.size());
  for (const auto& p : corpus.posts)
    texts.push_back(p.text);
  return build(texts);
}

bool EntityLexicon::is_entity(const RawToken& token) const {
  if (token.sentence_initial || token.text.empty())
    return false;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(token.text);
  const UChar32 first = u.char32At(0);
  if (!(u_isupper(first) || u_istitle(first)))
    return false;
  // acronyms, plural ones too (RPAs)
  int32_t end = u.length();
  if (end > 2 && u.charAt(end - 1) == u's' && u_isupper(u.char32At(end - 2)))
    --end;
  bool has_lower = false;
  for (int32_t i = u.moveIndex32(0, 1); i < end; i = u.moveIndex32(i, 1))
    if (u_islower(u.char32At(i))) {
      has_lower = true;
      break;
    }
  if (!has_lower)
    return false;
  return lowercase_.count(to_lower(token.text)) == 0;
}

Normalizer::Normalizer(Config config, EntityLexicon lexicon)
    : config_(std::move(config)), lexicon_(std::move(lexicon)) {
  const auto words =
      config_.stopword_file.empty() ? builtin_stopwords() : read_stopword_file(config_.stopword_file);
  stopwords_.insert(words.begin(), words.end());
}

AnalyzedPost Normalizer::analyze(const Post& post) const {
  AnalyzedPost out;
  out.post_ref = post.entry_id;
  for (const auto& tok : tokenize(post.text)) {
    if (config_.entity_removal && lexicon_.is_entity(tok))
      continue;
    auto lowered = to_lower(tok.text);
    const bool stop = is_stopword(lowered);
    auto stemmed = config_.stemming ? stem(lowered) : lowered;
    const bool long_enough = codepoint_length(stemmed) >= config_.min_token_length;
    if (long_enough) {
      out.with_stops.push_back(stemmed);
      if (!stop)
        out.unigrams.push_back(std::move(stemmed));
    }
    out.lowered.push_back(std::move(lowered));
  }
  return out;
}

TokenStream Normalizer::normalize(const Post& post) const {
  auto analyzed = analyze(post);
  return TokenStream{post.entry_id, std::move(analyzed.unigrams)};
}

std::vector<std::string> Normalizer::normalize_phrase(std::string_view phrase) const {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(phrase)) {
    auto lowered = to_lower(tok.text);
    auto stemmed = config_.stemming ? stem(lowered) : lowered;
    if (codepoint_length(stemmed) >= config_.min_token_length)
      out.push_back(std::move(stemmed));
  }
  return out;
}

TokenStream normalize(const Post& post, const Config& config) {
  return Normalizer(config, EntityLexicon::build(std::vector<std::string>{post.text}))
      .normalize(post);
}

std::vector<TokenStream> normalize_corpus(const Corpus& corpus, const Normalizer& normalizer) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.posts.size());
  std::vector<TokenStream> out(corpus.posts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = normalizer.normalize(corpus.posts[i]);
  return out;
}

std::vector<AnalyzedPost> analyze_corpus(const Corpus& corpus, const Normalizer& normalizer) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.posts.size());
  std::vector<AnalyzedPost> out(corpus.posts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = normalizer.analyze(corpus.posts[i]);
  return out;
}

namespace serial {

std::vector<TokenStream> normalize_corpus(const Corpus& corpus, const Normalizer& normalizer) {
  std::vector<TokenStream> out;
  out.reserve(corpus.posts.size());
  for (const auto& p : corpus.posts)
    out.push_back(normalizer.normalize(p));
  return out;
}

std::vector<AnalyzedPost> analyze_corpus(const Corpus& corpus, const Normalizer& normalizer) {
  std::vector<AnalyzedPost> out;
  out.reserve(corpus.posts.size());
  for (const auto& p : corpus.posts)
    out.push_back(normalizer.analyze(p));
  return out;
}

} // namespace serial

// ---------------------------------------------------------------------------
// n-grams

double collocation_score(std::size_t pair_count, std::size_t count_a, std::size_t count_b,
                         std::size_t total_tokens, int min_count) {
  if (count_a == 0 || count_b == 0)
    return 0.0;
  return (static_cast<double>(pair_count) - min_count) * static_cast<double>(total_tokens) /
         (static_cast<double>(count_a) * static_cast<double>(count_b));
}

namespace {

std::size_t underscores(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '_'));
}

std::string pair_key(const std::string& a, const std::string& b) {
  std::string k;
  k.reserve(a.size() + b.size() + 1);
  k.append(a).push_back('\x1f');
  k.append(b);
  return k;
}

std::vector<TokenStream> phrase_pass(const std::vector<TokenStream>& streams, int min_count,
                                     double threshold) {
  std::unordered_map<std::string, std::size_t> unigram;
  std::unordered_map<std::string, std::size_t> pairs;
  std::size_t total = 0;
  for (const auto& s : streams) {
    total += s.tokens.size();
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      ++unigram[s.tokens[i]];
      if (i + 1 < s.tokens.size())
        ++pairs[pair_key(s.tokens[i], s.tokens[i + 1])];
    }
  }

  auto joins = [&](const std::string& a, const std::string& b) {
    if (underscores(a) + underscores(b) + 1 > 2)
      return false;
    auto it = pairs.find(pair_key(a, b));
    if (it == pairs.end() || it->second < static_cast<std::size_t>(std::max(min_count, 1)))
      return false;
    return collocation_score(it->second, unigram[a], unigram[b], total, min_count) >= threshold;
  };

  std::vector<TokenStream> out;
  out.reserve(streams.size());
  for (const auto& s : streams) {
    TokenStream t{s.post_ref, {}};
    t.tokens.reserve(s.tokens.size());
    std::size_t i = 0;
    while (i < s.tokens.size()) {
      if (i + 1 < s.tokens.size() && joins(s.tokens[i], s.tokens[i + 1])) {
        t.tokens.push_back(s.tokens[i] + "_" + s.tokens[i + 1]);
        i += 2;
      } else {
        t.tokens.push_back(s.tokens[i]);
        ++i;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace

std::vector<TokenStream> detect_ngrams(const std::vector<TokenStream>& streams, int min_count,
                                       double threshold) {
  if (min_count < 1)
    throw ConfigError("ngram min_count must be at least 1");
  return phrase_pass(phrase_pass(streams, min_count, threshold), min_count, threshold);
}

// ---------------------------------------------------------------------------
// vocabulary

int Vocabulary::index_of(const std::string& term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  return it != terms.end() && *it == term ? static_cast<int>(it - terms.begin()) : -1;
}

void to_json(nlohmann::json& j, const Vocabulary& v) {
  j = nlohmann::json{{"num_docs", v.num_docs}, {"terms", v.terms}, {"doc_freq", v.doc_freq}};
}

void from_json(const nlohmann::json& j, Vocabulary& v) {
  j.at("num_docs").get_to(v.num_docs);
  j.at("terms").get_to(v.terms);
  j.at("doc_freq").get_to(v.doc_freq);
  if (v.terms.size() != v.doc_freq.size() || !std::is_sorted(v.terms.begin(), v.terms.end()))
    throw SchemaError("vocabulary terms must be sorted and aligned with doc_freq");
}

Vocabulary build_vocabulary(const std::vector<TokenStream>& streams, int min_doc_freq,
                            double max_doc_fraction) {
  if (!(max_doc_fraction > 0.0 && max_doc_fraction <= 1.0))
    throw ConfigError("max_doc_fraction must lie in (0, 1]");
  std::map<std::string, int> df;
  for (const auto& s : streams) {
    std::set<std::string> seen(s.tokens.begin(), s.tokens.end());
    for (const auto& t : seen)
      ++df[t];
  }
  Vocabulary v;
  v.num_docs = streams.size();
  const double docs = static_cast<double>(streams.size());
  for (const auto& [term, count] : df) {
    if (count < min_doc_freq || count / docs > max_doc_fraction)
      continue;
    v.terms.push_back(term);
    v.doc_freq.push_back(count);
  }
  if (v.terms.empty())
    throw ConfigError("vocabulary is empty after frequency filtering; lower min_doc_freq or "
                      "raise max_doc_fraction");
  return v;
}

Result run(const Corpus& corpus, const Config& config) {
  Normalizer normalizer(config, config.entity_removal ? EntityLexicon::build(corpus) : EntityLexicon{});
  auto streams = normalize_corpus(corpus, normalizer);
  streams = detect_ngrams(streams, config.ngram_min_count, config.ngram_threshold);
  auto vocab = build_vocabulary(streams, config.min_doc_freq, config.max_doc_fraction);
  return Result{std::move(streams), std::move(vocab)};
}

void to_json(nlohmann::json& j, const TokenStream& s) {
  j = nlohmann::json{{"entry_id", s.post_ref}, {"tokens", s.tokens}};
}

void from_json(const nlohmann::json& j, TokenStream& s) {
  j.at("entry_id").get_to(s.post_ref);
  j.at("tokens").get_to(s.tokens);
}

} // namespace enacode::preprocess
