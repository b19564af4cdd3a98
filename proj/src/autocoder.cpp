#include "enacode/autocoder.hpp"

#include "enacode/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

namespace enacode::autocoder {

std::string Keyword::provenance() const {
  if (lda && instructor)
    return "both";
  return lda ? "lda" : "instructor";
}

std::vector<std::string> Code::lda_keywords() const {
  std::vector<std::string> out;
  for (const auto& k : keywords)
    if (k.lda)
      out.push_back(k.text);
  return out;
}

std::vector<std::string> Code::instructor_keywords() const {
  std::vector<std::string> out;
  for (const auto& k : keywords)
    if (k.instructor)
      out.push_back(k.text);
  return out;
}

std::vector<std::string> CodeScheme::names() const {
  std::vector<std::string> out;
  for (const auto& c : codes)
    out.push_back(c.name);
  return out;
}

const Code& CodeScheme::code(const std::string& name) const {
  for (const auto& c : codes)
    if (c.name == name)
      return c;
  std::string valid;
  for (const auto& c : codes)
    valid += (valid.empty() ? "" : ", ") + c.name;
  throw SchemaError("unknown code '" + name + "'; valid codes: " + valid);
}

bool CodeScheme::has_instructor_keywords() const {
  return std::any_of(codes.begin(), codes.end(), [](const Code& c) {
    return std::any_of(c.keywords.begin(), c.keywords.end(),
                       [](const Keyword& k) { return k.instructor; });
  });
}

namespace {

std::string collapse_ws(const std::string& s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      space = !out.empty();
      continue;
    }
    if (space)
      out.push_back(' ');
    space = false;
    out.push_back(ch);
  }
  return out;
}

void add_keyword(Code& code, const std::string& raw, bool lda, bool instructor) {
  const auto text = collapse_ws(raw);
  for (auto& k : code.keywords)
    if (k.text == text) {
      k.lda = k.lda || lda;
      k.instructor = k.instructor || instructor;
      return;
    }
  code.keywords.push_back(Keyword{text, lda, instructor});
}

bool parse_topic_id(const std::string& key, int& id) {
  try {
    std::size_t used = 0;
    id = std::stoi(key, &used);
    return used == key.size() && id >= 0;
  } catch (const std::exception&) {
    return false;
  }
}

} // namespace

std::vector<FieldError> validate(const nlohmann::json& j, const preprocess::Normalizer* normalizer) {
  std::vector<FieldError> errors;
  if (!j.is_object()) {
    errors.push_back({"", "scheme must be a JSON object"});
    return errors;
  }
  if (!j.contains("codes") || !j["codes"].is_array()) {
    errors.push_back({"codes", "required array"});
    return errors;
  }
  std::set<std::string> names;
  const auto& codes = j["codes"];
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto path = "codes[" + std::to_string(i) + "]";
    const auto& c = codes[i];
    if (!c.is_object()) {
      errors.push_back({path, "must be an object"});
      continue;
    }
    if (!c.contains("name") || !c["name"].is_string() || collapse_ws(c["name"].get<std::string>()).empty())
      errors.push_back({path + ".name", "required non-empty string"});
    else if (!names.insert(c["name"].get<std::string>()).second)
      errors.push_back({path + ".name", "duplicate code name '" + c["name"].get<std::string>() + "'"});
    if (c.contains("definition") && !c["definition"].is_string())
      errors.push_back({path + ".definition", "must be a string"});
    if (!c.contains("keywords"))
      continue;
    if (!c["keywords"].is_array()) {
      errors.push_back({path + ".keywords", "must be an array"});
      continue;
    }
    const auto& kws = c["keywords"];
    for (std::size_t k = 0; k < kws.size(); ++k) {
      const auto kp = path + ".keywords[" + std::to_string(k) + "]";
      const auto& kw = kws[k];
      if (!kw.is_object()) {
        errors.push_back({kp, "must be an object {text, provenance}"});
        continue;
      }
      if (!kw.contains("text") || !kw["text"].is_string() ||
          collapse_ws(kw["text"].get<std::string>()).empty()) {
        errors.push_back({kp + ".text", "empty keyword"});
      } else if (normalizer && !is_acronym(collapse_ws(kw["text"].get<std::string>())) &&
                 normalizer->normalize_phrase(kw["text"].get<std::string>()).empty()) {
        errors.push_back({kp + ".text", "keyword is empty after normalization"});
      }
      if (kw.contains("provenance")) {
        const auto& p = kw["provenance"];
        if (!p.is_string() || (p != "lda" && p != "instructor" && p != "both"))
          errors.push_back({kp + ".provenance", "must be 'lda', 'instructor' or 'both'"});
      }
    }
  }
  if (j.contains("topic_map")) {
    const auto& tm = j["topic_map"];
    if (!tm.is_object()) {
      errors.push_back({"topic_map", "must be an object of topic id -> code name"});
    } else {
      for (const auto& [key, value] : tm.items()) {
        int id = 0;
        if (!parse_topic_id(key, id))
          errors.push_back({"topic_map." + key, "topic id must be a non-negative integer"});
        if (!value.is_string() || !names.count(value.get<std::string>()))
          errors.push_back({"topic_map." + key, "must name a code in 'codes'"});
      }
    }
  }
  return errors;
}

void to_json(nlohmann::json& j, const CodeScheme& s) {
  j = nlohmann::json::object();
  auto codes = nlohmann::json::array();
  for (const auto& c : s.codes) {
    auto kws = nlohmann::json::array();
    for (const auto& k : c.keywords)
      kws.push_back({{"text", k.text}, {"provenance", k.provenance()}});
    codes.push_back({{"name", c.name}, {"definition", c.definition}, {"keywords", kws}});
  }
  j["codes"] = codes;
  auto tm = nlohmann::json::object();
  for (const auto& [topic, name] : s.topic_map)
    tm[std::to_string(topic)] = name;
  j["topic_map"] = tm;
}

void from_json(const nlohmann::json& j, CodeScheme& s) {
  const auto errors = validate(j);
  if (!errors.empty())
    throw SchemaError("scheme: " + errors.front().field + ": " + errors.front().message);
  s = CodeScheme{};
  for (const auto& c : j["codes"]) {
    Code code;
    code.name = collapse_ws(c["name"].get<std::string>());
    code.definition = c.value("definition", "");
    if (c.contains("keywords"))
      for (const auto& kw : c["keywords"]) {
        const auto p = kw.value("provenance", std::string("instructor"));
        add_keyword(code, kw["text"].get<std::string>(), p != "instructor", p != "lda");
      }
    s.codes.push_back(std::move(code));
  }
  if (j.contains("topic_map"))
    for (const auto& [key, value] : j["topic_map"].items()) {
      int id = 0;
      parse_topic_id(key, id);
      s.topic_map[id] = value.get<std::string>();
    }
}

CodeScheme load_scheme(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open scheme " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return j.get<CodeScheme>();
}

CodeScheme derive_scheme(const std::vector<topics::TopicSummary>& summaries,
                         const std::map<int, std::string>& topic_map,
                         const std::vector<Code>& priori_codes) {
  CodeScheme scheme;
  scheme.codes = priori_codes;
  scheme.topic_map = topic_map;
  std::map<int, const topics::TopicSummary*> by_id;
  for (const auto& s : summaries)
    by_id[s.topic_id] = &s;
  for (const auto& [topic, name] : topic_map) {
    auto it = by_id.find(topic);
    if (it == by_id.end())
      throw SchemaError("topic map refers to topic " + std::to_string(topic) +
                        ", which the model does not have");
    auto code = std::find_if(scheme.codes.begin(), scheme.codes.end(),
                             [&](const Code& c) { return c.name == name; });
    if (code == scheme.codes.end())
      throw SchemaError("topic " + std::to_string(topic) + " is mapped to unknown code '" + name + "'");
    for (const auto& term : it->second->terms)
      add_keyword(*code, term, true, false);
  }
  return scheme;
}

CodeScheme add_instructor_keywords(CodeScheme scheme, const std::string& code_name,
                                   const std::vector<std::string>& phrases) {
  scheme.code(code_name); // throws with the valid names
  auto& code = *std::find_if(scheme.codes.begin(), scheme.codes.end(),
                             [&](const Code& c) { return c.name == code_name; });
  for (const auto& p : phrases) {
    if (collapse_ws(p).empty())
      throw SchemaError("empty keyword for code '" + code_name + "'");
    add_keyword(code, p, false, true);
  }
  return scheme;
}

CodeScheme lda_only(const CodeScheme& scheme) {
  CodeScheme out = scheme;
  for (auto& c : out.codes) {
    std::erase_if(c.keywords, [](const Keyword& k) { return !k.lda; });
    for (auto& k : c.keywords)
      k.instructor = false;
  }
  return out;
}

bool is_acronym(const std::string& keyword) {
  std::size_t caps = 0;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    const char ch = keyword[i];
    if (ch >= 'A' && ch <= 'Z')
      ++caps;
    else if (!(ch == 's' && i + 1 == keyword.size() && caps >= 2))
      return false;
  }
  return caps >= 2;
}

Matcher::Matcher(const CodeScheme& scheme, const preprocess::Normalizer& normalizer) {
  for (const auto& code : scheme.codes) {
    std::vector<Pattern> pats;
    for (const auto& kw : code.keywords) {
      if (kw.lda) {
        Pattern p;
        p.source_text = kw.text;
        p.whole = kw.text;
        std::size_t start = 0;
        for (;;) {
          auto pos = kw.text.find('_', start);
          p.parts.push_back(kw.text.substr(start, pos - start));
          if (pos == std::string::npos)
            break;
          start = pos + 1;
        }
        p.kind = p.parts.size() > 1 ? Kind::ngram : Kind::token;
        pats.push_back(std::move(p));
      }
      if (kw.instructor) {
        Pattern p;
        p.source_text = kw.text;
        if (is_acronym(kw.text)) {
          p.kind = Kind::acronym;
          p.whole = preprocess::to_lower(kw.text);
        } else {
          p.kind = Kind::phrase;
          p.parts = normalizer.normalize_phrase(kw.text);
          if (p.parts.empty())
            continue; // nothing left to match
        }
        pats.push_back(std::move(p));
      }
    }
    patterns_.push_back(std::move(pats));
  }
}

namespace {

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return !needle.empty() &&
         std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

bool contains(const std::vector<std::string>& hay, const std::string& token) {
  return std::find(hay.begin(), hay.end(), token) != hay.end();
}

} // namespace

bool Matcher::matches(const Pattern& p, const preprocess::AnalyzedPost& post,
                      const preprocess::TokenStream& stream) const {
  switch (p.kind) {
  case Kind::token:
    return contains(post.unigrams, p.whole) || contains(stream.tokens, p.whole);
  case Kind::ngram:
    return contains(stream.tokens, p.whole) || contains_run(post.unigrams, p.parts);
  case Kind::phrase:
    return contains_run(post.with_stops, p.parts);
  case Kind::acronym:
    return contains(post.lowered, p.whole);
  }
  return false;
}

std::vector<std::uint8_t> Matcher::flags(const preprocess::AnalyzedPost& post,
                                         const preprocess::TokenStream& stream) const {
  std::vector<std::uint8_t> out(patterns_.size(), 0);
  for (std::size_t c = 0; c < patterns_.size(); ++c)
    for (const auto& p : patterns_[c])
      if (matches(p, post, stream)) {
        out[c] = 1;
        break;
      }
  return out;
}

std::vector<std::string> Matcher::hits(std::size_t code, const preprocess::AnalyzedPost& post,
                                       const preprocess::TokenStream& stream) const {
  std::vector<std::string> out;
  for (const auto& p : patterns_.at(code))
    if (matches(p, post, stream) && !contains(out, p.source_text))
      out.push_back(p.source_text);
  return out;
}

namespace {

std::vector<const preprocess::TokenStream*> align_streams(
    const Corpus& corpus, const std::vector<preprocess::TokenStream>& streams) {
  std::unordered_map<EntryId, const preprocess::TokenStream*> by_id;
  for (const auto& s : streams)
    by_id[s.post_ref] = &s;
  std::vector<const preprocess::TokenStream*> out;
  out.reserve(corpus.posts.size());
  for (const auto& p : corpus.posts) {
    auto it = by_id.find(p.entry_id);
    if (it == by_id.end())
      throw SchemaError("no token stream for entry " + std::to_string(p.entry_id));
    out.push_back(it->second);
  }
  return out;
}

CodedRow row_for(const Post& p, std::vector<std::uint8_t> flags) {
  return CodedRow{p.entry_id, p.user_id, p.timestamp, p.text, std::move(flags), Source::algorithm};
}

CodedTable empty_table(const CodeScheme& scheme) {
  CodedTable t;
  t.codes = scheme.names();
  t.provenance = scheme.has_instructor_keywords() ? Provenance::lda_plus_instructor
                                                  : Provenance::lda_only;
  return t;
}

} // namespace

CodedTable code_posts(const Corpus& corpus, const std::vector<preprocess::TokenStream>& streams,
                      const CodeScheme& scheme, const preprocess::Normalizer& normalizer) {
  const auto aligned = align_streams(corpus, streams);
  const Matcher matcher(scheme, normalizer);
  CodedTable table = empty_table(scheme);
  table.rows.resize(corpus.posts.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.posts.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& post = corpus.posts[i];
    table.rows[i] = row_for(post, matcher.flags(normalizer.analyze(post), *aligned[i]));
  }
  return table;
}

namespace serial {

CodedTable code_posts(const Corpus& corpus, const std::vector<preprocess::TokenStream>& streams,
                      const CodeScheme& scheme, const preprocess::Normalizer& normalizer) {
  const auto aligned = align_streams(corpus, streams);
  const Matcher matcher(scheme, normalizer);
  CodedTable table = empty_table(scheme);
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    const auto& post = corpus.posts[i];
    table.rows.push_back(row_for(post, matcher.flags(normalizer.analyze(post), *aligned[i])));
  }
  return table;
}

} // namespace serial

} // namespace enacode::autocoder
