#pragma once

#include "enacode/corpus.hpp"
#include "enacode/preprocess.hpp"
#include "enacode/topics.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace enacode::autocoder {

struct Keyword {
  std::string text;
  bool lda = false;
  bool instructor = false;

  std::string provenance() const; // "lda", "instructor" or "both"
};

struct Code {
  std::string name;
  std::string definition;
  std::vector<Keyword> keywords;

  std::vector<std::string> lda_keywords() const;
  std::vector<std::string> instructor_keywords() const;
};

struct CodeScheme {
  std::vector<Code> codes;
  std::map<int, std::string> topic_map; // topic id -> code name

  std::vector<std::string> names() const;
  const Code& code(const std::string& name) const; // throws SchemaError listing valid names
  bool has_instructor_keywords() const;
};

struct FieldError {
  std::string field;
  std::string message;
};

/// Field-level validation of a scheme document. With a normalizer, keywords
/// that normalize to nothing are rejected too.
std::vector<FieldError> validate(const nlohmann::json& j,
                                 const preprocess::Normalizer* normalizer = nullptr);

void to_json(nlohmann::json& j, const CodeScheme& s);
/// Throws SchemaError carrying the first field error.
void from_json(const nlohmann::json& j, CodeScheme& s);
CodeScheme load_scheme(const std::string& path);

/// Codes keep their definitions and existing keywords; each code gains the
/// top words of the topics mapped onto it. Unmapped topics contribute nothing.
CodeScheme derive_scheme(const std::vector<topics::TopicSummary>& summaries,
                         const std::map<int, std::string>& topic_map,
                         const std::vector<Code>& priori_codes);

/// Phrases are stored verbatim; near-duplicates stay separate entries. A
/// phrase equal to an existing keyword only gains instructor provenance.
CodeScheme add_instructor_keywords(CodeScheme scheme, const std::string& code_name,
                                   const std::vector<std::string>& phrases);

/// Same scheme minus every instructor-only keyword.
CodeScheme lda_only(const CodeScheme& scheme);

/// Acronyms (two or more capitals, optional trailing 's') skip stemming and
/// match whole tokens case-insensitively.
bool is_acronym(const std::string& keyword);

/// Keywords compiled against one normalizer.
class Matcher {
public:
  Matcher(const CodeScheme& scheme, const preprocess::Normalizer& normalizer);

  /// `stream` is the post's n-gram token stream, `post` its analyzed forms.
  std::vector<std::uint8_t> flags(const preprocess::AnalyzedPost& post,
                                  const preprocess::TokenStream& stream) const;

  /// Keyword texts of `code` that fire on the post.
  std::vector<std::string> hits(std::size_t code, const preprocess::AnalyzedPost& post,
                                const preprocess::TokenStream& stream) const;

private:
  enum class Kind { token, ngram, phrase, acronym };
  struct Pattern {
    Kind kind;
    std::vector<std::string> parts;
    std::string whole;
    std::string source_text;
  };
  std::vector<std::vector<Pattern>> patterns_; // per code

  bool matches(const Pattern& p, const preprocess::AnalyzedPost& post,
               const preprocess::TokenStream& stream) const;
};

/// Binary post x code table. Every corpus post needs a stream (possibly
/// empty); rows come out in corpus order tagged `algorithm`.
CodedTable code_posts(const Corpus& corpus, const std::vector<preprocess::TokenStream>& streams,
                      const CodeScheme& scheme, const preprocess::Normalizer& normalizer);

namespace serial {
CodedTable code_posts(const Corpus& corpus, const std::vector<preprocess::TokenStream>& streams,
                      const CodeScheme& scheme, const preprocess::Normalizer& normalizer);
}

} // namespace enacode::autocoder
