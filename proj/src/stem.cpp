#include "enacode/stem.hpp"

#include <algorithm>
#include <array>

namespace enacode {

namespace {

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

class PorterWord {
public:
  explicit PorterWord(std::string_view w) : b_(w) {}

  std::string take() && { return std::move(b_); }

  void run() {
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
  }

private:
  std::string b_;

  bool cons(std::size_t i) const {
    switch (b_[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !cons(i - 1);
    default:
      return true;
    }
  }

  // number of VC sequences in b_[0, len)
  int measure(std::size_t len) const {
    int n = 0;
    std::size_t i = 0;
    while (i < len && cons(i))
      ++i;
    while (i < len) {
      while (i < len && !cons(i))
        ++i;
      if (i >= len)
        break;
      while (i < len && cons(i))
        ++i;
      ++n;
    }
    return n;
  }

  bool vowel_in(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!cons(i))
        return true;
    return false;
  }

  bool double_cons_end(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
  }

  // cvc ending where the final c is not w, x or y
  bool cvc(std::size_t len) const {
    if (len < 3 || !cons(len - 1) || cons(len - 2) || !cons(len - 3))
      return false;
    const char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const { return std::string_view(b_).ends_with(s); }

  void replace_tail(std::size_t suffix_len, std::string_view with) {
    b_.resize(b_.size() - suffix_len);
    b_.append(with);
  }

  // Longest matching suffix wins; if its condition fails nothing is applied.
  template <std::size_t N>
  void apply_longest(const std::array<Rule, N>& rules, int min_measure) {
    const Rule* best = nullptr;
    for (const auto& r : rules)
      if (ends(r.suffix) && (!best || r.suffix.size() > best->suffix.size()))
        best = &r;
    if (best && measure(b_.size() - best->suffix.size()) > min_measure)
      replace_tail(best->suffix.size(), best->replacement);
  }

  void step1a() {
    if (ends("sses"))
      replace_tail(4, "ss");
    else if (ends("ies"))
      replace_tail(3, "i");
    else if (ends("ss"))
      return;
    else if (ends("s"))
      replace_tail(1, "");
  }

  void step1b() {
    bool extra = false;
    if (ends("eed")) {
      if (measure(b_.size() - 3) > 0)
        replace_tail(1, "");
      return;
    }
    if (ends("ed") && vowel_in(b_.size() - 2)) {
      replace_tail(2, "");
      extra = true;
    } else if (ends("ing") && vowel_in(b_.size() - 3)) {
      replace_tail(3, "");
      extra = true;
    }
    if (!extra)
      return;
    if (ends("at") || ends("bl") || ends("iz")) {
      b_.push_back('e');
    } else if (double_cons_end(b_.size())) {
      const char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z')
        b_.pop_back();
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_.push_back('e');
    }
  }

  void step1c() {
    if (ends("y") && vowel_in(b_.size() - 1))
      b_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<Rule, 20> rules{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},    {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
    }};
    apply_longest(rules, 0);
  }

  void step3() {
    static constexpr std::array<Rule, 7> rules{{
        {"icate", "ic"},
        {"ative", ""},
        {"alize", "al"},
        {"iciti", "ic"},
        {"ical", "ic"},
        {"ful", ""},
        {"ness", ""},
    }};
    apply_longest(rules, 0);
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> suffixes{
        "al",   "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent",  "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
    std::string_view best;
    for (auto s : suffixes)
      if (ends(s) && s.size() > best.size())
        best = s;
    if (best.empty())
      return;
    const std::size_t stem_len = b_.size() - best.size();
    if (measure(stem_len) <= 1)
      return;
    if (best == "ion" && !(stem_len > 0 && (b_[stem_len - 1] == 's' || b_[stem_len - 1] == 't')))
      return;
    b_.resize(stem_len);
  }

  void step5a() {
    if (!ends("e"))
      return;
    const std::size_t len = b_.size() - 1;
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len)))
      b_.pop_back();
  }

  void step5b() {
    if (measure(b_.size()) > 1 && double_cons_end(b_.size()) && b_.back() == 'l')
      b_.pop_back();
  }
};

bool is_ascii_lower_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

} // namespace

std::string porter_stem(std::string_view word) {
  if (!is_ascii_lower_word(word))
    return std::string(word);
  PorterWord w(word);
  w.run();
  return std::move(w).take();
}

std::string stem(std::string_view word) {
  std::string current(word);
  for (;;) {
    auto next = porter_stem(current);
    if (next == current)
      return current;
    current = std::move(next);
  }
}

} // namespace enacode
