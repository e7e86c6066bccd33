#include "phishkd/porter.hpp"

#include <array>

namespace phishkd {
namespace {

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

class Word {
 public:
  explicit Word(std::string_view w) : s_(w) {}

  std::string take() && { return std::move(s_); }
  std::size_t size() const { return s_.size(); }
  bool ends_with(std::string_view suffix) const { return std::string_view(s_).ends_with(suffix); }
  char back() const { return s_.back(); }

  void replace_suffix(std::size_t suffix_len, std::string_view replacement) {
    s_.resize(s_.size() - suffix_len);
    s_.append(replacement);
  }

  bool consonant(std::size_t i) const { return consonant_in(s_, i); }

  // Number of VC sequences in the first `len` letters.
  std::size_t measure(std::size_t len) const {
    std::size_t m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  // Stem of length `len` ends in a double consonant.
  bool double_consonant(std::size_t len) const {
    return len >= 2 && s_[len - 1] == s_[len - 2] && consonant(len - 1);
  }

  // Stem of length `len` ends consonant-vowel-consonant, last not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    const char c = s_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  char at(std::size_t i) const { return s_[i]; }

 private:
  static bool consonant_in(const std::string& s, std::size_t i) {
    switch (s[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !consonant_in(s, i - 1);
      default: return true;
    }
  }

  std::string s_;
};

// Applies the first rule whose suffix matches, if the remaining stem has
// measure > min_measure. Later rules are not tried once a suffix matched.
template <std::size_t N>
bool apply_first(Word& w, const std::array<Rule, N>& rules, std::size_t min_measure) {
  for (const auto& rule : rules) {
    if (!w.ends_with(rule.suffix)) continue;
    const std::size_t stem_len = w.size() - rule.suffix.size();
    if (w.measure(stem_len) > min_measure) {
      w.replace_suffix(rule.suffix.size(), rule.replacement);
      return true;
    }
    return false;
  }
  return false;
}

void step1a(Word& w) {
  if (w.ends_with("sses")) {
    w.replace_suffix(4, "ss");
  } else if (w.ends_with("ies")) {
    w.replace_suffix(3, "i");
  } else if (w.ends_with("ss")) {
    // unchanged
  } else if (w.ends_with("s")) {
    w.replace_suffix(1, "");
  }
}

void step1b(Word& w) {
  if (w.ends_with("eed")) {
    if (w.measure(w.size() - 3) > 0) w.replace_suffix(1, "");
    return;
  }
  std::size_t cut = 0;
  if (w.ends_with("ed") && w.has_vowel(w.size() - 2)) {
    cut = 2;
  } else if (w.ends_with("ing") && w.has_vowel(w.size() - 3)) {
    cut = 3;
  }
  if (cut == 0) return;
  w.replace_suffix(cut, "");

  if (w.ends_with("at") || w.ends_with("bl") || w.ends_with("iz")) {
    w.replace_suffix(0, "e");
  } else if (w.double_consonant(w.size())) {
    const char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.replace_suffix(1, "");
  } else if (w.measure(w.size()) == 1 && w.cvc(w.size())) {
    w.replace_suffix(0, "e");
  }
}

void step1c(Word& w) {
  if (w.ends_with("y") && w.has_vowel(w.size() - 1)) w.replace_suffix(1, "i");
}

void step2(Word& w) {
  static constexpr std::array<Rule, 20> kRules = {{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
  }};
  // Longest match first: "ational" before "tional", "ization" before "ation".
  apply_first(w, kRules, 0);
}

void step3(Word& w) {
  static constexpr std::array<Rule, 7> kRules = {{
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  }};
  apply_first(w, kRules, 0);
}

void step4(Word& w) {
  static constexpr std::array<Rule, 19> kRules = {{
      {"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},
      {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
      {"ent", ""},  {"ion", ""},  {"ou", ""},   {"ism", ""}, {"ate", ""},
      {"iti", ""},  {"ous", ""},  {"ive", ""},  {"ize", ""},
  }};
  for (const auto& rule : kRules) {
    if (!w.ends_with(rule.suffix)) continue;
    const std::size_t stem_len = w.size() - rule.suffix.size();
    bool ok = w.measure(stem_len) > 1;
    if (rule.suffix == "ion") ok = ok && (w.at(stem_len - 1) == 's' || w.at(stem_len - 1) == 't');
    if (ok) w.replace_suffix(rule.suffix.size(), "");
    return;
  }
}

void step5(Word& w) {
  if (w.ends_with("e")) {
    const std::size_t stem_len = w.size() - 1;
    const std::size_t m = w.measure(stem_len);
    if (m > 1 || (m == 1 && !w.cvc(stem_len))) w.replace_suffix(1, "");
  }
  if (w.measure(w.size()) > 1 && w.double_consonant(w.size()) && w.back() == 'l') {
    w.replace_suffix(1, "");
  }
}

}  // namespace

std::string stem(std::string_view word) {
  if (word.size() <= 2) return std::string(word);
  Word w(word);
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5(w);
  return std::move(w).take();
}

}  // namespace phishkd
