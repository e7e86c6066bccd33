#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phishkd/html.hpp"
#include "phishkd/mime.hpp"

namespace phishkd {

using TermSet = std::set<std::string, std::less<>>;

inline constexpr std::size_t kMinTokenLength = 2;
inline constexpr std::size_t kMaxTokenLength = 40;

struct TokenStream {
  std::vector<std::string> tokens;  // tokenizer output, in text order
  TermSet term_set;                 // distinct stems after the full pipeline

  bool operator==(const TokenStream&) const = default;
};

// Splits on every non-alphanumeric ASCII byte, lowercases, and keeps tokens
// of 2..40 characters that start with a letter.
std::vector<std::string> tokenize(std::string_view text);

class StopList {
 public:
  StopList() = default;
  explicit StopList(TermSet words) : words_(std::move(words)) {}

  // Bundled English list.
  static StopList english();
  // One word per line; '#' starts a comment.
  static StopList parse(std::istream& in);
  static StopList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.find(word) != words_.end(); }
  std::size_t size() const noexcept { return words_.size(); }
  const TermSet& words() const noexcept { return words_; }

 private:
  TermSet words_;
};

// Related-word relation (synonyms and hyponyms merged). Keys and values are
// stored both as written and as Porter stems; self-maps are dropped.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // Bundled phishing-vocabulary subset.
  static SynonymLexicon bundled();
  // Lines of "term<TAB>syn1,syn2,..."; '#' starts a comment.
  static SynonymLexicon parse(std::istream& in);
  static SynonymLexicon load(const std::filesystem::path& path);

  void add(std::string_view term, std::string_view related);

  // Empty set for absent terms.
  const TermSet& related_stems(std::string_view stem) const;
  const TermSet& related_words(std::string_view word) const;

  std::size_t size() const noexcept { return stemmed_.size(); }
  const std::map<std::string, TermSet, std::less<>>& stem_entries() const noexcept {
    return stemmed_;
  }

 private:
  std::map<std::string, TermSet, std::less<>> stemmed_;
  std::map<std::string, TermSet, std::less<>> raw_;
};

// One-hop expansion: terms plus every related stem of every term.
TermSet expand_synonyms(const TermSet& terms, const SynonymLexicon& lexicon);

struct PreprocessOptions {
  // Expand raw tokens before stemming instead of expanding stems.
  bool expand_raw = false;
};

// tokenize(subject + text) -> stop-word removal -> stem -> distinct ->
// synonym expansion.
TokenStream preprocess(const EmailDocument& doc, const HtmlArtifacts& arts, const StopList& stop,
                       const SynonymLexicon& lexicon, const PreprocessOptions& options = {});

}  // namespace phishkd
