#include "phishkd/textproc.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "default_resources.hpp"
#include "phishkd/error.hpp"
#include "phishkd/porter.hpp"

namespace phishkd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

const TermSet& empty_set() {
  static const TermSet empty;
  return empty;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= kMinTokenLength && current.size() <= kMaxTokenLength &&
        std::isalpha(static_cast<unsigned char>(current.front()))) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

StopList StopList::english() {
  std::istringstream in{std::string(resources::kEnglishStopWords)};
  return parse(in);
}

StopList StopList::parse(std::istream& in) {
  TermSet words;
  std::string line;
  while (std::getline(in, line)) {
    // "don't" is stored as the token "don", matching what the tokenizer emits.
    for (auto& token : tokenize(strip_comment(line))) words.insert(std::move(token));
  }
  return StopList(std::move(words));
}

StopList StopList::load(const std::filesystem::path& path) {
  auto in = open_text(path);
  return parse(in);
}

SynonymLexicon SynonymLexicon::bundled() {
  std::istringstream in{std::string(resources::kBundledSynonyms)};
  return parse(in);
}

SynonymLexicon SynonymLexicon::parse(std::istream& in) {
  SynonymLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view content = strip_comment(line);
    const auto tab = content.find('\t');
    if (tab == std::string_view::npos) continue;
    const auto term_tokens = tokenize(content.substr(0, tab));
    if (term_tokens.size() != 1) continue;
    std::string_view rest = content.substr(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      for (const auto& related : tokenize(item)) lex.add(term_tokens.front(), related);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  auto in = open_text(path);
  return parse(in);
}

void SynonymLexicon::add(std::string_view term, std::string_view related) {
  if (term != related) raw_[std::string(term)].emplace(related);
  std::string term_stem = stem(term);
  std::string related_stem = stem(related);
  if (term_stem != related_stem) stemmed_[std::move(term_stem)].insert(std::move(related_stem));
}

const TermSet& SynonymLexicon::related_stems(std::string_view term_stem) const {
  const auto it = stemmed_.find(term_stem);
  return it == stemmed_.end() ? empty_set() : it->second;
}

const TermSet& SynonymLexicon::related_words(std::string_view word) const {
  const auto it = raw_.find(word);
  return it == raw_.end() ? empty_set() : it->second;
}

TermSet expand_synonyms(const TermSet& terms, const SynonymLexicon& lexicon) {
  TermSet out = terms;
  for (const auto& term : terms) {
    const auto& related = lexicon.related_stems(term);
    out.insert(related.begin(), related.end());
  }
  return out;
}

TokenStream preprocess(const EmailDocument& doc, const HtmlArtifacts& arts, const StopList& stop,
                       const SynonymLexicon& lexicon, const PreprocessOptions& options) {
  TokenStream ts;
  std::string text = doc.subject;
  text.push_back('\n');
  text += arts.plain_text;
  ts.tokens = tokenize(text);

  TermSet kept;
  for (const auto& token : ts.tokens) {
    if (!stop.contains(token)) kept.insert(token);
  }

  if (options.expand_raw) {
    TermSet expanded = kept;
    for (const auto& word : kept) {
      const auto& related = lexicon.related_words(word);
      expanded.insert(related.begin(), related.end());
    }
    for (const auto& word : expanded) ts.term_set.insert(stem(word));
  } else {
    TermSet stems;
    for (const auto& word : kept) stems.insert(stem(word));
    ts.term_set = expand_synonyms(stems, lexicon);
  }
  return ts;
}

}  // namespace phishkd
