#include "phishkd/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "phishkd/error.hpp"
#include "phishkd/log.hpp"

namespace phishkd {

double term_weight(std::size_t document_frequency, std::size_t n_terms) {
  if (n_terms == 0) throw Error(ErrorCode::InvalidArgument, "term weight with N = 0");
  return static_cast<double>(document_frequency) / static_cast<double>(n_terms);
}

PhishingLexicon PhishingLexicon::from_frequencies(
    std::map<std::string, std::size_t, std::less<>> tdf) {
  PhishingLexicon lex;
  const std::size_t n = tdf.size();
  for (auto& [term, df] : tdf) {
    if (df == 0) throw Error(ErrorCode::InvalidArgument, "term '" + term + "' has tdf 0");
    lex.entries_.emplace(term, Entry{df, term_weight(df, n)});
  }
  return lex;
}

const PhishingLexicon::Entry* PhishingLexicon::find(std::string_view term) const {
  const auto it = entries_.find(term);
  return it == entries_.end() ? nullptr : &it->second;
}

PhishingLexicon build_lexicon(std::span<const TermSet* const> phish,
                              std::span<const TermSet* const> ham,
                              std::vector<std::string>* warnings) {
  if (phish.empty()) throw Error(ErrorCode::EmptyCorpus, "no phishing documents for the lexicon");

  std::unordered_set<std::string_view> ham_terms;
  for (const TermSet* set : ham) ham_terms.insert(set->begin(), set->end());

  std::unordered_map<std::string_view, std::size_t> counts;
  for (const TermSet* set : phish) {
    for (const auto& term : *set) {
      if (!ham_terms.contains(term)) ++counts[term];
    }
  }

  std::map<std::string, std::size_t, std::less<>> tdf;
  for (const auto& [term, df] : counts) tdf.emplace(std::string(term), df);
  if (tdf.empty()) {
    const std::string message = "phishing lexicon is empty: every phishing term also occurs in ham";
    log::warning(message);
    if (warnings) warnings->push_back(message);
  }
  return PhishingLexicon::from_frequencies(std::move(tdf));
}

PhishingLexicon build_lexicon(std::span<const TermSet> phish, std::span<const TermSet> ham,
                              std::vector<std::string>* warnings) {
  std::vector<const TermSet*> p;
  std::vector<const TermSet*> h;
  for (const auto& s : phish) p.push_back(&s);
  for (const auto& s : ham) h.push_back(&s);
  return build_lexicon(std::span<const TermSet* const>(p), std::span<const TermSet* const>(h),
                       warnings);
}

double email_phishing_weight(const PhishingLexicon& lexicon, const TermSet& terms,
                             const WeightOptions& options) {
  double w = 0.0;
  // Iterate the smaller sorted set against the other's lookup.
  if (terms.size() <= lexicon.n_terms()) {
    for (const auto& t : terms) {
      if (const auto* e = lexicon.find(t)) w += e->tw;
    }
  } else {
    for (const auto& [term, entry] : lexicon.entries()) {
      if (terms.contains(term)) w += entry.tw;
    }
  }
  if (options.normalize_by_n && lexicon.n_terms() > 0) w /= static_cast<double>(lexicon.n_terms());
  return w;
}

void write_lexicon(const PhishingLexicon& lexicon, std::ostream& out) {
  out << "phishlex v1 N=" << lexicon.n_terms() << '\n';
  for (const auto& [term, entry] : lexicon.entries()) out << term << '\t' << entry.tdf << '\n';
}

PhishingLexicon read_lexicon(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::CorruptLexicon, "missing header");
  constexpr std::string_view kPrefix = "phishlex v1 N=";
  if (!line.starts_with(kPrefix)) {
    if (line.starts_with("phishlex v")) throw Error(ErrorCode::VersionMismatch, line);
    throw Error(ErrorCode::CorruptLexicon, "bad header '" + line + "'");
  }
  std::size_t declared = 0;
  const char* first = line.data() + kPrefix.size();
  const char* last = line.data() + line.size();
  if (auto [p, ec] = std::from_chars(first, last, declared); ec != std::errc() || p != last) {
    throw Error(ErrorCode::CorruptLexicon, "bad N in '" + line + "'");
  }

  std::map<std::string, std::size_t, std::less<>> tdf;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::size_t df = 0;
    const char* b = tab == std::string::npos ? nullptr : line.data() + tab + 1;
    const char* e = line.data() + line.size();
    if (tab == std::string::npos || tab == 0 || std::from_chars(b, e, df).ptr != e || df == 0) {
      throw Error(ErrorCode::CorruptLexicon, "line " + std::to_string(line_no) + ": '" + line + "'");
    }
    if (!tdf.emplace(line.substr(0, tab), df).second) {
      throw Error(ErrorCode::CorruptLexicon, "duplicate term '" + line.substr(0, tab) + "'");
    }
  }
  if (tdf.size() != declared) {
    throw Error(ErrorCode::CorruptLexicon, "header declares N=" + std::to_string(declared) +
                                               " but file has " + std::to_string(tdf.size()) + " terms");
  }
  return PhishingLexicon::from_frequencies(std::move(tdf));
}

void save_lexicon(const PhishingLexicon& lexicon, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_lexicon(lexicon, out);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

PhishingLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_lexicon(in);
}

}  // namespace phishkd
