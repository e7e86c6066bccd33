#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishkd/textproc.hpp"

namespace phishkd {

// Weight of a phishing term: its phishing-document frequency over the number
// of terms in the lexicon.
double term_weight(std::size_t document_frequency, std::size_t n_terms);

class PhishingLexicon {
 public:
  struct Entry {
    std::size_t tdf = 0;
    double tw = 0.0;

    bool operator==(const Entry&) const = default;
  };

  PhishingLexicon() = default;

  // N is the number of entries; every tdf must be >= 1.
  static PhishingLexicon from_frequencies(std::map<std::string, std::size_t, std::less<>> tdf);

  std::size_t n_terms() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::map<std::string, Entry, std::less<>>& entries() const noexcept { return entries_; }
  const Entry* find(std::string_view term) const;

  bool operator==(const PhishingLexicon&) const = default;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

// Terms present in at least one phishing term set and in no ham term set.
// Throws EmptyCorpus when `phish` is empty. An empty result is logged as a
// warning and, if given, appended to `warnings`.
PhishingLexicon build_lexicon(std::span<const TermSet> phish, std::span<const TermSet> ham,
                              std::vector<std::string>* warnings = nullptr);
PhishingLexicon build_lexicon(std::span<const TermSet* const> phish,
                              std::span<const TermSet* const> ham,
                              std::vector<std::string>* warnings = nullptr);

struct WeightOptions {
  // Divide the summed weight by N once more, as in the per-email pseudocode.
  bool normalize_by_n = false;
};

double email_phishing_weight(const PhishingLexicon& lexicon, const TermSet& terms,
                             const WeightOptions& options = {});

// "phishlex v1 N=<n>" header, then "term<TAB>tdf" lines sorted by term.
void write_lexicon(const PhishingLexicon& lexicon, std::ostream& out);
PhishingLexicon read_lexicon(std::istream& in);
void save_lexicon(const PhishingLexicon& lexicon, const std::filesystem::path& path);
PhishingLexicon load_lexicon(const std::filesystem::path& path);

}  // namespace phishkd
