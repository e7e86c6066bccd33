#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phishkd/corpus.hpp"
#include "phishkd/features.hpp"
#include "phishkd/html.hpp"
#include "phishkd/lexicon.hpp"
#include "phishkd/mime.hpp"
#include "phishkd/textproc.hpp"

namespace phishkd {

struct TextResources {
  StopList stop = StopList::english();
  SynonymLexicon synonyms = SynonymLexicon::bundled();
  PreprocessOptions preprocess;
};

// Everything about one email that does not depend on the phishing lexicon.
struct ProcessedEmail {
  std::string source_id;
  Label label = Label::unlabeled;
  EmailDocument doc;
  HtmlArtifacts arts;
  TokenStream terms;
};

// Best-effort: unparseable messages fall back to a lenient parse and the
// fallback is logged.
ProcessedEmail process_email(const RawEmail& raw, const TextResources& resources);

// Output order equals input order for any `jobs`.
std::vector<ProcessedEmail> process_corpus(std::span<const RawEmail> emails,
                                           const TextResources& resources, unsigned jobs = 1);

// Lexicon over the emails at `indices`, or over every email.
PhishingLexicon lexicon_from(std::span<const ProcessedEmail> emails,
                             std::span<const std::size_t> indices,
                             std::vector<std::string>* warnings = nullptr);
PhishingLexicon lexicon_from(std::span<const ProcessedEmail> emails,
                             std::vector<std::string>* warnings = nullptr);

FeatureVector features_of(const ProcessedEmail& email, const PhishingLexicon& lexicon,
                          const FeatureOptions& options = {});

// One canonical row per email, in input order.
Dataset build_dataset(std::span<const ProcessedEmail> emails, const PhishingLexicon& lexicon,
                      const FeatureOptions& options = {}, unsigned jobs = 1);
Dataset build_dataset(std::span<const RawEmail> emails, const PhishingLexicon& lexicon,
                      const TextResources& resources, const FeatureOptions& options = {},
                      unsigned jobs = 1);

}  // namespace phishkd
