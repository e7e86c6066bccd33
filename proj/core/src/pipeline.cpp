#include "phishkd/pipeline.hpp"

#include <numeric>

#include "phishkd/error.hpp"
#include "phishkd/log.hpp"
#include "phishkd/parallel.hpp"

namespace phishkd {

ProcessedEmail process_email(const RawEmail& raw, const TextResources& resources) {
  ProcessedEmail out;
  out.source_id = raw.source_id;
  out.label = raw.label;
  try {
    out.doc = parse_email(raw);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MalformedMessage) throw;
    log::warning(raw.source_id + ": " + e.what() + "; treating the whole input as plain text");
    out.doc = parse_email_lenient(raw);
  }
  out.arts = extract_artifacts(out.doc);
  out.terms = preprocess(out.doc, out.arts, resources.stop, resources.synonyms, resources.preprocess);
  return out;
}

std::vector<ProcessedEmail> process_corpus(std::span<const RawEmail> emails,
                                           const TextResources& resources, unsigned jobs) {
  std::vector<ProcessedEmail> out(emails.size());
  parallel_for(emails.size(), jobs, [&](std::size_t i) { out[i] = process_email(emails[i], resources); });
  return out;
}

PhishingLexicon lexicon_from(std::span<const ProcessedEmail> emails,
                             std::span<const std::size_t> indices,
                             std::vector<std::string>* warnings) {
  std::vector<const TermSet*> phish;
  std::vector<const TermSet*> ham;
  for (const auto i : indices) {
    const auto& e = emails[i];
    if (e.label == Label::phish) phish.push_back(&e.terms.term_set);
    if (e.label == Label::ham) ham.push_back(&e.terms.term_set);
  }
  return build_lexicon(std::span<const TermSet* const>(phish), std::span<const TermSet* const>(ham),
                       warnings);
}

PhishingLexicon lexicon_from(std::span<const ProcessedEmail> emails,
                             std::vector<std::string>* warnings) {
  std::vector<std::size_t> all(emails.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return lexicon_from(emails, all, warnings);
}

FeatureVector features_of(const ProcessedEmail& email, const PhishingLexicon& lexicon,
                          const FeatureOptions& options) {
  FeatureDiagnostics diag;
  auto fv = extract_features(email.doc, email.arts, email.terms, lexicon, options, &diag);
  if (diag.unparseable_urls > 0) {
    log::write(log::Level::debug,
               email.source_id + ": " + std::to_string(diag.unparseable_urls) + " unparseable URL(s) skipped");
  }
  fv.label = email.label;
  fv.source_id = email.source_id;
  return fv;
}

Dataset build_dataset(std::span<const ProcessedEmail> emails, const PhishingLexicon& lexicon,
                      const FeatureOptions& options, unsigned jobs) {
  std::vector<FeatureVector> rows(emails.size());
  parallel_for(emails.size(), jobs, [&](std::size_t i) { rows[i] = features_of(emails[i], lexicon, options); });
  Dataset ds = Dataset::canonical();
  ds.rows.reserve(rows.size());
  for (const auto& fv : rows) ds.add(fv);
  return ds;
}

Dataset build_dataset(std::span<const RawEmail> emails, const PhishingLexicon& lexicon,
                      const TextResources& resources, const FeatureOptions& options, unsigned jobs) {
  const auto processed = process_corpus(emails, resources, jobs);
  return build_dataset(processed, lexicon, options, jobs);
}

}  // namespace phishkd
