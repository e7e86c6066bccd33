#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishkd/corpus.hpp"
#include "phishkd/html.hpp"
#include "phishkd/lexicon.hpp"
#include "phishkd/mime.hpp"
#include "phishkd/textproc.hpp"

namespace phishkd {

enum class FeatureKind { binary, numeric };

std::string_view to_string(FeatureKind kind) noexcept;

inline constexpr std::size_t kFeatureCount = 16;

// Canonical column order of the email feature vector.
enum class Feature : std::size_t {
  html_body,
  hex_urls,
  domains_count,
  text_link_difference,
  dots_count,
  term_account,
  term_dear,
  images_as_url,
  ip_urls,
  term_paypal,
  term_login,
  term_bank,
  phishing_terms_weight,
  term_verify,
  term_agree,
  term_suspend,
};

const std::array<std::string_view, kFeatureCount>& feature_names();
const std::array<FeatureKind, kFeatureCount>& feature_kinds();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  Label label = Label::unlabeled;
  std::string source_id;

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }

  bool operator==(const FeatureVector&) const = default;
};

enum class HexMode { escapes, host, either };
enum class DotsMode { full_url, host_only };
enum class TermMatch { stem, literal };

HexMode parse_hex_mode(std::string_view text);
DotsMode parse_dots_mode(std::string_view text);
TermMatch parse_term_match(std::string_view text);
std::string_view to_string(HexMode mode) noexcept;
std::string_view to_string(DotsMode mode) noexcept;
std::string_view to_string(TermMatch mode) noexcept;

struct FeatureOptions {
  HexMode hex_mode = HexMode::either;
  DotsMode dots_mode = DotsMode::full_url;
  TermMatch term_match = TermMatch::stem;
  WeightOptions weight;
};

struct FeatureDiagnostics {
  std::size_t unparseable_urls = 0;
};

FeatureVector extract_features(const EmailDocument& doc, const HtmlArtifacts& arts,
                               const TokenStream& terms, const PhishingLexicon& lexicon,
                               const FeatureOptions& options = {},
                               FeatureDiagnostics* diagnostics = nullptr);

struct Row {
  std::vector<double> values;
  Label label = Label::unlabeled;
  std::string source_id;

  bool operator==(const Row&) const = default;
};

// A labelled table. The email pipeline always produces the 16 canonical
// columns; the learners and ranking accept any arity.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> kinds;
  std::vector<Row> rows;

  static Dataset canonical();
  static Dataset with_schema(std::vector<std::string> names, std::vector<FeatureKind> kinds);

  std::size_t arity() const noexcept { return feature_names.size(); }
  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }

  // Throws ArityMismatch when the row width differs from the schema.
  void add(Row row);
  void add(const FeatureVector& fv);

  std::vector<double> column(std::size_t feature) const;
  std::vector<Label> labels() const;
  std::size_t count(Label label) const;
  Dataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;
};

// ARFF: "@relation phishing", one numeric attribute per feature, nominal
// class {ham,phish} last, then "@data". The source id of a row is kept as a
// trailing "%" comment.
void write_arff(const Dataset& ds, std::ostream& out);
void write_arff(const Dataset& ds, const std::filesystem::path& path);
Dataset read_arff(std::istream& in);
Dataset read_arff(const std::filesystem::path& path);

// One JSON object per row with the feature names, "label" and "source_id".
void write_jsonl(const Dataset& ds, std::ostream& out);
Dataset read_jsonl(std::istream& in);

// Shortest decimal that reads back to the same double.
std::string format_real(double value);

}  // namespace phishkd
