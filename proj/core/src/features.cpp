#include "phishkd/features.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "phishkd/error.hpp"
#include "phishkd/porter.hpp"
#include "phishkd/url.hpp"

namespace phishkd {
namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "html_body",   "hex_urls",    "domains_count", "text_link_difference",
    "dots_count",  "term_account", "term_dear",    "images_as_url",
    "ip_urls",     "term_paypal", "term_login",    "term_bank",
    "phishing_terms_weight", "term_verify", "term_agree", "term_suspend"};

constexpr std::array<FeatureKind, kFeatureCount> kKinds = {
    FeatureKind::binary,  FeatureKind::numeric, FeatureKind::numeric, FeatureKind::numeric,
    FeatureKind::numeric, FeatureKind::binary,  FeatureKind::binary,  FeatureKind::numeric,
    FeatureKind::numeric, FeatureKind::binary,  FeatureKind::binary,  FeatureKind::binary,
    FeatureKind::numeric, FeatureKind::binary,  FeatureKind::binary,  FeatureKind::binary};

struct TermFeature {
  Feature feature;
  std::string_view word;
};

constexpr std::array<TermFeature, 8> kTermFeatures = {{
    {Feature::term_account, "account"},
    {Feature::term_dear, "dear"},
    {Feature::term_paypal, "paypal"},
    {Feature::term_login, "login"},
    {Feature::term_bank, "bank"},
    {Feature::term_verify, "verify"},
    {Feature::term_agree, "agree"},
    {Feature::term_suspend, "suspend"},
}};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// "<tag" or "</tag" for common structural tags.
bool looks_like_html(std::string_view text) {
  static constexpr std::array<std::string_view, 12> kTags = {
      "html", "body", "div", "p", "a", "table", "br", "font", "span", "img", "head", "td"};
  for (std::size_t i = text.find('<'); i != std::string_view::npos; i = text.find('<', i + 1)) {
    std::size_t j = i + 1;
    if (j < text.size() && text[j] == '/') ++j;
    std::size_t k = j;
    while (k < text.size() && std::isalpha(static_cast<unsigned char>(text[k]))) ++k;
    if (k == j || k >= text.size()) continue;
    const char after = text[k];
    if (!(after == '>' || after == '/' || std::isspace(static_cast<unsigned char>(after)))) continue;
    const std::string name = lowercase(text.substr(j, k - j));
    if (std::find(kTags.begin(), kTags.end(), name) != kTags.end()) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(FeatureKind kind) noexcept {
  return kind == FeatureKind::binary ? "binary" : "numeric";
}

const std::array<std::string_view, kFeatureCount>& feature_names() { return kNames; }
const std::array<FeatureKind, kFeatureCount>& feature_kinds() { return kKinds; }

HexMode parse_hex_mode(std::string_view text) {
  if (text == "escapes") return HexMode::escapes;
  if (text == "host") return HexMode::host;
  if (text == "either") return HexMode::either;
  throw Error(ErrorCode::InvalidArgument, "hex mode must be escapes, host or either");
}

DotsMode parse_dots_mode(std::string_view text) {
  if (text == "url") return DotsMode::full_url;
  if (text == "host") return DotsMode::host_only;
  throw Error(ErrorCode::InvalidArgument, "dots mode must be url or host");
}

TermMatch parse_term_match(std::string_view text) {
  if (text == "stem") return TermMatch::stem;
  if (text == "literal") return TermMatch::literal;
  throw Error(ErrorCode::InvalidArgument, "term match must be stem or literal");
}

std::string_view to_string(HexMode mode) noexcept {
  switch (mode) {
    case HexMode::escapes: return "escapes";
    case HexMode::host: return "host";
    case HexMode::either: return "either";
  }
  return "either";
}

std::string_view to_string(DotsMode mode) noexcept {
  return mode == DotsMode::host_only ? "host" : "url";
}

std::string_view to_string(TermMatch mode) noexcept {
  return mode == TermMatch::literal ? "literal" : "stem";
}

FeatureVector extract_features(const EmailDocument& doc, const HtmlArtifacts& arts,
                               const TokenStream& terms, const PhishingLexicon& lexicon,
                               const FeatureOptions& options, FeatureDiagnostics* diagnostics) {
  FeatureVector fv;

  const bool html = doc.has_html_part ||
                    std::any_of(doc.parts.begin(), doc.parts.end(),
                                [](const BodyPart& p) { return looks_like_html(p.text); });
  fv[Feature::html_body] = html ? 1.0 : 0.0;

  std::vector<UrlParts> urls;
  urls.reserve(arts.all_urls.size());
  std::size_t unparseable = 0;
  for (const auto& url : arts.all_urls) {
    if (auto parts = try_parse_url(url)) {
      urls.push_back(std::move(*parts));
    } else {
      ++unparseable;
    }
  }
  if (diagnostics) diagnostics->unparseable_urls += unparseable;

  std::size_t hex = 0;
  std::size_t ip = 0;
  std::size_t max_dots = 0;
  std::set<std::string_view> hosts;
  for (const auto& u : urls) {
    const bool escapes = u.percent_escape_count > 0;
    const bool int_host = u.host_kind == HostKind::hex_or_decimal_int;
    switch (options.hex_mode) {
      case HexMode::escapes: hex += escapes; break;
      case HexMode::host: hex += int_host; break;
      case HexMode::either: hex += (escapes || int_host); break;
    }
    ip += u.host_kind == HostKind::ipv4;
    hosts.insert(u.host);
    const std::size_t dots = options.dots_mode == DotsMode::host_only ? u.host_dot_count() : u.dot_count;
    max_dots = std::max(max_dots, dots);
  }
  fv[Feature::hex_urls] = static_cast<double>(hex);
  fv[Feature::ip_urls] = static_cast<double>(ip);
  fv[Feature::domains_count] = static_cast<double>(hosts.size());
  fv[Feature::dots_count] = static_cast<double>(max_dots);

  std::size_t mismatched = 0;
  for (const auto& anchor : arts.anchors) {
    const auto href = try_parse_url(anchor.href);
    if (!href) continue;
    for (const auto& label_url : find_text_urls(anchor.visible_text)) {
      const auto label = try_parse_url(label_url);
      if (label && label->host != href->host) {
        ++mismatched;
        break;
      }
    }
  }
  fv[Feature::text_link_difference] = static_cast<double>(mismatched);
  fv[Feature::images_as_url] = static_cast<double>(arts.images_inside_anchors);

  if (options.term_match == TermMatch::stem) {
    for (const auto& tf : kTermFeatures) {
      fv[tf.feature] = terms.term_set.contains(stem(tf.word)) ? 1.0 : 0.0;
    }
  } else {
    // whole tokens only: "suspended" does not count as "suspend"
    const std::set<std::string_view> words(terms.tokens.begin(), terms.tokens.end());
    for (const auto& tf : kTermFeatures) {
      fv[tf.feature] = words.contains(tf.word) ? 1.0 : 0.0;
    }
  }

  fv[Feature::phishing_terms_weight] = email_phishing_weight(lexicon, terms.term_set, options.weight);
  return fv;
}

Dataset Dataset::canonical() {
  Dataset ds;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    ds.feature_names.emplace_back(kNames[i]);
    ds.kinds.push_back(kKinds[i]);
  }
  return ds;
}

Dataset Dataset::with_schema(std::vector<std::string> names, std::vector<FeatureKind> kinds) {
  if (names.size() != kinds.size()) {
    throw Error(ErrorCode::ArityMismatch, "feature names and kinds differ in length");
  }
  Dataset ds;
  ds.feature_names = std::move(names);
  ds.kinds = std::move(kinds);
  return ds;
}

void Dataset::add(Row row) {
  if (row.values.size() != arity()) {
    throw Error(ErrorCode::ArityMismatch, "row has " + std::to_string(row.values.size()) +
                                              " values, schema has " + std::to_string(arity()));
  }
  rows.push_back(std::move(row));
}

void Dataset::add(const FeatureVector& fv) {
  add(Row{std::vector<double>(fv.values.begin(), fv.values.end()), fv.label, fv.source_id});
}

std::vector<double> Dataset::column(std::size_t feature) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.values.at(feature));
  return out;
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

std::size_t Dataset::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const Row& r) { return r.label == label; }));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out = with_schema(feature_names, kinds);
  out.rows.reserve(indices.size());
  for (const auto i : indices) out.rows.push_back(rows.at(i));
  return out;
}

}  // namespace phishkd
