#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "phishkd/mime.hpp"

namespace phishkd {

struct Anchor {
  std::string href;
  std::string visible_text;  // whitespace-collapsed text inside <a>...</a>

  bool operator==(const Anchor&) const = default;
};

struct HtmlArtifacts {
  std::vector<Anchor> anchors;
  std::vector<std::string> image_urls;
  std::size_t images_inside_anchors = 0;
  std::string plain_text;  // all parts, markup stripped, one part per line block
  // Subject URLs, then per part: anchor hrefs, image sources and the
  // scheme-prefixed URLs of the text outside anchors. Duplicates are kept.
  std::vector<std::string> all_urls;

  bool operator==(const HtmlArtifacts&) const = default;
};

struct HtmlScan {
  std::vector<Anchor> anchors;
  std::vector<std::string> image_urls;
  std::size_t images_inside_anchors = 0;
  std::string text;               // visible text
  std::string text_outside_anchors;
};

// Forgiving tag scan: tolerates unclosed tags, unquoted attributes and
// stray '<'. Script and style contents are not visible text.
HtmlScan scan_html(std::string_view html);

// http:// and https:// URLs in free text; trailing punctuation is trimmed.
std::vector<std::string> find_text_urls(std::string_view text);

std::string decode_entities(std::string_view text);

HtmlArtifacts extract_artifacts(const EmailDocument& doc);

}  // namespace phishkd
