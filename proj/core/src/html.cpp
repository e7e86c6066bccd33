#include "phishkd/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace phishkd {
namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool istarts_with(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

std::size_t ifind(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (istarts_with(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (const char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct Tag {
  std::string name;  // lowercased, without '/'
  bool closing = false;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::size_t end = 0;  // index one past '>'

  std::optional<std::string> attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

// Parses the tag starting at html[pos] == '<'. None when '<' does not start
// a tag name, in which case it is ordinary text.
std::optional<Tag> parse_tag(std::string_view html, std::size_t pos) {
  Tag tag;
  std::size_t i = pos + 1;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_begin = i;
  while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == ':' ||
                             html[i] == '-')) {
    tag.name.push_back(lower(html[i]));
    ++i;
  }
  if (i == name_begin || !std::isalpha(static_cast<unsigned char>(html[name_begin]))) {
    return std::nullopt;
  }

  auto skip_space = [&] {
    while (i < html.size() && (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/')) ++i;
  };
  for (;;) {
    skip_space();
    if (i >= html.size()) break;
    if (html[i] == '>') {
      ++i;
      break;
    }
    std::string key;
    while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '=' &&
           html[i] != '>' && html[i] != '/') {
      key.push_back(lower(html[i]));
      ++i;
    }
    while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
    std::string value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        const char quote = html[i++];
        const std::size_t close = html.find(quote, i);
        const std::size_t stop = close == std::string_view::npos ? html.size() : close;
        value.assign(html.substr(i, stop - i));
        i = close == std::string_view::npos ? html.size() : close + 1;
      } else {
        while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '>') {
          value.push_back(html[i]);
          ++i;
        }
      }
    }
    if (key.empty()) {
      ++i;  // stray character such as a lone quote
      continue;
    }
    tag.attributes.emplace_back(std::move(key), decode_entities(value));
  }
  tag.end = i;
  return tag;
}

bool is_block_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 22> kBlock = {
      "br", "p", "div", "tr", "td", "th", "li", "ul", "ol", "table", "h1",
      "h2", "h3", "h4", "h5", "h6", "hr", "title", "blockquote", "pre", "center", "body"};
  return std::find(kBlock.begin(), kBlock.end(), name) != kBlock.end();
}

}  // namespace

std::string decode_entities(std::string_view text) {
  struct Named {
    std::string_view name;
    std::uint32_t cp;
  };
  static constexpr std::array<Named, 10> kNamed = {{{"amp", '&'},
                                                    {"lt", '<'},
                                                    {"gt", '>'},
                                                    {"quot", '"'},
                                                    {"apos", '\''},
                                                    {"nbsp", ' '},
                                                    {"copy", 0xA9},
                                                    {"reg", 0xAE},
                                                    {"euro", 0x20AC},
                                                    {"pound", 0xA3}}};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const std::size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(text[i++]);
      continue;
    }
    const std::string_view body = text.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (body.size() > 1 && body[0] == '#') {
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const std::string_view digits = body.substr(hex ? 2 : 1);
      const bool valid = !digits.empty() && std::all_of(digits.begin(), digits.end(), [&](char c) {
        return hex ? std::isxdigit(static_cast<unsigned char>(c)) : std::isdigit(static_cast<unsigned char>(c));
      });
      if (valid) cp = static_cast<std::uint32_t>(std::stoul(std::string(digits), nullptr, hex ? 16 : 10));
    } else {
      for (const auto& named : kNamed) {
        if (body == named.name) cp = named.cp;
      }
    }
    if (!cp) {
      out.push_back(text[i++]);
      continue;
    }
    append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

HtmlScan scan_html(std::string_view html) {
  HtmlScan scan;
  std::string text;
  std::string outside;
  std::string anchor_text;
  bool in_anchor = false;

  auto close_anchor = [&] {
    if (in_anchor) scan.anchors.back().visible_text = collapse_whitespace(decode_entities(anchor_text));
    in_anchor = false;
    anchor_text.clear();
  };
  auto emit = [&](std::string_view s) {
    text.append(s);
    if (in_anchor) {
      anchor_text.append(s);
    } else {
      outside.append(s);
    }
  };

  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      const std::size_t next = html.find('<', i);
      const std::size_t stop = next == std::string_view::npos ? html.size() : next;
      emit(html.substr(i, stop - i));
      i = stop;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      const std::size_t close = html.find("-->", i + 4);
      i = close == std::string_view::npos ? html.size() : close + 3;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const std::size_t close = html.find('>', i);
      i = close == std::string_view::npos ? html.size() : close + 1;
      continue;
    }
    const auto tag = parse_tag(html, i);
    if (!tag) {
      emit(html.substr(i, 1));
      ++i;
      continue;
    }
    i = tag->end;

    if (tag->name == "a") {
      close_anchor();
      if (!tag->closing) {
        const auto href = tag->attribute("href");
        if (href && !trim_copy(*href).empty()) {
          scan.anchors.push_back({trim_copy(*href), {}});
          in_anchor = true;
        }
      }
    } else if (tag->name == "img" && !tag->closing) {
      if (const auto src = tag->attribute("src"); src && !trim_copy(*src).empty()) {
        scan.image_urls.push_back(trim_copy(*src));
        if (in_anchor) ++scan.images_inside_anchors;
      }
    } else if ((tag->name == "script" || tag->name == "style") && !tag->closing) {
      const std::string terminator = "</" + tag->name;
      const std::size_t close = ifind(html, terminator, i);
      if (close == std::string_view::npos) {
        i = html.size();
      } else {
        const std::size_t gt = html.find('>', close);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
    } else if (is_block_tag(tag->name)) {
      emit("\n");
    }
  }
  close_anchor();
  scan.text = decode_entities(text);
  scan.text_outside_anchors = decode_entities(outside);
  return scan;
}

std::vector<std::string> find_text_urls(std::string_view text) {
  std::vector<std::string> urls;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t scheme_len = 0;
    if (istarts_with(text, i, "http://")) {
      scheme_len = 7;
    } else if (istarts_with(text, i, "https://")) {
      scheme_len = 8;
    }
    const bool boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    if (scheme_len == 0 || !boundary) {
      ++i;
      continue;
    }
    std::size_t end = i + scheme_len;
    while (end < text.size()) {
      const auto c = static_cast<unsigned char>(text[end]);
      if (std::isspace(c) || c < 32 || c == '<' || c == '>' || c == '"' || c == '\'' || c == '`' ||
          c == '{' || c == '}' || c == '|' || c == '^') {
        break;
      }
      ++end;
    }
    std::string_view url = text.substr(i, end - i);
    while (url.size() > scheme_len && std::string_view(".,;:!?)]").find(url.back()) != std::string_view::npos) {
      url.remove_suffix(1);
    }
    if (url.size() > scheme_len) urls.emplace_back(url);
    i = end;
  }
  return urls;
}

HtmlArtifacts extract_artifacts(const EmailDocument& doc) {
  HtmlArtifacts arts;
  for (auto& url : find_text_urls(doc.subject)) arts.all_urls.push_back(std::move(url));

  for (const auto& part : doc.parts) {
    if (!arts.plain_text.empty()) arts.plain_text.push_back('\n');
    if (part.content_type == "text/html") {
      HtmlScan scan = scan_html(part.text);
      arts.plain_text += scan.text;
      for (const auto& anchor : scan.anchors) arts.all_urls.push_back(anchor.href);
      for (const auto& image : scan.image_urls) arts.all_urls.push_back(image);
      // URLs written as anchor labels are compared against the href, not
      // counted as separate links.
      for (auto& url : find_text_urls(scan.text_outside_anchors)) arts.all_urls.push_back(std::move(url));
      arts.images_inside_anchors += scan.images_inside_anchors;
      std::move(scan.anchors.begin(), scan.anchors.end(), std::back_inserter(arts.anchors));
      std::move(scan.image_urls.begin(), scan.image_urls.end(), std::back_inserter(arts.image_urls));
    } else {
      arts.plain_text += part.text;
      for (auto& url : find_text_urls(part.text)) arts.all_urls.push_back(std::move(url));
    }
  }
  return arts;
}

}  // namespace phishkd
