#include "phishkd/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "phishkd/error.hpp"

namespace phishkd {
namespace {

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t dot = host.find('.', pos);
    labels.push_back(host.substr(pos, dot == std::string_view::npos ? dot : dot - pos));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return labels;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool is_hex_token(std::string_view s) {
  return s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X') &&
         std::all_of(s.begin() + 2, s.end(), is_hex);
}

bool is_ldh_label(std::string_view label) {
  if (label.empty() || label.size() > 63) return false;
  if (label.front() == '-' || label.back() == '-') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

}  // namespace

std::string_view to_string(HostKind kind) noexcept {
  switch (kind) {
    case HostKind::domain: return "domain";
    case HostKind::ipv4: return "ipv4";
    case HostKind::hex_or_decimal_int: return "hex_or_decimal_int";
    case HostKind::other: return "other";
  }
  return "other";
}

HostKind classify_host(std::string_view host) noexcept {
  if (host.empty()) return HostKind::other;
  if (all_digits(host) || is_hex_token(host)) return HostKind::hex_or_decimal_int;

  std::string_view trimmed = host;
  if (trimmed.back() == '.') trimmed.remove_suffix(1);  // fully-qualified form
  const auto labels = split_labels(trimmed);

  if (labels.size() == 4 && std::all_of(labels.begin(), labels.end(), [](std::string_view l) {
        return l.size() <= 3 && all_digits(l) && std::stoi(std::string(l)) <= 255;
      })) {
    return HostKind::ipv4;
  }

  const bool ldh = std::all_of(labels.begin(), labels.end(), is_ldh_label);
  const bool numeric_like = std::any_of(labels.begin(), labels.end(), [](std::string_view l) {
    return is_hex_token(l);
  });
  const std::string_view tld = labels.back();
  const bool tld_has_letter = std::any_of(tld.begin(), tld.end(), is_alpha);
  if (labels.size() >= 2 && ldh && !numeric_like && tld_has_letter) return HostKind::domain;
  return HostKind::other;
}

std::size_t UrlParts::host_dot_count() const noexcept {
  return static_cast<std::size_t>(std::count(host.begin(), host.end(), '.'));
}

std::optional<UrlParts> try_parse_url(std::string_view url) noexcept {
  try {
    return parse_url(url);
  } catch (...) {
    return std::nullopt;
  }
}

UrlParts parse_url(std::string_view url) {
  const std::size_t colon = url.find(':');
  if (colon == std::string_view::npos || colon == 0 || !is_alpha(url[0])) {
    throw Error(ErrorCode::MalformedUrl, "no scheme in '" + std::string(url) + "'");
  }
  const std::string_view scheme = url.substr(0, colon);
  const bool scheme_ok = std::all_of(scheme.begin(), scheme.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  });
  if (!scheme_ok) throw Error(ErrorCode::MalformedUrl, "bad scheme in '" + std::string(url) + "'");
  if (url.substr(colon + 1, 2) != "//") {
    throw Error(ErrorCode::MalformedUrl, "no authority in '" + std::string(url) + "'");
  }

  const std::size_t auth_begin = colon + 3;
  std::size_t auth_end = url.find_first_of("/?#\\", auth_begin);
  if (auth_end == std::string_view::npos) auth_end = url.size();
  std::string_view authority = url.substr(auth_begin, auth_end - auth_begin);

  if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  if (!host.empty() && host.front() == '[') {
    const std::size_t close = host.find(']');
    host = close == std::string_view::npos ? host : host.substr(0, close + 1);
  } else if (const std::size_t port = host.find(':'); port != std::string_view::npos) {
    host = host.substr(0, port);
  }
  if (host.empty() || std::any_of(host.begin(), host.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '>' || c == '"';
      })) {
    throw Error(ErrorCode::MalformedUrl, "no host in '" + std::string(url) + "'");
  }

  UrlParts parts;
  parts.scheme.resize(scheme.size());
  std::transform(scheme.begin(), scheme.end(), parts.scheme.begin(),
                 [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
  parts.host.resize(host.size());
  std::transform(host.begin(), host.end(), parts.host.begin(),
                 [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
  parts.host_kind = classify_host(parts.host);
  parts.path = std::string(url.substr(auth_end));
  parts.dot_count = static_cast<std::size_t>(std::count(url.begin(), url.end(), '.'));
  for (std::size_t i = 0; i + 2 < url.size(); ++i) {
    if (url[i] == '%' && is_hex(url[i + 1]) && is_hex(url[i + 2])) {
      ++parts.percent_escape_count;
      i += 2;
    }
  }
  return parts;
}

}  // namespace phishkd
