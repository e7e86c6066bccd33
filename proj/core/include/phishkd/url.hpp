#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace phishkd {

enum class HostKind { domain, ipv4, hex_or_decimal_int, other };

std::string_view to_string(HostKind kind) noexcept;

struct UrlParts {
  std::string scheme;  // lowercased
  std::string host;    // lowercased, userinfo and port removed
  HostKind host_kind = HostKind::other;
  std::size_t dot_count = 0;             // '.' characters in the whole URL
  std::size_t percent_escape_count = 0;  // valid %XX sequences in the whole URL
  std::string path;                      // everything after the authority

  std::size_t host_dot_count() const noexcept;

  bool operator==(const UrlParts&) const = default;
};

// Splits "scheme://[userinfo@]host[:port][rest]". Throws MalformedUrl when
// either the scheme or the host cannot be delimited.
UrlParts parse_url(std::string_view url);
std::optional<UrlParts> try_parse_url(std::string_view url) noexcept;

HostKind classify_host(std::string_view host) noexcept;

}  // namespace phishkd
