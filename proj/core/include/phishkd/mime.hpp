#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phishkd/corpus.hpp"

namespace phishkd {

struct Header {
  std::string name;
  std::string value;  // unfolded, raw (not RFC 2047 decoded)

  bool operator==(const Header&) const = default;
};

struct BodyPart {
  std::string content_type;  // lowercased type/subtype
  std::string text;          // transfer-decoded, converted to UTF-8
  bool attachment = false;

  bool operator==(const BodyPart&) const = default;
};

struct ParseDiagnostics {
  std::size_t replaced_sequences = 0;  // invalid bytes replaced by U+FFFD
  std::size_t skipped_parts = 0;       // non-text leaves (images, binaries)
  std::vector<std::string> notes;

  bool operator==(const ParseDiagnostics&) const = default;
};

struct EmailDocument {
  std::string subject;
  std::vector<Header> headers;
  std::vector<BodyPart> parts;
  bool has_html_part = false;
  ParseDiagnostics diagnostics;

  // First header with this name (case-insensitive).
  std::optional<std::string_view> header(std::string_view name) const;

  bool operator==(const EmailDocument&) const = default;
};

// Parses an RFC 822 / MIME message. Multipart bodies are flattened into the
// list of their text leaves. Throws MalformedMessage only when the message
// has no recognisable header block.
EmailDocument parse_email(const RawEmail& raw);

// Never throws: a message without headers becomes a single text/plain part
// holding the whole input, with a note in the diagnostics.
EmailDocument parse_email_lenient(const RawEmail& raw);

namespace mime {

std::string decode_base64(std::string_view encoded);
std::string decode_quoted_printable(std::string_view encoded);
// Decodes RFC 2047 encoded-words ("=?charset?B|Q?...?=") inside a header value.
std::string decode_header_words(std::string_view value, std::size_t* replaced = nullptr);
// Converts bytes in `charset` to UTF-8. Latin-1 and windows-1252 are mapped;
// anything else is validated as UTF-8 with invalid sequences replaced.
std::string to_utf8(std::string_view bytes, std::string_view charset, std::size_t& replaced);
// Returns the value of `param` in a structured header such as Content-Type.
std::optional<std::string> header_param(std::string_view header_value, std::string_view param);

}  // namespace mime

}  // namespace phishkd
