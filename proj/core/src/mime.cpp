#include "phishkd/mime.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

#include "phishkd/error.hpp"

namespace phishkd {
namespace {

constexpr int kMaxNesting = 32;

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return lower(x) == lower(y); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string normalize_newlines(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

// Returns the length of a "Name:" prefix, or 0 when the line is not a header.
std::size_t header_name_length(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] != ':') {
    const auto c = static_cast<unsigned char>(line[i]);
    if (c <= 32 || c >= 127) return 0;
    ++i;
  }
  return (i > 0 && i < line.size()) ? i : 0;
}

struct Entity {
  std::vector<Header> headers;
  std::string_view body;
  bool has_header_block = false;
};

// Splits an entity into its unfolded header list and body.
Entity split_entity(std::string_view text, ParseDiagnostics& diag) {
  Entity entity;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::size_t end = eol == std::string_view::npos ? text.size() : eol;
    const std::size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
    const std::string_view line = text.substr(pos, end - pos);
    if (line.empty()) {
      pos = next;
      break;
    }
    if ((line.front() == ' ' || line.front() == '\t') && !entity.headers.empty()) {
      entity.headers.back().value += ' ';
      entity.headers.back().value += trim(line);
    } else if (const std::size_t n = header_name_length(line); n > 0) {
      entity.headers.push_back({std::string(line.substr(0, n)), std::string(trim(line.substr(n + 1)))});
      entity.has_header_block = true;
    } else if (first) {
      // No header block at all: everything is body.
      entity.body = text;
      return entity;
    } else {
      diag.notes.push_back("ignored header line: " + std::string(line.substr(0, 60)));
    }
    first = false;
    pos = next;
  }
  entity.body = text.substr(std::min(pos, text.size()));
  return entity;
}

std::optional<std::string_view> find_header(const std::vector<Header>& headers,
                                            std::string_view name) {
  for (const auto& h : headers) {
    if (iequals(h.name, name)) return std::string_view(h.value);
  }
  return std::nullopt;
}

std::string media_type(std::string_view content_type) {
  const auto semi = content_type.find(';');
  return to_lower(trim(content_type.substr(0, semi)));
}

std::string decode_transfer(std::string_view body, std::string_view encoding) {
  const std::string enc = to_lower(trim(encoding));
  if (enc == "base64") return mime::decode_base64(body);
  if (enc == "quoted-printable") return mime::decode_quoted_printable(body);
  return std::string(body);
}

// Body lines of each part between "--boundary" delimiters.
std::vector<std::string_view> split_multipart(std::string_view body, std::string_view boundary,
                                              bool& closed) {
  std::vector<std::string_view> parts;
  const std::string delimiter = "--" + std::string(boundary);
  std::optional<std::size_t> part_start;
  std::size_t pos = 0;
  closed = false;
  while (pos <= body.size()) {
    const std::size_t eol = body.find('\n', pos);
    const std::size_t end = eol == std::string_view::npos ? body.size() : eol;
    const std::string_view line = body.substr(pos, end - pos);
    if (line.starts_with(delimiter)) {
      const std::string_view rest = trim(line.substr(delimiter.size()));
      const bool closing = rest.starts_with("--");
      if (rest.empty() || closing) {
        if (part_start) {
          // The newline before a delimiter belongs to the delimiter.
          std::size_t part_end = pos > *part_start ? pos - 1 : pos;
          parts.push_back(body.substr(*part_start, part_end - *part_start));
        }
        if (closing) {
          closed = true;
          return parts;
        }
        part_start = eol == std::string_view::npos ? body.size() : eol + 1;
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (part_start && *part_start < body.size()) parts.push_back(body.substr(*part_start));
  return parts;
}

void walk(std::string_view text, int depth, std::string_view default_type, EmailDocument& doc,
          const std::vector<Header>* preparsed, std::string_view preparsed_body) {
  auto& diag = doc.diagnostics;
  Entity entity;
  if (preparsed) {
    entity.headers = *preparsed;
    entity.body = preparsed_body;
  } else {
    entity = split_entity(text, diag);
  }
  const auto& headers = entity.headers;

  const auto ct_header = find_header(headers, "Content-Type");
  std::string type = ct_header ? media_type(*ct_header) : std::string(default_type);
  if (type.empty() || type.find('/') == std::string::npos) type = "text/plain";

  if (depth >= kMaxNesting) {
    diag.notes.push_back("nesting limit reached");
    ++diag.skipped_parts;
    return;
  }

  if (type.starts_with("multipart/")) {
    const auto boundary = ct_header ? mime::header_param(*ct_header, "boundary") : std::nullopt;
    bool closed = false;
    std::vector<std::string_view> parts;
    if (boundary && !boundary->empty()) parts = split_multipart(entity.body, *boundary, closed);
    if (parts.empty()) {
      diag.notes.push_back("multipart without usable boundary; treated as text/plain");
      std::size_t replaced = 0;
      doc.parts.push_back({"text/plain", mime::to_utf8(entity.body, "", replaced), false});
      diag.replaced_sequences += replaced;
      return;
    }
    if (!closed) diag.notes.push_back("multipart missing closing boundary");
    const std::string_view child_default = type == "multipart/digest" ? "message/rfc822" : "text/plain";
    for (const auto part : parts) walk(part, depth + 1, child_default, doc, nullptr, {});
    return;
  }

  const auto encoding = find_header(headers, "Content-Transfer-Encoding").value_or("");
  if (type == "message/rfc822") {
    const std::string decoded = decode_transfer(entity.body, encoding);
    walk(decoded, depth + 1, "text/plain", doc, nullptr, {});
    return;
  }

  if (!type.starts_with("text/")) {
    ++diag.skipped_parts;
    return;
  }

  const auto disposition = find_header(headers, "Content-Disposition");
  const bool attachment =
      disposition && to_lower(trim(disposition->substr(0, disposition->find(';')))) == "attachment";
  const std::string charset =
      ct_header ? mime::header_param(*ct_header, "charset").value_or("") : std::string();
  std::size_t replaced = 0;
  std::string body = mime::to_utf8(decode_transfer(entity.body, encoding), charset, replaced);
  diag.replaced_sequences += replaced;
  doc.parts.push_back({std::move(type), std::move(body), attachment});
}

EmailDocument parse_impl(const RawEmail& raw, bool lenient) {
  if (raw.bytes.empty()) {
    if (!lenient) throw Error(ErrorCode::MalformedMessage, raw.source_id + ": empty message");
    EmailDocument doc;
    doc.diagnostics.notes.push_back("empty message");
    return doc;
  }
  const std::string text = normalize_newlines(raw.bytes);
  std::string_view view = text;
  if (view.starts_with("From ")) {
    const auto eol = view.find('\n');
    view = eol == std::string_view::npos ? std::string_view{} : view.substr(eol + 1);
  }

  EmailDocument doc;
  Entity top = split_entity(view, doc.diagnostics);
  if (!top.has_header_block) {
    if (!lenient) {
      throw Error(ErrorCode::MalformedMessage, raw.source_id + ": no header block found");
    }
    doc.diagnostics.notes.push_back("no header block; whole message treated as text/plain");
    std::size_t replaced = 0;
    doc.parts.push_back({"text/plain", mime::to_utf8(view, "", replaced), false});
    doc.diagnostics.replaced_sequences += replaced;
    return doc;
  }

  doc.headers = top.headers;
  if (const auto subject = find_header(doc.headers, "Subject")) {
    std::size_t replaced = 0;
    doc.subject = mime::decode_header_words(*subject, &replaced);
    doc.diagnostics.replaced_sequences += replaced;
  }
  walk({}, 0, "text/plain", doc, &top.headers, top.body);
  doc.has_html_part = std::any_of(doc.parts.begin(), doc.parts.end(),
                                  [](const BodyPart& p) { return p.content_type == "text/html"; });
  return doc;
}

void append_utf8(std::string& out, std::uint32_t cp) {
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

constexpr std::uint32_t kReplacement = 0xFFFD;

// windows-1252 0x80..0x9F; 0 marks an unassigned byte.
constexpr std::array<std::uint16_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

std::string validate_utf8(std::string_view in, std::size_t& replaced) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    std::uint32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    }
    bool ok = len > 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    ok = ok && cp >= min && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      append_utf8(out, kReplacement);
      ++replaced;
      ++i;
    }
  }
  return out;
}

}  // namespace

std::optional<std::string_view> EmailDocument::header(std::string_view name) const {
  return find_header(headers, name);
}

EmailDocument parse_email(const RawEmail& raw) { return parse_impl(raw, false); }

EmailDocument parse_email_lenient(const RawEmail& raw) { return parse_impl(raw, true); }

namespace mime {

std::string decode_base64(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size() * 3 / 4);
  std::uint32_t buffer = 0;
  int bits = 0;
  for (const char c : encoded) {
    int v;
    if (c >= 'A' && c <= 'Z') v = c - 'A';
    else if (c >= 'a' && c <= 'z') v = c - 'a' + 26;
    else if (c >= '0' && c <= '9') v = c - '0' + 52;
    else if (c == '+') v = 62;
    else if (c == '/') v = 63;
    else if (c == '=') break;
    else continue;
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

std::string decode_quoted_printable(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const char c = encoded[i];
    if (c != '=') {
      out.push_back(c);
      continue;
    }
    if (i + 1 < encoded.size() && encoded[i + 1] == '\n') {
      ++i;  // soft line break
    } else if (i + 2 < encoded.size() && encoded[i + 1] == '\r' && encoded[i + 2] == '\n') {
      i += 2;
    } else if (i + 2 < encoded.size() && hex_value(encoded[i + 1]) >= 0 &&
               hex_value(encoded[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(encoded[i + 1]) * 16 + hex_value(encoded[i + 2])));
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string decode_header_words(std::string_view value, std::size_t* replaced) {
  std::size_t local = 0;
  std::size_t& bad = replaced ? *replaced : local;

  struct Word {
    std::size_t start;
    std::size_t end;
    std::string text;
  };
  auto next_word = [&](std::size_t from) -> std::optional<Word> {
    for (std::size_t start = value.find("=?", from); start != std::string_view::npos;
         start = value.find("=?", start + 2)) {
      const std::size_t q1 = value.find('?', start + 2);
      if (q1 == std::string_view::npos || q1 + 2 >= value.size() || value[q1 + 2] != '?') continue;
      const std::size_t close = value.find("?=", q1 + 3);
      if (close == std::string_view::npos) return std::nullopt;
      const char enc = lower(value[q1 + 1]);
      if (enc != 'b' && enc != 'q') continue;
      const std::string_view charset = value.substr(start + 2, q1 - start - 2);
      const std::string_view payload = value.substr(q1 + 3, close - q1 - 3);
      std::string bytes;
      if (enc == 'b') {
        bytes = decode_base64(payload);
      } else {
        std::string q(payload);
        std::replace(q.begin(), q.end(), '_', ' ');
        bytes = decode_quoted_printable(q);
      }
      return Word{start, close + 2, to_utf8(bytes, charset, bad)};
    }
    return std::nullopt;
  };

  std::string out;
  std::size_t pos = 0;
  bool previous_was_word = false;
  while (auto word = next_word(pos)) {
    const std::string_view between = value.substr(pos, word->start - pos);
    // Whitespace between adjacent encoded-words is not part of the text.
    if (!(previous_was_word && trim(between).empty())) out += to_utf8(between, "", bad);
    out += word->text;
    previous_was_word = true;
    pos = word->end;
  }
  out += to_utf8(value.substr(pos), "", bad);
  return out;
}

std::string to_utf8(std::string_view bytes, std::string_view charset, std::size_t& replaced) {
  const std::string cs = to_lower(trim(charset));
  const bool latin1 = cs == "iso-8859-1" || cs == "latin1" || cs == "iso8859-1" ||
                      cs == "latin-1" || cs == "iso_8859-1";
  const bool cp1252 = cs == "windows-1252" || cs == "cp1252";
  if (!latin1 && !cp1252) return validate_utf8(bytes, replaced);
  std::string out;
  out.reserve(bytes.size());
  for (const char ch : bytes) {
    const auto b = static_cast<unsigned char>(ch);
    std::uint32_t cp = b;
    if (cp1252 && b >= 0x80 && b <= 0x9F) {
      cp = kCp1252High[b - 0x80];
      if (cp == 0) {
        cp = kReplacement;
        ++replaced;
      }
    }
    append_utf8(out, cp);
  }
  return out;
}

std::optional<std::string> header_param(std::string_view header_value, std::string_view param) {
  std::size_t pos = header_value.find(';');
  while (pos != std::string_view::npos && pos < header_value.size()) {
    ++pos;
    const std::size_t eq = header_value.find('=', pos);
    if (eq == std::string_view::npos) return std::nullopt;
    const std::string_view name = trim(header_value.substr(pos, eq - pos));
    std::size_t vpos = eq + 1;
    while (vpos < header_value.size() && std::isspace(static_cast<unsigned char>(header_value[vpos]))) ++vpos;
    std::string value;
    std::size_t after;
    if (vpos < header_value.size() && header_value[vpos] == '"') {
      std::size_t i = vpos + 1;
      while (i < header_value.size() && header_value[i] != '"') {
        if (header_value[i] == '\\' && i + 1 < header_value.size()) ++i;
        value.push_back(header_value[i]);
        ++i;
      }
      after = header_value.find(';', i);
    } else {
      after = header_value.find(';', vpos);
      value = std::string(trim(header_value.substr(vpos, after == std::string_view::npos
                                                             ? std::string_view::npos
                                                             : after - vpos)));
    }
    if (iequals(name, param)) return value;
    pos = after;
  }
  return std::nullopt;
}

}  // namespace mime
}  // namespace phishkd
