#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/bytestream.h>
#include <unicode/idna.h>

#include "tweetguard/error.hpp"
#include "tweetguard/public_suffix.hpp"
#include "tweetguard/text.hpp"

namespace tweetguard {

struct NormalizedUrl {
  std::string scheme;
  std::string host;  // lowercase ASCII (IDNA A-labels)
  std::uint16_t port = 0;
  std::string path;
  std::string query;
  std::string registrable_domain;

  static std::uint16_t default_port(std::string_view scheme) {
    return scheme == "https" ? 443 : 80;
  }

  // Canonical string form: the default port and an empty query are omitted.
  std::string str() const {
    std::string out = scheme + "://" + host;
    if (port != default_port(scheme)) out += ":" + std::to_string(port);
    out += path;
    if (!query.empty()) out += "?" + query;
    return out;
  }

  bool operator==(const NormalizedUrl&) const = default;
};

namespace detail {

inline bool is_scheme_char(char c, bool first) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  if (first) return false;
  return (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

inline std::string idna_to_ascii(std::string_view host, std::size_t index) {
  UErrorCode status = U_ZERO_ERROR;
  static const icu::IDNA* idna = [] {
    UErrorCode st = U_ZERO_ERROR;
    return icu::IDNA::createUTS46Instance(UIDNA_NONTRANSITIONAL_TO_ASCII, st);
  }();
  if (idna == nullptr) throw UrlParseError(index, "IDNA converter unavailable");
  std::string out;
  icu::StringByteSink<std::string> sink(&out);
  icu::IDNAInfo info;
  idna->nameToASCII_UTF8(icu::StringPiece(host.data(), static_cast<int32_t>(host.size())), sink,
                         info, status);
  if (U_FAILURE(status) || info.hasErrors()) {
    throw UrlParseError(index, "invalid internationalized host");
  }
  return out;
}

inline char hex_digit(unsigned v) { return static_cast<char>(v < 10 ? '0' + v : 'A' + v - 10); }

// Copies a path or query component, percent-encoding non-ASCII bytes and
// rejecting whitespace and control characters.
inline std::string clean_component(std::string_view part, std::size_t base_index) {
  std::string out;
  out.reserve(part.size());
  for (std::size_t i = 0; i < part.size(); ++i) {
    const auto c = static_cast<unsigned char>(part[i]);
    if (c <= 0x20 || c == 0x7f) {
      throw UrlParseError(base_index + i, "illegal character in URL");
    }
    if (c >= 0x80) {
      out += '%';
      out += hex_digit(c >> 4);
      out += hex_digit(c & 0xf);
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

}  // namespace detail

// Parses and canonicalizes a URL as posted in a tweet. The scheme defaults
// to http; host is lowercased and IDNA-encoded; the fragment and any
// userinfo are dropped. normalize_url(normalize_url(x).str()) == normalize_url(x).
inline NormalizedUrl normalize_url(std::string_view raw,
                                   const PublicSuffixList& psl = PublicSuffixList::bundled()) {
  std::size_t offset = 0;
  while (offset < raw.size() && (raw[offset] == ' ' || raw[offset] == '\t' ||
                                 raw[offset] == '\r' || raw[offset] == '\n')) {
    ++offset;
  }
  std::string_view s = text::trim(raw.substr(offset));
  if (s.empty()) throw UrlParseError(0, "empty URL");

  NormalizedUrl url;
  std::size_t pos = 0;
  const std::size_t sep = s.find("://");
  bool has_scheme = sep != std::string_view::npos && sep > 0;
  for (std::size_t i = 0; has_scheme && i < sep; ++i) {
    if (!detail::is_scheme_char(s[i], i == 0)) has_scheme = false;
  }
  if (has_scheme) {
    url.scheme = text::ascii_lower(s.substr(0, sep));
    if (url.scheme != "http" && url.scheme != "https") {
      throw UrlParseError(offset, "unsupported scheme '" + url.scheme + "'");
    }
    pos = sep + 3;
  } else {
    url.scheme = "http";
    if (s.starts_with("//")) pos = 2;
  }
  url.port = NormalizedUrl::default_port(url.scheme);

  const std::size_t authority_end = std::min(s.find_first_of("/?#", pos), s.size());
  std::string_view authority = s.substr(pos, authority_end - pos);
  std::size_t authority_index = offset + pos;
  if (auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority_index += at + 1;
    authority = authority.substr(at + 1);
  }

  std::string_view host = authority;
  std::string_view port_text;
  if (authority.starts_with("[")) {
    const std::size_t close = authority.find(']');
    if (close == std::string_view::npos) {
      throw UrlParseError(authority_index, "unterminated IPv6 literal");
    }
    host = authority.substr(0, close + 1);
    const std::string_view after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after[0] != ':') throw UrlParseError(authority_index + close + 1, "junk after IPv6 host");
      port_text = after.substr(1);
    }
    for (std::size_t i = 1; i + 1 < host.size(); ++i) {
      const char c = host[i];
      const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F') ||
                      c == ':' || c == '.';
      if (!ok) throw UrlParseError(authority_index + i, "illegal character in IPv6 host");
    }
  } else if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port_text = authority.substr(colon + 1);
  }

  if (!port_text.empty()) {
    unsigned long port = 0;
    const std::size_t port_index = authority_index + (port_text.data() - authority.data());
    for (std::size_t i = 0; i < port_text.size(); ++i) {
      const char c = port_text[i];
      if (c < '0' || c > '9') throw UrlParseError(port_index + i, "illegal character in port");
      port = port * 10 + static_cast<unsigned long>(c - '0');
      if (port > 65535) throw UrlParseError(port_index, "port out of range");
    }
    if (port == 0) throw UrlParseError(port_index, "port out of range");
    url.port = static_cast<std::uint16_t>(port);
  }

  if (host.empty()) throw UrlParseError(authority_index, "empty host");
  bool non_ascii = false;
  if (!host.starts_with("[")) {
    for (std::size_t i = 0; i < host.size(); ++i) {
      const auto c = static_cast<unsigned char>(host[i]);
      if (c >= 0x80) {
        non_ascii = true;
        continue;
      }
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '.' || c == '_';
      if (!ok) throw UrlParseError(authority_index + i, "illegal character in host");
    }
  }
  url.host = non_ascii ? detail::idna_to_ascii(host, authority_index) : text::ascii_lower(host);
  while (!url.host.empty() && url.host.back() == '.') url.host.pop_back();
  if (url.host.empty() || url.host.starts_with(".") || url.host.find("..") != std::string::npos) {
    throw UrlParseError(authority_index, "malformed host");
  }

  std::string_view rest = s.substr(authority_end);
  if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  std::string_view path = rest;
  std::string_view query;
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    path = rest.substr(0, q);
    query = rest.substr(q + 1);
  }
  const std::size_t path_index = offset + authority_end;
  url.path = path.empty() ? "/" : detail::clean_component(path, path_index);
  url.query = detail::clean_component(query, path_index + path.size() + 1);

  const bool ip_literal =
      url.host.starts_with("[") ||
      url.host.find_first_not_of("0123456789.") == std::string::npos;
  url.registrable_domain = ip_literal ? url.host : psl.registrable_domain(url.host);
  return url;
}

// Number of host labels to the left of the registrable domain.
inline int subdomain_count(const NormalizedUrl& url) {
  if (url.host.size() <= url.registrable_domain.size()) return 0;
  const std::string_view prefix(url.host.data(), url.host.size() - url.registrable_domain.size());
  int labels = 0;
  for (char c : prefix) labels += c == '.' ? 1 : 0;
  return labels;
}

// Resolves a Location header value against the URL it was received from.
inline std::string resolve_reference(const NormalizedUrl& base, std::string_view ref) {
  ref = text::trim(ref);
  const std::size_t sep = ref.find("://");
  if (sep != std::string_view::npos) {
    bool scheme = sep > 0;
    for (std::size_t i = 0; scheme && i < sep; ++i) {
      scheme = detail::is_scheme_char(ref[i], i == 0);
    }
    if (scheme) return std::string(ref);
  }
  if (ref.starts_with("//")) return base.scheme + ":" + std::string(ref);

  std::string origin = base.scheme + "://" + base.host;
  if (base.port != NormalizedUrl::default_port(base.scheme)) {
    origin += ":" + std::to_string(base.port);
  }
  if (ref.empty()) return base.str();
  if (ref.starts_with("?")) return origin + base.path + std::string(ref);
  if (ref.starts_with("#")) return base.str();

  std::string merged;
  if (ref.starts_with("/")) {
    merged = std::string(ref);
  } else {
    const std::size_t slash = base.path.rfind('/');
    merged = base.path.substr(0, slash + 1) + std::string(ref);
  }
  // Remove dot segments from the path part.
  std::string tail;
  if (auto q = merged.find_first_of("?#"); q != std::string::npos) {
    tail = merged.substr(q);
    merged.resize(q);
  }
  std::vector<std::string> segments;
  std::size_t start = 1;
  while (start <= merged.size()) {
    std::size_t slash = merged.find('/', start);
    if (slash == std::string::npos) slash = merged.size();
    const std::string segment = merged.substr(start, slash - start);
    if (segment == "..") {
      if (!segments.empty()) segments.pop_back();
      if (slash == merged.size()) segments.emplace_back();
    } else if (segment == ".") {
      if (slash == merged.size()) segments.emplace_back();
    } else {
      segments.push_back(segment);
    }
    start = slash + 1;
  }
  std::string path;
  for (const auto& seg : segments) path += "/" + seg;
  if (path.empty()) path = "/";
  return origin + path + tail;
}

}  // namespace tweetguard
