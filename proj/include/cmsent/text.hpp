#pragma once

// String and UTF-8 helpers shared across the library. Tweets arrive as raw
// UTF-8 and may contain arbitrary byte junk, so everything here is tolerant:
// an invalid byte is treated as its own one-byte unit and passed through
// verbatim.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace cmsent {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

inline std::string_view rstrip(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string_view lstrip(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  return s;
}

inline std::string_view strip(std::string_view s) { return lstrip(rstrip(s)); }

/// Whitespace-separated fields of `s`.
inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ascii_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_ascii_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline bool iequals_ascii(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

/// Byte length of the UTF-8 unit starting at `i`: a well-formed codepoint
/// sequence, or 1 for a stray/invalid byte.
inline std::size_t utf8_unit_len(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  if (b0 < 0x80) return 1;
  else if ((b0 & 0xE0) == 0xC0) len = 2;
  else if ((b0 & 0xF0) == 0xE0) len = 3;
  else if ((b0 & 0xF8) == 0xF0) len = 4;
  else return 1;  // continuation or invalid lead byte on its own
  if (i + len > s.size()) return 1;
  for (std::size_t k = 1; k < len; ++k) {
    if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 1;
  }
  return len;
}

/// Decodes one unit as produced by utf8_unit_len. Invalid units map to U+FFFD.
inline char32_t utf8_decode_unit(std::string_view unit) {
  const auto b0 = static_cast<unsigned char>(unit[0]);
  if (b0 < 0x80) return b0;
  if (unit.size() == 2 && (b0 & 0xE0) == 0xC0) {
    return ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(unit[1]) & 0x3Fu);
  }
  if (unit.size() == 3 && (b0 & 0xF0) == 0xE0) {
    return ((b0 & 0x0Fu) << 12) | ((static_cast<unsigned char>(unit[1]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(unit[2]) & 0x3Fu);
  }
  if (unit.size() == 4 && (b0 & 0xF8) == 0xF0) {
    return ((b0 & 0x07u) << 18) | ((static_cast<unsigned char>(unit[1]) & 0x3Fu) << 12) |
           ((static_cast<unsigned char>(unit[2]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(unit[3]) & 0x3Fu);
  }
  return 0xFFFD;
}

/// Splits `s` into UTF-8 units (codepoints, or single invalid bytes).
inline std::vector<std::string_view> utf8_units(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t len = utf8_unit_len(s, i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

/// Number of UTF-8 units in `s`.
inline std::size_t utf8_length(std::string_view s) {
  std::size_t i = 0, n = 0;
  while (i < s.size()) {
    i += utf8_unit_len(s, i);
    ++n;
  }
  return n;
}

inline void utf8_encode(char32_t cp, std::string& out) {
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

/// Lowercases ASCII letters and the Latin-1 supplement range; everything else
/// passes through untouched. Deterministic and locale-free.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t len = utf8_unit_len(s, i);
    const std::string_view unit = s.substr(i, len);
    const char32_t cp = utf8_decode_unit(unit);
    if (cp >= 'A' && cp <= 'Z') {
      out.push_back(static_cast<char>(cp - 'A' + 'a'));
    } else if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) {
      utf8_encode(cp + 0x20, out);
    } else {
      out.append(unit);
    }
    i += len;
  }
  return out;
}

/// Full-precision textual form of a double; survives a write/parse round trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Strict, locale-independent double parse; the whole field must be numeric.
inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

inline bool parse_unsigned(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

/// FNV-1a 64-bit, used for file checksums and feature-space fingerprints.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace cmsent
