#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace poiconf {

inline constexpr char32_t kReplacementChar = 0xFFFD;

/// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to
/// U+FFFD, one replacement per bad byte; the sources are crowd-sourced and
/// refusal would reject whole rows over one stray byte.
inline std::u32string utf8_decode(std::string_view in) {
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    if (i + len > in.size()) {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMinByLen[len] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void utf8_append(std::string& out, char32_t cp) {
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

inline std::string utf8_encode(std::u32string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char32_t cp : in) utf8_append(out, cp);
  return out;
}

/// Simple one-to-one lowercase fold covering the bicameral ranges that occur
/// in place names: ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
/// Unmapped scalars pass through unchanged.
inline char32_t fold_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 32;  // À..Þ except ×
  if (c == 0x0130) return U'i';                  // İ
  if (c == 0x0178) return 0xFF;                  // Ÿ -> ÿ
  if (c >= 0x0100 && c <= 0x0137) return (c & 1) ? c : c + 1;
  if (c >= 0x0139 && c <= 0x0148) return (c & 1) ? c + 1 : c;
  if (c >= 0x014A && c <= 0x0177) return (c & 1) ? c : c + 1;
  if (c == 0x0179 || c == 0x017B || c == 0x017D) return c + 1;
  if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 32;  // Α..Ω
  if (c >= 0x0410 && c <= 0x042F) return c + 32;                 // А..Я
  if (c >= 0x0400 && c <= 0x040F) return c + 80;                 // Ѐ..Џ
  return c;
}

inline bool is_unicode_space(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

}  // namespace poiconf
