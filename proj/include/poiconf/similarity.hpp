#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "poiconf/error.hpp"
#include "poiconf/unicode.hpp"

namespace poiconf {

/// A name-similarity value; always in [0, 1].
class SimilarityScore {
 public:
  explicit SimilarityScore(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw RangeError("similarity score out of [0, 1]: " +
                       std::to_string(value));
    }
  }

  double value() const { return value_; }

  friend bool operator==(const SimilarityScore&,
                         const SimilarityScore&) = default;

 private:
  double value_;
};

/// Canonical comparison form of a name: lowercase fold, trim, and collapse
/// of internal whitespace runs to single spaces.
inline std::string normalize_name(std::string_view raw) {
  const std::u32string in = utf8_decode(raw);
  std::u32string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t c : in) {
    if (is_unicode_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(fold_lower(c));
  }
  return utf8_encode(out);
}

namespace detail {

// A word character for trigram purposes: ASCII alphanumeric, or any
// non-space scalar beyond ASCII (accented letters, CJK, ...).
inline bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') ||
           (c >= U'A' && c <= U'Z');
  }
  return !is_unicode_space(c);
}

struct Trigram {
  char32_t a, b, c;
  friend auto operator<=>(const Trigram&, const Trigram&) = default;
};

// Trigrams of one word padded with two leading and one trailing space.
inline void word_trigrams(std::u32string_view word, std::set<Trigram>& out) {
  std::u32string padded;
  padded.reserve(word.size() + 3);
  padded += U"  ";
  padded += word;
  padded += U' ';
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    out.insert(Trigram{padded[i], padded[i + 1], padded[i + 2]});
  }
}

inline std::set<Trigram> trigrams_of(std::u32string_view text) {
  std::set<Trigram> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_char(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && is_word_char(text[i])) ++i;
    if (i > start) word_trigrams(text.substr(start, i - start), out);
  }
  return out;
}

}  // namespace detail

/// De-duplicated padded trigrams of an already-normalized string, encoded
/// back to UTF-8 (each element is three scalars). Words are split on
/// non-alphanumeric characters.
inline std::set<std::string> trigram_set(std::string_view normalized) {
  std::set<std::string> out;
  for (const auto& t : detail::trigrams_of(utf8_decode(normalized))) {
    std::string s;
    utf8_append(s, t.a);
    utf8_append(s, t.b);
    utf8_append(s, t.c);
    out.insert(std::move(s));
  }
  return out;
}

/// Trigram-set intersection over union on the normalized forms of two raw
/// names. Both sets empty compares equal (1.0); exactly one empty is 0.0.
inline SimilarityScore trigram_similarity(std::string_view a,
                                          std::string_view b) {
  const auto ta = detail::trigrams_of(utf8_decode(normalize_name(a)));
  const auto tb = detail::trigrams_of(utf8_decode(normalize_name(b)));
  if (ta.empty() && tb.empty()) return SimilarityScore(1.0);
  if (ta.empty() || tb.empty()) return SimilarityScore(0.0);
  std::size_t common = 0;
  auto it = ta.begin();
  auto jt = tb.begin();
  while (it != ta.end() && jt != tb.end()) {
    if (*it < *jt) {
      ++it;
    } else if (*jt < *it) {
      ++jt;
    } else {
      ++common;
      ++it;
      ++jt;
    }
  }
  const std::size_t unions = ta.size() + tb.size() - common;
  return SimilarityScore(static_cast<double>(common) /
                         static_cast<double>(unions));
}

namespace detail {

// Two-row dynamic program; unit cost for insert, delete and substitute.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  // Strip the common prefix and suffix first.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a.remove_prefix(1);
    b.remove_prefix(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a.remove_suffix(1);
    b.remove_suffix(1);
  }
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  if (a.size() < b.size()) std::swap(a, b);

  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({subst, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace detail

/// Edit distance between the normalized forms of two raw names, measured in
/// Unicode scalar values.
inline std::size_t levenshtein_distance(std::string_view a,
                                        std::string_view b) {
  return detail::edit_distance(utf8_decode(normalize_name(a)),
                               utf8_decode(normalize_name(b)));
}

/// 1 - d / max(len) over the normalized forms; 1.0 when both normalize to
/// empty. The max-length denominator keeps the score exactly 1 on equality.
inline SimilarityScore levenshtein_similarity(std::string_view a,
                                              std::string_view b) {
  const std::u32string na = utf8_decode(normalize_name(a));
  const std::u32string nb = utf8_decode(normalize_name(b));
  const std::size_t longest = std::max(na.size(), nb.size());
  if (longest == 0) return SimilarityScore(1.0);
  const std::size_t d = detail::edit_distance(na, nb);
  return SimilarityScore(1.0 -
                         static_cast<double>(d) / static_cast<double>(longest));
}

}  // namespace poiconf
