#pragma once

// Noise-reduction rules applied to token sequences before featurization:
// handle/URL removal, abbreviation expansion, and repetition normalization.
// Rule order is fixed (strip, expand, normalize) so that abbreviation keys
// match raw surfaces and elongation is measured on user-typed text.

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/text.hpp"

namespace cmsent {

/// Ordered abbreviation -> expansion map. Keys are case-insensitive; a later
/// entry for the same key replaces the earlier one.
class AbbrevMap {
 public:
  void add(std::string_view key, std::vector<std::string> expansion) {
    std::string folded = fold_case(key);
    auto it = index_.find(folded);
    if (it != index_.end()) {
      entries_[it->second].second = std::move(expansion);
      return;
    }
    index_.emplace(folded, entries_.size());
    entries_.emplace_back(std::move(folded), std::move(expansion));
  }

  const std::vector<std::string>* find(std::string_view folded_key) const {
    auto it = index_.find(std::string(folded_key));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Loads `abbrev<TAB>expansion words` lines; '#' comment lines and blank
/// lines are skipped.
inline AbbrevMap load_abbrev_map(std::istream& in) {
  AbbrevMap map;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (strip(line).empty() || strip(line).front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw MalformedLexiconLine("expected 'abbrev<TAB>expansion'", line_no);
    }
    const std::string_view key = strip(line.substr(0, tab));
    std::vector<std::string> expansion;
    for (const auto f : split_fields(line.substr(tab + 1))) expansion.emplace_back(f);
    if (key.empty() || expansion.empty()) {
      throw MalformedLexiconLine("empty abbreviation or expansion", line_no);
    }
    map.add(key, std::move(expansion));
  }
  return map;
}

struct PrepConfig {
  bool expand_abbrev = true;
  bool normalize_repetition = true;
  bool strip_handles_urls = true;
  bool strip_hashtags = false;  // hashtags carry content words; kept by default
  int max_run = 2;
};

inline bool is_handle(std::string_view surface) {
  return surface.size() > 1 && surface.front() == '@';
}

inline bool is_hashtag(std::string_view surface) {
  return surface.size() > 1 && surface.front() == '#';
}

inline bool is_url(std::string_view surface) {
  const std::string folded = fold_case(surface);
  return folded.starts_with("http") || folded.starts_with("www.") ||
         folded.find("://") != std::string::npos;
}

/// Removes @handles and URL-looking tokens. A bare '@' or '#' is kept.
inline std::vector<Token> strip_handles_urls(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) {
    if (is_handle(t.surface) || is_url(t.surface)) continue;
    out.push_back(t);
  }
  return out;
}

inline std::vector<Token> strip_hashtags(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) {
    if (is_hashtag(t.surface)) continue;
    out.push_back(t);
  }
  return out;
}

/// Replaces whole tokens whose case-folded surface is a map key by the
/// expansion tokens; expansion tokens inherit the original LangTag.
inline std::vector<Token> expand_abbreviations(const std::vector<Token>& tokens,
                                               const AbbrevMap& map) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) {
    const std::vector<std::string>* expansion = map.find(fold_case(t.surface));
    if (!expansion) {
      out.push_back(t);
      continue;
    }
    for (const std::string& word : *expansion) out.push_back(Token{word, t.lang});
  }
  return out;
}

/// Truncates every maximal run of one repeated character longer than
/// `max_run` to exactly `max_run`. Runs are measured over UTF-8 codepoints,
/// case-sensitively.
inline std::string normalize_repetition(std::string_view surface, int max_run) {
  if (max_run < 1) throw InvalidArgument("max_run must be >= 1");
  std::string out;
  out.reserve(surface.size());
  std::string_view prev;
  int run = 0;
  std::size_t i = 0;
  while (i < surface.size()) {
    const std::size_t len = utf8_unit_len(surface, i);
    const std::string_view unit = surface.substr(i, len);
    run = unit == prev ? run + 1 : 1;
    if (run <= max_run) out.append(unit);
    prev = unit;
    i += len;
  }
  return out;
}

/// True when the surface contains a codepoint run of at least `min_run`.
inline bool has_char_run(std::string_view surface, int min_run) {
  std::string_view prev;
  int run = 0;
  std::size_t i = 0;
  while (i < surface.size()) {
    const std::size_t len = utf8_unit_len(surface, i);
    const std::string_view unit = surface.substr(i, len);
    run = unit == prev ? run + 1 : 1;
    if (run >= min_run) return true;
    prev = unit;
    i += len;
  }
  return false;
}

/// True when the token consists solely of !?.,;:'"()- or the horizontal
/// ellipsis.
inline bool is_punctuation_token(std::string_view surface) {
  if (surface.empty()) return false;
  constexpr std::string_view kAsciiPunct = "!?.,;:'\"()-";
  std::size_t i = 0;
  while (i < surface.size()) {
    const std::size_t len = utf8_unit_len(surface, i);
    const std::string_view unit = surface.substr(i, len);
    if (unit.size() == 1) {
      if (kAsciiPunct.find(unit[0]) == std::string_view::npos) return false;
    } else if (utf8_decode_unit(unit) != 0x2026) {
      return false;
    }
    i += len;
  }
  return true;
}

/// Elongation and punctuation counts over the given (pre-normalization)
/// token sequence.
inline PrepStats measure_prep_stats(const std::vector<Token>& tokens) {
  PrepStats stats;
  for (const Token& t : tokens) {
    if (has_char_run(t.surface, 3)) ++stats.elongation_count;
    if (is_punctuation_token(t.surface)) ++stats.punctuation_count;
  }
  return stats;
}

/// Applies strip, expand, normalize in that order; uid and gold pass through.
/// Elongation/punctuation counts are captured just before normalization and
/// stored on the tweet. Idempotent: a tweet that already carries prep stats
/// keeps them.
inline Tweet preprocess(const Tweet& tweet, const PrepConfig& cfg, const AbbrevMap& map) {
  Tweet out;
  out.uid = tweet.uid;
  out.gold = tweet.gold;

  std::vector<Token> toks = tweet.tokens;
  if (cfg.strip_handles_urls) toks = strip_handles_urls(toks);
  if (cfg.strip_hashtags) toks = strip_hashtags(toks);
  if (cfg.expand_abbrev) toks = expand_abbreviations(toks, map);

  out.prep = tweet.prep ? *tweet.prep : measure_prep_stats(toks);

  if (cfg.normalize_repetition) {
    for (Token& t : toks) t.surface = normalize_repetition(t.surface, cfg.max_run);
  }
  out.tokens = std::move(toks);
  return out;
}

/// Preprocesses every tweet of a dataset.
inline Dataset preprocess(const Dataset& ds, const PrepConfig& cfg, const AbbrevMap& map) {
  Dataset out;
  out.name = ds.name;
  out.tweets.reserve(ds.tweets.size());
  for (const Tweet& t : ds.tweets) out.tweets.push_back(preprocess(t, cfg, map));
  return out;
}

}  // namespace cmsent
