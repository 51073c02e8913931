#pragma once

// Data model and parser for the CONLL-style tweet files. One tweet per
// blank-line-separated block; the first line of a block is a header
// `meta <uid> [<sentiment>]`, every following line is `surface <tag>` split
// on the last run of horizontal whitespace.

#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cmsent/errors.hpp"
#include "cmsent/text.hpp"

namespace cmsent {

// Canonical ordering is alphabetical: negative < neutral < positive. All
// tie-breaking and reporting relies on this order.
enum class Sentiment { negative = 0, neutral = 1, positive = 2 };

inline constexpr std::array<Sentiment, 3> kAllSentiments = {
    Sentiment::negative, Sentiment::neutral, Sentiment::positive};

inline std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::negative: return "negative";
    case Sentiment::neutral: return "neutral";
    case Sentiment::positive: return "positive";
  }
  return "?";
}

inline std::optional<Sentiment> sentiment_from_string(std::string_view s) {
  if (iequals_ascii(s, "negative")) return Sentiment::negative;
  if (iequals_ascii(s, "neutral")) return Sentiment::neutral;
  if (iequals_ascii(s, "positive")) return Sentiment::positive;
  return std::nullopt;
}

/// Word-level language tag. Unknown tag strings are preserved verbatim.
struct LangTag {
  enum class Kind { Eng, Hin, Es, Mixed, Univ, NE, O, Other };

  Kind kind = Kind::O;
  std::string other;  // original text, set only when kind == Other

  static LangTag from_string(std::string_view s) {
    if (s == "Eng") return {Kind::Eng, {}};
    if (s == "Hin") return {Kind::Hin, {}};
    if (s == "Es") return {Kind::Es, {}};
    if (s == "mixed") return {Kind::Mixed, {}};
    if (s == "univ") return {Kind::Univ, {}};
    if (s == "NE") return {Kind::NE, {}};
    if (s == "O") return {Kind::O, {}};
    return {Kind::Other, std::string(s)};
  }

  std::string_view str() const {
    switch (kind) {
      case Kind::Eng: return "Eng";
      case Kind::Hin: return "Hin";
      case Kind::Es: return "Es";
      case Kind::Mixed: return "mixed";
      case Kind::Univ: return "univ";
      case Kind::NE: return "NE";
      case Kind::O: return "O";
      case Kind::Other: return other;
    }
    return other;
  }

  friend bool operator==(const LangTag&, const LangTag&) = default;
};

struct Token {
  std::string surface;  // original form, case preserved, never empty
  LangTag lang;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Counts captured by preprocessing before repetition normalization runs;
/// consumed by the metadata features.
struct PrepStats {
  int elongation_count = 0;   // tokens that contained a character run >= 3
  int punctuation_count = 0;  // tokens made solely of punctuation characters

  friend bool operator==(const PrepStats&, const PrepStats&) = default;
};

struct Tweet {
  std::string uid;
  std::vector<Token> tokens;
  std::optional<Sentiment> gold;
  std::optional<PrepStats> prep;  // derived; set once preprocess() has run

  // Equality is over content; prep is derived metadata.
  friend bool operator==(const Tweet& a, const Tweet& b) {
    return a.uid == b.uid && a.tokens == b.tokens && a.gold == b.gold;
  }
};

struct Dataset {
  std::string name;
  std::vector<Tweet> tweets;  // iteration order equals file order
};

struct DatasetStats {
  std::array<std::size_t, 3> class_counts{};  // canonical sentiment order
  std::size_t labeled = 0;                    // tweets carrying a gold label
  std::size_t tweet_count = 0;
  std::size_t token_count = 0;

  // Exact rational token_count / tweet_count; display to one decimal.
  double mean_tokens() const {
    return tweet_count == 0 ? 0.0
                            : static_cast<double>(token_count) / static_cast<double>(tweet_count);
  }
};

namespace detail {

inline bool is_blank(std::string_view line) {
  return strip(line).empty();
}

}  // namespace detail

/// Parses a stream of blank-line-separated tweet blocks. Tolerates CRLF and a
/// leading UTF-8 BOM. Throws MalformedHeader, MalformedTokenLine,
/// DuplicateUid or EmptyTweet with 1-based line numbers.
inline Dataset parse_conll(std::istream& in, std::string name = "") {
  Dataset ds;
  ds.name = std::move(name);

  std::unordered_set<std::string> seen_uids;
  std::optional<Tweet> current;
  std::size_t header_line = 0;

  auto finish_block = [&]() {
    if (!current) return;
    if (current->tokens.empty()) {
      throw EmptyTweet("tweet '" + current->uid + "' has no token lines", header_line);
    }
    ds.tweets.push_back(std::move(*current));
    current.reset();
  };

  std::string raw;
  std::size_t line_no = 0;
  bool first_line = true;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (first_line) {
      first_line = false;
      if (line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    }

    if (detail::is_blank(line)) {
      finish_block();
      continue;
    }

    if (!current) {
      // Header: meta <uid> [<sentiment>], `meta` case-insensitive.
      const auto fields = split_fields(line);
      if (fields.size() < 2 || fields.size() > 3 || !iequals_ascii(fields[0], "meta")) {
        throw MalformedHeader("expected 'meta <uid> [<sentiment>]'", line_no);
      }
      Tweet t;
      t.uid = std::string(fields[1]);
      if (fields.size() == 3) {
        const auto s = sentiment_from_string(fields[2]);
        if (!s) {
          throw MalformedHeader("unknown sentiment '" + std::string(fields[2]) + "'", line_no);
        }
        t.gold = *s;
      }
      if (!seen_uids.insert(t.uid).second) {
        throw DuplicateUid("duplicate uid '" + t.uid + "'", line_no);
      }
      current = std::move(t);
      header_line = line_no;
      continue;
    }

    // Token line: split on the last run of horizontal whitespace.
    const std::string_view body = rstrip(line);
    std::size_t tag_start = body.size();
    while (tag_start > 0 && !is_ascii_space(body[tag_start - 1])) --tag_start;
    if (tag_start == 0) {
      throw MalformedTokenLine("token line has no whitespace separator", line_no);
    }
    std::size_t surf_end = tag_start;
    while (surf_end > 0 && is_ascii_space(body[surf_end - 1])) --surf_end;

    const std::string_view surface = body.substr(0, surf_end);
    const std::string_view tag = body.substr(tag_start);
    if (surface.empty()) {
      throw MalformedTokenLine("token line has an empty surface", line_no);
    }
    for (const char c : surface) {
      if (is_ascii_space(c)) {
        throw MalformedTokenLine("token surface contains whitespace", line_no);
      }
    }
    current->tokens.push_back(Token{std::string(surface), LangTag::from_string(tag)});
  }
  finish_block();
  return ds;
}

/// Opens `path` and parses it; the dataset name defaults to the file stem.
inline Dataset parse_conll_file(const std::string& path, std::string name = "") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  if (name.empty()) {
    std::size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    name = dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
  }
  return parse_conll(in, std::move(name));
}

/// Writes the block format back out: header, one `surface<TAB>tag` line per
/// token, blank line after each block. Reparsing yields an identical Dataset.
inline void serialize_conll(const Dataset& ds, std::ostream& out) {
  for (const Tweet& t : ds.tweets) {
    out << "meta " << t.uid;
    if (t.gold) out << ' ' << to_string(*t.gold);
    out << '\n';
    for (const Token& tok : t.tokens) {
      out << tok.surface << '\t' << tok.lang.str() << '\n';
    }
    out << '\n';
  }
}

inline DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats st;
  st.tweet_count = ds.tweets.size();
  for (const Tweet& t : ds.tweets) {
    st.token_count += t.tokens.size();
    if (t.gold) {
      ++st.class_counts[static_cast<std::size_t>(*t.gold)];
      ++st.labeled;
    }
  }
  return st;
}

}  // namespace cmsent
