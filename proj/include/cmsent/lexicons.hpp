#pragma once

// The three lexicon resources: a valence lexicon with a rule-based scorer,
// an emoji polarity lexicon, and a profanity word list. Lexicons are
// immutable after load; all scoring functions are pure.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/text.hpp"

namespace cmsent {

namespace detail {

// Iterates data lines of a TSV-ish lexicon file: strips CR, skips blank and
// '#' comment lines, reports 1-based line numbers.
template <typename Fn>
void for_each_data_line(std::istream& in, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view body = strip(line);
    if (body.empty() || body.front() == '#') continue;
    fn(line_no, line);
  }
}

}  // namespace detail

/// token -> valence in [-4, +4]; lookup is case-insensitive.
class ValenceLexicon {
 public:
  void add(std::string_view token, double valence) { table_[fold_case(token)] = valence; }

  /// 0.0 for unknown tokens.
  double valence(std::string_view folded_token) const {
    auto it = table_.find(std::string(folded_token));
    return it == table_.end() ? 0.0 : it->second;
  }

  bool contains(std::string_view folded_token) const {
    return table_.count(std::string(folded_token)) > 0;
  }

  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

 private:
  std::unordered_map<std::string, double> table_;
};

/// Loads `token<TAB>valence` lines; duplicates take the last value.
inline ValenceLexicon load_valence_lexicon(std::istream& in) {
  ValenceLexicon lex;
  detail::for_each_data_line(in, [&](std::size_t line_no, std::string_view line) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw MalformedLexiconLine("expected 'token<TAB>valence'", line_no);
    }
    const std::string_view token = strip(line.substr(0, tab));
    const std::string_view value = strip(line.substr(tab + 1));
    double v = 0.0;
    if (token.empty() || !parse_double(value, v)) {
      throw MalformedLexiconLine("non-numeric valence '" + std::string(value) + "'", line_no);
    }
    if (v < -4.0 || v > 4.0) {
      throw OutOfRangeValence("valence " + std::string(value) + " outside [-4, 4]", line_no);
    }
    lex.add(token, v);
  });
  return lex;
}

struct SentimentScores {
  int pos_count = 0;
  int neg_count = 0;
  double sum_valence = 0.0;
  double compound = 0.0;  // sum_valence / sqrt(sum_valence^2 + 15)

  friend bool operator==(const SentimentScores&, const SentimentScores&) = default;
};

/// Bounded normalization of a summed valence into (-1, +1).
inline double compound_score(double sum_valence) {
  return sum_valence / std::sqrt(sum_valence * sum_valence + 15.0);
}

inline const std::unordered_set<std::string>& default_negators() {
  static const std::unordered_set<std::string> kNegators = {
      "not", "no", "never", "n't", "cannot", "won't", "don't", "didn't", "isn't", "ain't"};
  return kNegators;
}

// Damping factor applied to a valence within reach of a preceding negator.
inline constexpr double kNegationScalar = -0.74;
// How many preceding participating tokens a negator can reach.
inline constexpr int kNegationWindow = 3;

/// Scores the English-tagged tokens of a tweet. A token's valence is flipped
/// and damped when any of the three preceding participating tokens is a
/// negator.
inline SentimentScores score_tokens(const std::vector<Token>& tokens, const ValenceLexicon& lex,
                                    const std::unordered_set<std::string>& negators) {
  SentimentScores scores;
  std::vector<std::string> history;  // folded surfaces of participating tokens
  for (const Token& t : tokens) {
    if (t.lang.kind != LangTag::Kind::Eng) continue;
    const std::string folded = fold_case(t.surface);

    double v = lex.valence(folded);
    const std::size_t n = history.size();
    const std::size_t window = n < kNegationWindow ? n : kNegationWindow;
    for (std::size_t k = 1; k <= window; ++k) {
      if (negators.count(history[n - k]) > 0) {
        v *= kNegationScalar;
        break;
      }
    }

    if (v > 0.0) ++scores.pos_count;
    if (v < 0.0) ++scores.neg_count;
    scores.sum_valence += v;
    history.push_back(folded);
  }
  scores.compound = compound_score(scores.sum_valence);
  return scores;
}

enum class EmojiPolarity { happy, sad, neutral };

inline std::string_view to_string(EmojiPolarity p) {
  switch (p) {
    case EmojiPolarity::happy: return "happy";
    case EmojiPolarity::sad: return "sad";
    case EmojiPolarity::neutral: return "neutral";
  }
  return "?";
}

/// emoji codepoint sequence -> polarity; unmapped emoji are neutral.
class EmojiLexicon {
 public:
  void add(std::string_view emoji, EmojiPolarity p) { table_[std::string(emoji)] = p; }

  EmojiPolarity polarity(std::string_view grapheme) const {
    auto it = table_.find(std::string(grapheme));
    return it == table_.end() ? EmojiPolarity::neutral : it->second;
  }

  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

 private:
  std::unordered_map<std::string, EmojiPolarity> table_;
};

/// Loads `emoji<TAB>happy|sad|neutral` lines.
inline EmojiLexicon load_emoji_lexicon(std::istream& in) {
  EmojiLexicon lex;
  detail::for_each_data_line(in, [&](std::size_t line_no, std::string_view line) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw MalformedLexiconLine("expected 'emoji<TAB>polarity'", line_no);
    }
    const std::string_view emoji = line.substr(0, tab);
    const std::string_view word = strip(line.substr(tab + 1));
    EmojiPolarity p;
    if (word == "happy") {
      p = EmojiPolarity::happy;
    } else if (word == "sad") {
      p = EmojiPolarity::sad;
    } else if (word == "neutral") {
      p = EmojiPolarity::neutral;
    } else {
      throw MalformedLexiconLine("unknown polarity '" + std::string(word) + "'", line_no);
    }
    if (emoji.empty()) throw MalformedLexiconLine("empty emoji field", line_no);
    lex.add(emoji, p);
  });
  return lex;
}

/// Total function: table lookup with neutral as the default.
inline EmojiPolarity emoji_polarity(std::string_view grapheme, const EmojiLexicon& lex) {
  return lex.polarity(grapheme);
}

/// Set of case-folded profane words.
class ProfanitySet {
 public:
  void add(std::string_view word) { words_.insert(fold_case(word)); }
  bool contains(std::string_view folded_word) const {
    return words_.count(std::string(folded_word)) > 0;
  }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Loads a one-word-per-line list.
inline ProfanitySet load_profanity(std::istream& in) {
  ProfanitySet set;
  detail::for_each_data_line(in, [&](std::size_t, std::string_view line) {
    const std::string_view word = strip(line);
    set.add(word);
  });
  return set;
}

/// True iff any token's case-folded surface is in the set.
inline bool profanity_present(const std::vector<Token>& tokens, const ProfanitySet& set) {
  for (const Token& t : tokens) {
    if (set.contains(fold_case(t.surface))) return true;
  }
  return false;
}

/// Codepoint ranges treated as emoji when scanning token surfaces.
inline bool is_emoji_codepoint(char32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1F5FF) ||  // symbols and pictographs
         (cp >= 0x1F600 && cp <= 0x1F64F) ||  // emoticons
         (cp >= 0x1F680 && cp <= 0x1F6FF) ||  // transport and map
         (cp >= 0x1F900 && cp <= 0x1F9FF) ||  // supplemental pictographs
         (cp >= 0x1FA70 && cp <= 0x1FAFF) ||
         (cp >= 0x2600 && cp <= 0x26FF) ||    // miscellaneous symbols
         (cp >= 0x2700 && cp <= 0x27BF) ||    // dingbats
         (cp >= 0x2B00 && cp <= 0x2BFF) ||
         (cp >= 0x1F1E6 && cp <= 0x1F1FF) ||  // regional indicators
         (cp >= 0x1F000 && cp <= 0x1F0FF);
}

/// All lexicon resources needed to featurize a tweet.
struct LexiconBundle {
  ValenceLexicon valence;
  std::unordered_set<std::string> negators = default_negators();
  EmojiLexicon emoji;
  ProfanitySet profanity;
};

namespace detail {

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Loads valence.tsv, emoji.tsv and profanity.txt from a directory.
inline LexiconBundle load_lexicon_dir(const std::string& dir) {
  LexiconBundle bundle;
  auto v = detail::open_or_throw(dir + "/valence.tsv");
  bundle.valence = load_valence_lexicon(v);
  auto e = detail::open_or_throw(dir + "/emoji.tsv");
  bundle.emoji = load_emoji_lexicon(e);
  auto p = detail::open_or_throw(dir + "/profanity.txt");
  bundle.profanity = load_profanity(p);
  return bundle;
}

}  // namespace cmsent
