#pragma once

// Featurization: TF-IDF-weighted word n-grams concatenated with a dense
// block of lexicon, emoji, profanity and metadata features. The n-gram block
// is L2-normalized on its own; dense features are min-max scaled to [0, 1]
// using ranges observed on the training data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/lexicons.hpp"
#include "cmsent/text.hpp"
#include "cmsent/textprep.hpp"

namespace cmsent {

/// Indices strictly increasing, each in [0, dim); no explicit zeros stored.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, double>> entries;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct NGramConfig {
  std::vector<int> orders = {1, 2, 3};
  int min_df = 2;
  bool lowercase = true;
};

/// Feature-family toggles; disabling a family removes its columns entirely.
struct FeatureConfig {
  bool ngrams = true;
  bool sentiment = true;
  bool emoji = true;
  bool profanity = true;
  bool metadata = true;
};

namespace detail {

inline std::vector<int> normalized_orders(const NGramConfig& cfg) {
  std::vector<int> orders = cfg.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  while (!orders.empty() && orders.front() < 1) orders.erase(orders.begin());
  return orders;
}

}  // namespace detail

/// Multiset of n-gram terms: for each order n, every contiguous window of n
/// token surfaces (case-folded when cfg.lowercase), joined by single spaces.
inline std::unordered_map<std::string, int> extract_ngrams(const std::vector<Token>& tokens,
                                                           const NGramConfig& cfg) {
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> surfaces;
  surfaces.reserve(tokens.size());
  for (const Token& t : tokens) {
    surfaces.push_back(cfg.lowercase ? fold_case(t.surface) : t.surface);
  }
  for (const int n : detail::normalized_orders(cfg)) {
    if (n < 1 || static_cast<std::size_t>(n) > surfaces.size()) continue;
    for (std::size_t start = 0; start + n <= surfaces.size(); ++start) {
      std::string term = surfaces[start];
      for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k) {
        term += ' ';
        term += surfaces[start + k];
      }
      ++counts[term];
    }
  }
  return counts;
}

/// Names of the dense features enabled by `fc`, in layout order.
inline std::vector<std::string> dense_feature_names(const FeatureConfig& fc) {
  std::vector<std::string> names;
  if (fc.sentiment) {
    names.insert(names.end(), {"sent_pos_count", "sent_neg_count", "sent_compound"});
  }
  if (fc.emoji) {
    names.insert(names.end(), {"emoji_happy_count", "emoji_sad_count", "emoji_neutral_count"});
  }
  if (fc.profanity) {
    names.push_back("profanity_flag");
  }
  if (fc.metadata) {
    names.insert(names.end(), {"punctuation_count", "elongation_count", "token_count",
                               "char_count", "type_token_ratio"});
  }
  return names;
}

/// Emoji occurrences per polarity over all token surfaces. Every emoji
/// codepoint contributes to exactly one counter.
inline void count_emoji(const std::vector<Token>& tokens, const EmojiLexicon& lex, double& happy,
                        double& sad, double& neutral) {
  for (const Token& t : tokens) {
    std::size_t i = 0;
    while (i < t.surface.size()) {
      const std::size_t len = utf8_unit_len(t.surface, i);
      const std::string_view unit = std::string_view(t.surface).substr(i, len);
      if (is_emoji_codepoint(utf8_decode_unit(unit))) {
        switch (lex.polarity(unit)) {
          case EmojiPolarity::happy: ++happy; break;
          case EmojiPolarity::sad: ++sad; break;
          case EmojiPolarity::neutral: ++neutral; break;
        }
      }
      i += len;
    }
  }
}

/// Raw (unscaled) dense feature values of a tweet, aligned with
/// dense_feature_names(fc).
inline std::vector<double> dense_raw_values(const Tweet& t, const FeatureConfig& fc,
                                            const LexiconBundle& lex) {
  std::vector<double> values;
  if (fc.sentiment) {
    const SentimentScores s = score_tokens(t.tokens, lex.valence, lex.negators);
    values.push_back(s.pos_count);
    values.push_back(s.neg_count);
    values.push_back(s.compound);
  }
  if (fc.emoji) {
    double happy = 0, sad = 0, neutral = 0;
    count_emoji(t.tokens, lex.emoji, happy, sad, neutral);
    values.push_back(happy);
    values.push_back(sad);
    values.push_back(neutral);
  }
  if (fc.profanity) {
    values.push_back(profanity_present(t.tokens, lex.profanity) ? 1.0 : 0.0);
  }
  if (fc.metadata) {
    const PrepStats stats = t.prep ? *t.prep : measure_prep_stats(t.tokens);
    values.push_back(stats.punctuation_count);
    values.push_back(stats.elongation_count);
    values.push_back(static_cast<double>(t.tokens.size()));
    std::size_t chars = 0;
    std::unordered_set<std::string_view> distinct;
    for (const Token& tok : t.tokens) {
      chars += utf8_length(tok.surface);
      distinct.insert(tok.surface);
    }
    values.push_back(static_cast<double>(chars));
    values.push_back(t.tokens.empty() ? 0.0
                                      : static_cast<double>(distinct.size()) /
                                            static_cast<double>(t.tokens.size()));
  }
  return values;
}

struct DenseScale {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

/// Frozen vocabulary, IDF weights and dense-feature layout. Immutable once
/// fitted; safe to share across threads.
struct FeatureSpace {
  static constexpr int kLayoutVersion = 1;

  int layout_version = kLayoutVersion;
  NGramConfig ngram_cfg;
  FeatureConfig families;
  PrepConfig prep;  // echoed so evaluation can preprocess the same way
  std::size_t n_train = 0;

  std::vector<std::string> terms;  // lexicographic; column i
  std::vector<double> idf;
  std::unordered_map<std::string, std::size_t> term_index;
  std::vector<DenseScale> dense;  // columns [terms.size(), dim)

  std::size_t dim() const { return terms.size() + dense.size(); }

  std::string fingerprint() const;
};

/// Fits vocabulary (document frequency >= min_df, lexicographic column
/// order), smoothed IDF weights and per-feature min/max dense scales.
/// `train` must already be preprocessed.
inline FeatureSpace fit_feature_space(const Dataset& train, const NGramConfig& ngram_cfg,
                                      const FeatureConfig& families, const LexiconBundle& lex,
                                      const PrepConfig& prep_echo = PrepConfig{}) {
  if (train.tweets.empty()) {
    throw EmptyTrainingSet("cannot fit a feature space on an empty training set");
  }

  FeatureSpace fs;
  fs.ngram_cfg = ngram_cfg;
  fs.ngram_cfg.orders = detail::normalized_orders(ngram_cfg);
  fs.families = families;
  fs.prep = prep_echo;
  fs.n_train = train.tweets.size();

  if (families.ngrams) {
    std::unordered_map<std::string, std::size_t> df;
    for (const Tweet& t : train.tweets) {
      for (const auto& [term, count] : extract_ngrams(t.tokens, fs.ngram_cfg)) {
        (void)count;
        ++df[term];
      }
    }
    for (const auto& [term, freq] : df) {
      if (freq >= static_cast<std::size_t>(std::max(1, ngram_cfg.min_df))) {
        fs.terms.push_back(term);
      }
    }
    std::sort(fs.terms.begin(), fs.terms.end());
    fs.idf.reserve(fs.terms.size());
    const double n = static_cast<double>(fs.n_train);
    for (std::size_t i = 0; i < fs.terms.size(); ++i) {
      const double d = static_cast<double>(df.at(fs.terms[i]));
      fs.idf.push_back(std::log((1.0 + n) / (1.0 + d)) + 1.0);
      fs.term_index.emplace(fs.terms[i], i);
    }
  }

  const std::vector<std::string> names = dense_feature_names(families);
  bool first = true;
  for (const Tweet& t : train.tweets) {
    const std::vector<double> vals = dense_raw_values(t, families, lex);
    if (first) {
      for (std::size_t k = 0; k < names.size(); ++k) {
        fs.dense.push_back(DenseScale{names[k], vals[k], vals[k]});
      }
      first = false;
    } else {
      for (std::size_t k = 0; k < names.size(); ++k) {
        fs.dense[k].min = std::min(fs.dense[k].min, vals[k]);
        fs.dense[k].max = std::max(fs.dense[k].max, vals[k]);
      }
    }
  }
  return fs;
}

/// Featurizes one tweet against a fitted space. The tweet must have been
/// preprocessed with the same configuration used when fitting.
inline SparseVector vectorize(const Tweet& t, const FeatureSpace& fs, const LexiconBundle& lex) {
  if (fs.layout_version != FeatureSpace::kLayoutVersion) {
    throw FeatureSpaceMismatch("feature space layout version " +
                               std::to_string(fs.layout_version) + " is not supported");
  }

  SparseVector x;
  x.dim = fs.dim();

  if (fs.families.ngrams) {
    std::vector<std::pair<std::size_t, double>> block;
    for (const auto& [term, count] : extract_ngrams(t.tokens, fs.ngram_cfg)) {
      auto it = fs.term_index.find(term);
      if (it == fs.term_index.end()) continue;  // out-of-vocabulary terms drop
      block.emplace_back(it->second, static_cast<double>(count) * fs.idf[it->second]);
    }
    std::sort(block.begin(), block.end());
    double norm_sq = 0.0;
    for (const auto& [idx, v] : block) norm_sq += v * v;
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [idx, v] : block) v *= inv;
    }
    x.entries = std::move(block);
  }

  const std::vector<double> vals = dense_raw_values(t, fs.families, lex);
  for (std::size_t k = 0; k < fs.dense.size(); ++k) {
    const DenseScale& sc = fs.dense[k];
    double v = std::clamp(vals[k], sc.min, sc.max);
    const double range = sc.max - sc.min;
    v = range > 0.0 ? (v - sc.min) / range : 0.0;
    if (v != 0.0) x.entries.emplace_back(fs.terms.size() + k, v);
  }
  return x;
}

/// Versioned text serialization; reals carry full precision so the round
/// trip is exact.
inline void save_feature_space(const FeatureSpace& fs, std::ostream& out) {
  out << "cmsent-feature-space v1\n";
  out << "layout " << fs.layout_version << '\n';
  out << "dim " << fs.dim() << '\n';
  out << "term_count " << fs.terms.size() << '\n';
  out << "dense_count " << fs.dense.size() << '\n';
  out << "train_tweets " << fs.n_train << '\n';
  out << "orders ";
  for (std::size_t i = 0; i < fs.ngram_cfg.orders.size(); ++i) {
    if (i) out << ',';
    out << fs.ngram_cfg.orders[i];
  }
  out << '\n';
  out << "min_df " << fs.ngram_cfg.min_df << '\n';
  out << "lowercase " << (fs.ngram_cfg.lowercase ? 1 : 0) << '\n';
  out << "families " << fs.families.ngrams << ' ' << fs.families.sentiment << ' '
      << fs.families.emoji << ' ' << fs.families.profanity << ' ' << fs.families.metadata << '\n';
  out << "prep " << fs.prep.expand_abbrev << ' ' << fs.prep.normalize_repetition << ' '
      << fs.prep.strip_handles_urls << ' ' << fs.prep.strip_hashtags << ' ' << fs.prep.max_run
      << '\n';
  for (std::size_t i = 0; i < fs.terms.size(); ++i) {
    out << fs.terms[i] << '\t' << i << '\t' << format_double(fs.idf[i]) << '\n';
  }
  for (std::size_t k = 0; k < fs.dense.size(); ++k) {
    out << fs.dense[k].name << '\t' << fs.terms.size() + k << '\t' << format_double(fs.dense[k].min)
        << '\t' << format_double(fs.dense[k].max) << '\n';
  }
}

namespace detail {

inline std::string expect_line(std::istream& in, std::size_t& line_no) {
  std::string raw;
  if (!std::getline(in, raw)) {
    throw Error("feature space file truncated at line " + std::to_string(line_no + 1));
  }
  ++line_no;
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  return raw;
}

inline std::string expect_kv(std::istream& in, std::string_view key, std::size_t& line_no) {
  const std::string raw = expect_line(in, line_no);
  const std::string_view line = raw;
  if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
      line[key.size()] != ' ') {
    throw Error("feature space file: expected '" + std::string(key) + "' at line " +
                std::to_string(line_no));
  }
  return std::string(line.substr(key.size() + 1));
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

}  // namespace detail

inline FeatureSpace load_feature_space(std::istream& in) {
  std::size_t line_no = 0;
  const std::string magic = detail::expect_line(in, line_no);
  if (magic != "cmsent-feature-space v1") {
    throw VersionMismatch("unsupported feature space format: '" + magic + "'");
  }

  FeatureSpace fs;
  std::size_t dim = 0, term_count = 0, dense_count = 0;
  int layout = 0;
  if (!parse_int(detail::expect_kv(in, "layout", line_no), layout) ||
      !parse_unsigned(detail::expect_kv(in, "dim", line_no), dim) ||
      !parse_unsigned(detail::expect_kv(in, "term_count", line_no), term_count) ||
      !parse_unsigned(detail::expect_kv(in, "dense_count", line_no), dense_count) ||
      !parse_unsigned(detail::expect_kv(in, "train_tweets", line_no), fs.n_train)) {
    throw Error("feature space file: bad header");
  }
  fs.layout_version = layout;

  fs.ngram_cfg.orders.clear();
  const std::string orders = detail::expect_kv(in, "orders", line_no);
  std::size_t start = 0;
  while (start <= orders.size() && !orders.empty()) {
    const std::size_t comma = orders.find(',', start);
    const std::string_view piece = std::string_view(orders).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    int n = 0;
    if (!parse_int(piece, n)) throw Error("feature space file: bad orders list");
    fs.ngram_cfg.orders.push_back(n);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  if (!parse_int(detail::expect_kv(in, "min_df", line_no), fs.ngram_cfg.min_df)) {
    throw Error("feature space file: bad min_df");
  }
  fs.ngram_cfg.lowercase = detail::expect_kv(in, "lowercase", line_no) == "1";

  const std::string families_line = detail::expect_kv(in, "families", line_no);
  const std::string prep_line = detail::expect_kv(in, "prep", line_no);
  const auto fam = split_fields(families_line);
  const auto prep = split_fields(prep_line);
  if (fam.size() != 5 || prep.size() != 5) throw Error("feature space file: bad config echo");
  fs.families.ngrams = fam[0] == "1";
  fs.families.sentiment = fam[1] == "1";
  fs.families.emoji = fam[2] == "1";
  fs.families.profanity = fam[3] == "1";
  fs.families.metadata = fam[4] == "1";
  fs.prep.expand_abbrev = prep[0] == "1";
  fs.prep.normalize_repetition = prep[1] == "1";
  fs.prep.strip_handles_urls = prep[2] == "1";
  fs.prep.strip_hashtags = prep[3] == "1";
  if (!parse_int(prep[4], fs.prep.max_run)) throw Error("feature space file: bad max_run");

  fs.terms.reserve(term_count);
  fs.idf.reserve(term_count);
  for (std::size_t i = 0; i < term_count; ++i) {
    const std::string raw = detail::expect_line(in, line_no);
    const auto parts = detail::split_tabs(raw);
    std::size_t idx = 0;
    double idf = 0.0;
    if (parts.size() != 3 || !parse_unsigned(parts[1], idx) || idx != i ||
        !parse_double(parts[2], idf)) {
      throw Error("feature space file: bad term line " + std::to_string(line_no));
    }
    fs.terms.emplace_back(parts[0]);
    fs.idf.push_back(idf);
    fs.term_index.emplace(fs.terms.back(), i);
  }
  for (std::size_t k = 0; k < dense_count; ++k) {
    const std::string raw = detail::expect_line(in, line_no);
    const auto parts = detail::split_tabs(raw);
    std::size_t idx = 0;
    DenseScale sc;
    if (parts.size() != 4 || !parse_unsigned(parts[1], idx) || idx != term_count + k ||
        !parse_double(parts[2], sc.min) || !parse_double(parts[3], sc.max)) {
      throw Error("feature space file: bad dense line " + std::to_string(line_no));
    }
    sc.name = std::string(parts[0]);
    fs.dense.push_back(std::move(sc));
  }
  if (fs.dim() != dim) throw Error("feature space file: dim mismatch");
  return fs;
}

inline std::string FeatureSpace::fingerprint() const {
  std::ostringstream os;
  save_feature_space(*this, os);
  return to_hex(fnv1a64(os.str()));
}

}  // namespace cmsent
