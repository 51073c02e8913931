#pragma once

// Weighted-F1 evaluation, C grid search against a validation split, and the
// misclassification report.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/features.hpp"
#include "cmsent/lexicons.hpp"
#include "cmsent/model.hpp"

namespace cmsent {

struct Metrics {
  std::array<double, 3> precision{};
  std::array<double, 3> recall{};
  std::array<double, 3> f1{};
  std::array<std::size_t, 3> support{};
  // rows = gold, cols = predicted, canonical class order
  std::array<std::array<std::size_t, 3>, 3> confusion{};
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
};

/// Per-class precision/recall/F1 with the zero-denominator convention
/// (precision, recall and F1 are 0 when their denominator is 0) and
/// support-weighted F1.
inline Metrics compute_metrics(const std::vector<Sentiment>& gold,
                               const std::vector<Sentiment>& pred) {
  if (gold.size() != pred.size()) {
    throw LengthMismatch("gold/pred length mismatch: " + std::to_string(gold.size()) + " vs " +
                         std::to_string(pred.size()));
  }
  if (gold.empty()) throw EmptyInput("cannot compute metrics on zero pairs");

  Metrics m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++m.confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])];
  }
  const double n = static_cast<double>(gold.size());
  std::size_t diag = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t tp = m.confusion[c][c];
    std::size_t fp = 0, fn = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k == c) continue;
      fp += m.confusion[k][c];
      fn += m.confusion[c][k];
    }
    m.support[c] = tp + fn;
    m.precision[c] = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall[c] = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1[c] = m.precision[c] + m.recall[c] == 0.0
                  ? 0.0
                  : 2.0 * m.precision[c] * m.recall[c] / (m.precision[c] + m.recall[c]);
    m.weighted_f1 += static_cast<double>(m.support[c]) / n * m.f1[c];
    diag += tp;
  }
  m.accuracy = static_cast<double>(diag) / n;
  return m;
}

struct GridPoint {
  double C = 0.0;
  double f1 = 0.0;
};

struct GridResult {
  std::vector<GridPoint> points;  // in grid order
  double best_C = 0.0;
  double best_f1 = 0.0;
};

/// The default C grid: 0.01, 0.02, ..., 10.00.
inline std::vector<double> default_grid() {
  std::vector<double> grid;
  grid.reserve(1000);
  for (int i = 1; i <= 1000; ++i) grid.push_back(static_cast<double>(i) / 100.0);
  return grid;
}

namespace detail {

inline void split_labeled(const Dataset& ds, const FeatureSpace& fs, const LexiconBundle& lex,
                          std::vector<SparseVector>& X, std::vector<Sentiment>& y) {
  for (const Tweet& t : ds.tweets) {
    if (!t.gold) continue;
    X.push_back(vectorize(t, fs, lex));
    y.push_back(*t.gold);
  }
}

}  // namespace detail

/// Trains one model per grid C on the training set, scores weighted F1 on
/// the validation set, and selects the argmax; ties resolve to the smallest
/// C. Both datasets must be preprocessed and labeled.
inline GridResult grid_search(const Dataset& train_set, const Dataset& val_set,
                              const FeatureSpace& fs, const std::vector<double>& grid,
                              const LexiconBundle& lex,
                              const TrainConfig& base_cfg = TrainConfig{}) {
  if (grid.empty()) throw InvalidArgument("grid is empty");
  for (const double c : grid) {
    if (!(c > 0.0)) throw InvalidArgument("grid C values must be positive");
  }

  std::vector<SparseVector> train_x, val_x;
  std::vector<Sentiment> train_y, val_y;
  detail::split_labeled(train_set, fs, lex, train_x, train_y);
  detail::split_labeled(val_set, fs, lex, val_x, val_y);
  if (train_x.empty()) throw EmptyInput("no labeled training tweets");
  if (val_x.empty()) throw EmptyInput("no labeled validation tweets");

  GridResult result;
  result.best_f1 = -1.0;
  for (const double c : grid) {
    TrainConfig cfg = base_cfg;
    cfg.C = c;
    LRModel model;
    try {
      model = train(train_x, train_y, cfg);
    } catch (const DegenerateLabels& e) {
      throw DegenerateLabels("C=" + format_double(c) + ": " + e.what());
    } catch (const DimensionMismatch& e) {
      throw DimensionMismatch("C=" + format_double(c) + ": " + e.what());
    }
    std::vector<Sentiment> pred;
    pred.reserve(val_x.size());
    for (const SparseVector& x : val_x) pred.push_back(predict(model, x));
    const double f1 = compute_metrics(val_y, pred).weighted_f1;
    result.points.push_back(GridPoint{c, f1});
    if (f1 > result.best_f1 || (f1 == result.best_f1 && c < result.best_C)) {
      result.best_f1 = f1;
      result.best_C = c;
    }
  }
  return result;
}

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace detail

/// Aligned per-class table plus machine-readable `key=value` lines.
inline void write_metrics(const Metrics& m, std::ostream& out) {
  char buf[128];
  out << "class      precision  recall      f1     support\n";
  for (std::size_t c = 0; c < 3; ++c) {
    std::snprintf(buf, sizeof(buf), "%-10s  %8.4f %7.4f %7.4f  %10zu\n",
                  std::string(to_string(kAllSentiments[c])).c_str(), m.precision[c], m.recall[c],
                  m.f1[c], m.support[c]);
    out << buf;
  }
  out << "\nconfusion matrix (rows = gold, cols = predicted)\n";
  out << "            negative   neutral  positive\n";
  for (std::size_t g = 0; g < 3; ++g) {
    std::snprintf(buf, sizeof(buf), "%-10s  %8zu  %8zu  %8zu\n",
                  std::string(to_string(kAllSentiments[g])).c_str(), m.confusion[g][0],
                  m.confusion[g][1], m.confusion[g][2]);
    out << buf;
  }
  out << '\n';
  out << "weighted_f1=" << detail::fixed4(m.weighted_f1) << '\n';
  out << "accuracy=" << detail::fixed4(m.accuracy) << '\n';
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string name{to_string(kAllSentiments[c])};
    out << "precision." << name << '=' << detail::fixed4(m.precision[c]) << '\n';
    out << "recall." << name << '=' << detail::fixed4(m.recall[c]) << '\n';
    out << "f1." << name << '=' << detail::fixed4(m.f1[c]) << '\n';
    out << "support." << name << '=' << m.support[c] << '\n';
  }
}

/// Writes up to `k` misclassified tweets (text, gold, prediction, per-class
/// probabilities, top contributing features of the predicted class) plus the
/// full confusion matrix and a machine-readable block.
inline void error_report(const LRModel& m, const Dataset& ds, const FeatureSpace& fs,
                         std::size_t k, const LexiconBundle& lex, std::ostream& out) {
  struct Row {
    const Tweet* tweet;
    Sentiment pred;
    std::array<double, 3> prob{};
    SparseVector x;
  };

  std::vector<Sentiment> gold, pred;
  std::vector<Row> rows;
  std::size_t total_errors = 0;
  for (const Tweet& t : ds.tweets) {
    if (!t.gold) continue;
    SparseVector x = vectorize(t, fs, lex);
    const ScoreVector sv = score(m, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < sv.decision.size(); ++c) {
      if (sv.decision[c] > sv.decision[best]) best = c;
    }
    const Sentiment p = sv.classes[best];
    gold.push_back(*t.gold);
    pred.push_back(p);
    if (p != *t.gold) {
      ++total_errors;
      if (rows.size() < k) {
        Row row;
        row.tweet = &t;
        row.pred = p;
        for (std::size_t c = 0; c < sv.classes.size(); ++c) {
          row.prob[static_cast<std::size_t>(sv.classes[c])] = sv.probability[c];
        }
        row.x = std::move(x);
        rows.push_back(std::move(row));
      }
    }
  }
  if (gold.empty()) throw EmptyInput("error report needs gold labels");

  const Metrics metrics = compute_metrics(gold, pred);

  out << "# error report: " << ds.name << '\n';
  out << "# misclassified: " << total_errors << " of " << gold.size() << ", showing "
      << rows.size() << '\n';
  out << '\n';
  write_metrics(metrics, out);
  out << '\n';

  const std::size_t pred_class_count = m.classes.size();
  for (const Row& row : rows) {
    out << "uid=" << row.tweet->uid << " gold=" << to_string(*row.tweet->gold)
        << " pred=" << to_string(row.pred);
    out << " p_neg=" << detail::fixed4(row.prob[0]) << " p_neu=" << detail::fixed4(row.prob[1])
        << " p_pos=" << detail::fixed4(row.prob[2]) << '\n';
    out << "  text:";
    for (const Token& t : row.tweet->tokens) out << ' ' << t.surface;
    out << '\n';

    // Top contributors by |weight * value| for the predicted class.
    std::size_t pred_idx = 0;
    for (std::size_t c = 0; c < pred_class_count; ++c) {
      if (m.classes[c] == row.pred) pred_idx = c;
    }
    std::vector<std::pair<double, std::size_t>> contrib;
    for (const auto& [idx, v] : row.x.entries) {
      const double w = m.weights[pred_idx][idx] * v;
      if (w != 0.0) contrib.emplace_back(w, idx);
    }
    std::sort(contrib.begin(), contrib.end(), [](const auto& a, const auto& b) {
      const double aa = std::abs(a.first), bb = std::abs(b.first);
      if (aa != bb) return aa > bb;
      return a.second < b.second;
    });
    out << "  top features:";
    const std::size_t top = std::min<std::size_t>(5, contrib.size());
    for (std::size_t i = 0; i < top; ++i) {
      const auto [w, idx] = contrib[i];
      const std::string& name =
          idx < fs.terms.size() ? fs.terms[idx] : fs.dense[idx - fs.terms.size()].name;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%+.4f", w);
      out << (i ? ", " : " ") << name << '(' << buf << ')';
    }
    out << "\n\n";
  }

  out << "uid,gold,pred,p_neg,p_neu,p_pos\n";
  for (const Row& row : rows) {
    out << row.tweet->uid << ',' << to_string(*row.tweet->gold) << ',' << to_string(row.pred)
        << ',' << detail::fixed4(row.prob[0]) << ',' << detail::fixed4(row.prob[1]) << ','
        << detail::fixed4(row.prob[2]) << '\n';
  }
}

}  // namespace cmsent
