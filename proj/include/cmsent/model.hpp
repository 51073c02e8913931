#pragma once

// L2-regularized logistic regression trained from scratch, one binary
// problem per class (one-vs-rest). The objective follows the C-times-loss
// convention:
//
//   J(w, b) = 0.5 * w.w + C * sum_i ln(1 + exp(-y_i (w.x_i + b)))
//
// with the bias unregularized. Optimization is deterministic full-batch
// gradient descent with Armijo backtracking line search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cmsent/corpus.hpp"
#include "cmsent/errors.hpp"
#include "cmsent/features.hpp"
#include "cmsent/text.hpp"

namespace cmsent {

struct TrainConfig {
  double C = 0.9;
  int max_iters = 1000;
  double grad_tol = 1e-5;
  double init_value = 0.0;  // constant start for weights and bias
  std::uint64_t seed = 0;   // reserved; the optimizer is deterministic
};

/// Stable ln(1 + exp(z)).
inline double log1p_exp(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

/// Stable logistic function.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double sparse_dot(const std::vector<double>& w, const SparseVector& x) {
  double acc = 0.0;
  for (const auto& [idx, v] : x.entries) acc += w[idx] * v;
  return acc;
}

namespace detail {

inline void check_problem(const std::vector<double>& w, const std::vector<SparseVector>& X,
                          std::size_t n_labels) {
  if (X.empty()) throw EmptyInput("no training samples");
  if (X.size() != n_labels) {
    throw LengthMismatch("sample/label count mismatch: " + std::to_string(X.size()) + " vs " +
                         std::to_string(n_labels));
  }
  for (const SparseVector& x : X) {
    if (x.dim != w.size()) {
      throw DimensionMismatch("vector dim " + std::to_string(x.dim) + " does not match weight dim " +
                              std::to_string(w.size()));
    }
  }
}

}  // namespace detail

/// Binary objective value; `y` entries are +1 or -1.
inline double objective(const std::vector<double>& w, double b, const std::vector<SparseVector>& X,
                        const std::vector<int>& y, double C) {
  detail::check_problem(w, X, y.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double margin = sparse_dot(w, X[i]) + b;
    loss += log1p_exp(-static_cast<double>(y[i]) * margin);
  }
  double reg = 0.0;
  for (const double wi : w) reg += wi * wi;
  return 0.5 * reg + C * loss;
}

struct GradientValue {
  std::vector<double> w;
  double b = 0.0;
};

/// Analytic gradient of the objective; the bias term carries no
/// regularization.
inline GradientValue gradient(const std::vector<double>& w, double b,
                              const std::vector<SparseVector>& X, const std::vector<int>& y,
                              double C) {
  detail::check_problem(w, X, y.size());
  GradientValue g;
  g.w = w;  // regularizer contribution
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double yd = static_cast<double>(y[i]);
    const double margin = sparse_dot(w, X[i]) + b;
    const double alpha = C * (-yd) * sigmoid(-yd * margin);
    for (const auto& [idx, v] : X[i].entries) g.w[idx] += alpha * v;
    g.b += alpha;
  }
  return g;
}

/// Per-class decision values and independent per-binary-problem logistic
/// probabilities.
struct ScoreVector {
  std::vector<Sentiment> classes;
  std::vector<double> decision;
  std::vector<double> probability;
};

/// One-vs-rest model bound to a feature space by fingerprint.
struct LRModel {
  std::vector<Sentiment> classes;  // canonical order
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  TrainConfig config;
  std::size_t dim = 0;
  std::size_t trained_on = 0;
  std::string space_fingerprint;
};

/// Objective value after every accepted optimizer step, one series per
/// binary problem. Entry 0 is the objective at the starting point.
struct TrainTrace {
  std::vector<std::vector<double>> objectives;
};

namespace detail {

struct BinaryFit {
  std::vector<double> w;
  double b = 0.0;
};

inline BinaryFit fit_binary(const std::vector<SparseVector>& X, const std::vector<int>& y,
                            std::size_t dim, const TrainConfig& cfg,
                            std::vector<double>* trace) {
  constexpr double kArmijoC1 = 1e-4;
  constexpr double kMinStep = 1e-20;

  BinaryFit fit;
  fit.w.assign(dim, cfg.init_value);
  fit.b = cfg.init_value;

  const std::size_t n = X.size();
  std::vector<double> margins(n);
  for (std::size_t i = 0; i < n; ++i) margins[i] = sparse_dot(fit.w, X[i]) + fit.b;
  double ww = 0.0;
  for (const double wi : fit.w) ww += wi * wi;

  std::vector<double> g(dim), dm(n);
  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    // Gradient and objective from the cached margins.
    std::copy(fit.w.begin(), fit.w.end(), g.begin());
    double gb = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yd = static_cast<double>(y[i]);
      const double z = -yd * margins[i];
      loss += log1p_exp(z);
      const double alpha = cfg.C * (-yd) * sigmoid(z);
      for (const auto& [idx, v] : X[i].entries) g[idx] += alpha * v;
      gb += alpha;
    }
    const double J = 0.5 * ww + cfg.C * loss;
    if (trace) trace->push_back(J);

    double g_inf = std::abs(gb);
    for (const double gi : g) g_inf = std::max(g_inf, std::abs(gi));
    if (g_inf < cfg.grad_tol || iter == cfg.max_iters) break;

    // Descent direction d = -g; directional pieces for cheap trial steps.
    double gg = gb * gb;
    double wd = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      gg += g[j] * g[j];
      wd -= fit.w[j] * g[j];
    }
    for (std::size_t i = 0; i < n; ++i) dm[i] = -(sparse_dot(g, X[i]) + gb);
    const double gd = -gg;  // g . d
    const double dd = gg;   // d . d

    double t = 1.0;
    bool accepted = false;
    while (t >= kMinStep) {
      double trial_loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trial_loss += log1p_exp(-static_cast<double>(y[i]) * (margins[i] + t * dm[i]));
      }
      const double trial_J = 0.5 * (ww + 2.0 * t * wd + t * t * dd) + cfg.C * trial_loss;
      if (trial_J <= J + kArmijoC1 * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no progress possible at double precision

    for (std::size_t j = 0; j < dim; ++j) fit.w[j] -= t * g[j];
    fit.b -= t * gb;
    for (std::size_t i = 0; i < n; ++i) margins[i] += t * dm[i];
    ww = ww + 2.0 * t * wd + t * t * dd;
  }
  return fit;
}

}  // namespace detail

/// Trains one binary problem per class present in `labels` (canonical
/// order). Deterministic: identical inputs produce bit-identical models.
inline LRModel train(const std::vector<SparseVector>& X, const std::vector<Sentiment>& labels,
                     const TrainConfig& cfg, TrainTrace* trace = nullptr) {
  if (X.size() != labels.size()) {
    throw LengthMismatch("sample/label count mismatch: " + std::to_string(X.size()) + " vs " +
                         std::to_string(labels.size()));
  }
  if (!(cfg.C > 0.0)) throw InvalidArgument("TrainConfig.C must be positive");
  if (!(cfg.grad_tol > 0.0)) throw InvalidArgument("TrainConfig.grad_tol must be positive");
  if (cfg.max_iters < 0) throw InvalidArgument("TrainConfig.max_iters must be non-negative");
  bool present[3] = {false, false, false};
  for (const Sentiment s : labels) present[static_cast<std::size_t>(s)] = true;

  LRModel m;
  for (const Sentiment s : kAllSentiments) {
    if (present[static_cast<std::size_t>(s)]) m.classes.push_back(s);
  }
  if (m.classes.size() < 2) {
    throw DegenerateLabels("training data has " + std::to_string(m.classes.size()) +
                           " distinct class(es); need at least 2");
  }

  m.dim = X.front().dim;
  for (const SparseVector& x : X) {
    if (x.dim != m.dim) {
      throw DimensionMismatch("inconsistent vector dims: " + std::to_string(x.dim) + " vs " +
                              std::to_string(m.dim));
    }
  }
  m.config = cfg;
  m.trained_on = X.size();

  std::vector<int> y(X.size());
  for (const Sentiment c : m.classes) {
    for (std::size_t i = 0; i < X.size(); ++i) y[i] = labels[i] == c ? 1 : -1;
    if (trace) trace->objectives.emplace_back();
    const detail::BinaryFit fit =
        detail::fit_binary(X, y, m.dim, cfg, trace ? &trace->objectives.back() : nullptr);
    m.weights.push_back(std::move(fit.w));
    m.bias.push_back(fit.b);
  }
  return m;
}

inline ScoreVector score(const LRModel& m, const SparseVector& x) {
  if (x.dim != m.dim) {
    throw DimensionMismatch("vector dim " + std::to_string(x.dim) + " does not match model dim " +
                            std::to_string(m.dim));
  }
  ScoreVector sv;
  sv.classes = m.classes;
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    const double d = sparse_dot(m.weights[c], x) + m.bias[c];
    sv.decision.push_back(d);
    sv.probability.push_back(sigmoid(d));
  }
  return sv;
}

/// Maximal decision value wins; ties break to the canonically smallest class.
inline Sentiment predict(const LRModel& m, const SparseVector& x) {
  const ScoreVector sv = score(m, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < sv.decision.size(); ++c) {
    if (sv.decision[c] > sv.decision[best]) best = c;
  }
  return sv.classes[best];
}

/// Versioned text format with a trailing integrity checksum. The round trip
/// is bit-exact.
inline void save_model(const LRModel& m, std::ostream& out) {
  std::ostringstream body;
  body << "cmsent-model v1\n";
  body << "classes";
  for (const Sentiment c : m.classes) body << ' ' << to_string(c);
  body << '\n';
  body << "dim " << m.dim << '\n';
  body << "trained_on " << m.trained_on << '\n';
  body << "C " << format_double(m.config.C) << '\n';
  body << "max_iters " << m.config.max_iters << '\n';
  body << "grad_tol " << format_double(m.config.grad_tol) << '\n';
  body << "init_value " << format_double(m.config.init_value) << '\n';
  body << "seed " << m.config.seed << '\n';
  body << "space_fingerprint " << (m.space_fingerprint.empty() ? "-" : m.space_fingerprint)
       << '\n';
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    body << "class " << to_string(m.classes[c]) << '\n';
    body << "bias " << format_double(m.bias[c]) << '\n';
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < m.weights[c].size(); ++j) {
      if (m.weights[c][j] != 0.0) nz.push_back(j);
    }
    body << "w " << nz.size() << '\n';
    for (std::size_t k = 0; k < nz.size(); ++k) {
      body << nz[k] << ':' << format_double(m.weights[c][nz[k]]);
      body << ((k + 1) % 8 == 0 || k + 1 == nz.size() ? '\n' : ' ');
    }
  }
  const std::string text = body.str();
  out << text << "checksum " << to_hex(fnv1a64(text)) << '\n';
}

namespace detail {

inline std::string model_line(std::istream& in, std::size_t& line_no) {
  std::string raw;
  if (!std::getline(in, raw)) {
    throw CorruptModel("model file truncated at line " + std::to_string(line_no + 1));
  }
  ++line_no;
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  return raw;
}

inline std::string model_kv(std::istream& in, std::string_view key, std::size_t& line_no) {
  const std::string raw = model_line(in, line_no);
  const std::string_view line = raw;
  if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
      line[key.size()] != ' ') {
    throw CorruptModel("model file: expected '" + std::string(key) + "' at line " +
                       std::to_string(line_no));
  }
  return std::string(line.substr(key.size() + 1));
}

}  // namespace detail

inline LRModel load_model(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  // Verify the trailing checksum before parsing anything.
  const std::string_view cv = content;
  std::size_t line_start = std::string_view::npos;
  if (cv.size() > 1 && cv.back() == '\n') {
    line_start = cv.rfind('\n', cv.size() - 2);
    line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
  }
  if (line_start == std::string_view::npos) throw CorruptModel("model file has no checksum line");
  const std::string_view last = cv.substr(line_start, cv.size() - line_start - 1);
  if (!last.starts_with("checksum ")) throw CorruptModel("model file has no checksum line");
  const std::string_view stored = last.substr(9);
  const std::string_view body = cv.substr(0, line_start);
  if (std::string_view(to_hex(fnv1a64(body))) != stored) {
    throw CorruptModel("model file checksum mismatch");
  }

  std::istringstream is{std::string(body)};
  std::size_t line_no = 0;
  const std::string magic = detail::model_line(is, line_no);
  if (magic != "cmsent-model v1") {
    throw VersionMismatch("unsupported model format: '" + magic + "'");
  }

  LRModel m;
  const std::string classes_line = detail::model_kv(is, "classes", line_no);
  for (const auto f : split_fields(classes_line)) {
    const auto s = sentiment_from_string(f);
    if (!s) throw CorruptModel("model file: unknown class '" + std::string(f) + "'");
    m.classes.push_back(*s);
  }
  if (!parse_unsigned(detail::model_kv(is, "dim", line_no), m.dim) ||
      !parse_unsigned(detail::model_kv(is, "trained_on", line_no), m.trained_on) ||
      !parse_double(detail::model_kv(is, "C", line_no), m.config.C) ||
      !parse_int(detail::model_kv(is, "max_iters", line_no), m.config.max_iters) ||
      !parse_double(detail::model_kv(is, "grad_tol", line_no), m.config.grad_tol) ||
      !parse_double(detail::model_kv(is, "init_value", line_no), m.config.init_value)) {
    throw CorruptModel("model file: bad header");
  }
  std::size_t seed = 0;
  if (!parse_unsigned(detail::model_kv(is, "seed", line_no), seed)) {
    throw CorruptModel("model file: bad seed");
  }
  m.config.seed = seed;
  m.space_fingerprint = detail::model_kv(is, "space_fingerprint", line_no);
  if (m.space_fingerprint == "-") m.space_fingerprint.clear();

  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    const std::string cls = detail::model_kv(is, "class", line_no);
    if (cls != to_string(m.classes[c])) {
      throw CorruptModel("model file: class blocks out of order");
    }
    double bias = 0.0;
    if (!parse_double(detail::model_kv(is, "bias", line_no), bias)) {
      throw CorruptModel("model file: bad bias");
    }
    std::size_t count = 0;
    if (!parse_unsigned(detail::model_kv(is, "w", line_no), count)) {
      throw CorruptModel("model file: bad weight count");
    }
    std::vector<double> w(m.dim, 0.0);
    std::size_t seen = 0;
    while (seen < count) {
      const std::string raw = detail::model_line(is, line_no);
      for (const auto field : split_fields(raw)) {
        const std::size_t colon = field.find(':');
        std::size_t idx = 0;
        double v = 0.0;
        if (colon == std::string_view::npos || !parse_unsigned(field.substr(0, colon), idx) ||
            !parse_double(field.substr(colon + 1), v) || idx >= m.dim) {
          throw CorruptModel("model file: bad weight entry at line " + std::to_string(line_no));
        }
        w[idx] = v;
        ++seen;
      }
    }
    if (seen != count) throw CorruptModel("model file: weight count mismatch");
    m.weights.push_back(std::move(w));
    m.bias.push_back(bias);
  }
  return m;
}

/// Guards prediction against featurizing with the wrong space.
inline void require_space_match(const LRModel& m, const FeatureSpace& fs) {
  if (m.dim != fs.dim()) {
    throw FeatureSpaceMismatch("model dim " + std::to_string(m.dim) +
                               " does not match feature space dim " + std::to_string(fs.dim()));
  }
  if (!m.space_fingerprint.empty() && m.space_fingerprint != fs.fingerprint()) {
    throw FeatureSpaceMismatch("model was trained against a different feature space");
  }
}

}  // namespace cmsent
