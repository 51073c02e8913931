#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "cmsent/evaltune.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cmsent;
using oracles::brute_force_metrics;
using OracleMetrics = oracles::BruteForceMetrics;

namespace {

const Sentiment kPos = Sentiment::positive;
const Sentiment kNeg = Sentiment::negative;
const Sentiment kNeu = Sentiment::neutral;

}  // namespace

TEST_CASE("perfect prediction scores weighted F1 of 1", "[evaltune]") {
  const std::vector<Sentiment> gold = {kPos, kNeg, kNeu, kPos};
  const Metrics m = compute_metrics(gold, gold);
  CHECK(m.weighted_f1 == 1.0);
  CHECK(m.accuracy == 1.0);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (c != k) CHECK(m.confusion[c][k] == 0);
    }
  }
}

TEST_CASE("rotated predictions score zero", "[evaltune]") {
  const std::vector<Sentiment> gold = {kNeg, kNeu, kPos};
  const std::vector<Sentiment> pred = {kNeu, kPos, kNeg};
  const Metrics m = compute_metrics(gold, pred);
  CHECK(m.weighted_f1 == 0.0);
  CHECK(m.accuracy == 0.0);
}

TEST_CASE("hand-computed weighted F1 example equals 0.75", "[evaltune][oracle]") {
  const std::vector<Sentiment> gold = {kPos, kPos, kNeg, kNeu};
  const std::vector<Sentiment> pred = {kPos, kNeg, kNeg, kNeu};
  const Metrics m = compute_metrics(gold, pred);
  CHECK_THAT(m.weighted_f1, Catch::Matchers::WithinAbs(0.75, 1e-15));
  CHECK_THAT(m.f1[static_cast<std::size_t>(kPos)],
             Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(m.f1[static_cast<std::size_t>(kNeg)],
             Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(m.f1[static_cast<std::size_t>(kNeu)] == 1.0);

  const OracleMetrics om = brute_force_metrics(gold, pred);
  CHECK(m.weighted_f1 == om.weighted_f1);
}

TEST_CASE("compute_metrics validates its inputs", "[evaltune]") {
  CHECK_THROWS_AS(compute_metrics({kPos}, {kPos, kNeg}), LengthMismatch);
  CHECK_THROWS_AS(compute_metrics({}, {}), EmptyInput);
}

TEST_CASE("compute_metrics matches the brute-force oracle exactly", "[evaltune][oracle]") {
  std::mt19937 rng(123456);
  std::uniform_int_distribution<int> len_dist(1, 50), cls_dist(0, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len_dist(rng);
    std::vector<Sentiment> gold, pred;
    for (int i = 0; i < n; ++i) {
      gold.push_back(static_cast<Sentiment>(cls_dist(rng)));
      pred.push_back(static_cast<Sentiment>(cls_dist(rng)));
    }
    const Metrics m = compute_metrics(gold, pred);
    const OracleMetrics om = brute_force_metrics(gold, pred);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(m.precision[c] == om.precision[c]);
      CHECK(m.recall[c] == om.recall[c]);
      CHECK(m.f1[c] == om.f1[c]);
      CHECK(m.support[c] == om.support[c]);
    }
    CHECK(m.weighted_f1 == om.weighted_f1);
    CHECK(m.accuracy == om.accuracy);

    // accuracy equals trace(confusion) / N.
    std::size_t trace = 0;
    std::size_t total = 0;
    for (std::size_t g = 0; g < 3; ++g) {
      trace += m.confusion[g][g];
      for (std::size_t p = 0; p < 3; ++p) total += m.confusion[g][p];
    }
    CHECK(total == gold.size());
    CHECK(m.accuracy == double(trace) / double(gold.size()));
  }
}

TEST_CASE("weighted F1 is invariant under pair permutation", "[evaltune][property]") {
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> cls_dist(0, 2);
  std::vector<Sentiment> gold, pred;
  for (int i = 0; i < 40; ++i) {
    gold.push_back(static_cast<Sentiment>(cls_dist(rng)));
    pred.push_back(static_cast<Sentiment>(cls_dist(rng)));
  }
  const double base = compute_metrics(gold, pred).weighted_f1;
  std::vector<std::size_t> order(gold.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int round = 0; round < 20; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Sentiment> g2, p2;
    for (const std::size_t i : order) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    CHECK(compute_metrics(g2, p2).weighted_f1 == base);
  }
}

namespace {

struct GridFixture {
  Dataset train_set, val_set;
  FeatureSpace fs;

  GridFixture() {
    const auto& lex = testutil::bundled_lexicons();
    const Dataset all = preprocess(testutil::make_synthetic(120, 31), PrepConfig{},
                                   testutil::bundled_abbrevs());
    train_set.name = "train";
    val_set.name = "val";
    for (std::size_t i = 0; i < all.tweets.size(); ++i) {
      (i % 3 == 0 ? val_set : train_set).tweets.push_back(all.tweets[i]);
    }
    NGramConfig cfg;
    cfg.min_df = 1;
    fs = fit_feature_space(train_set, cfg, FeatureConfig{}, lex);
  }
};

}  // namespace

TEST_CASE("grid_search selects the argmax with smallest-C tie-break", "[evaltune]") {
  const GridFixture fx;
  const auto& lex = testutil::bundled_lexicons();

  SECTION("singleton grid") {
    const GridResult r = grid_search(fx.train_set, fx.val_set, fx.fs, {1.0}, lex);
    REQUIRE(r.points.size() == 1);
    CHECK(r.best_C == 1.0);
    CHECK(r.best_f1 == r.points[0].f1);
  }
  SECTION("best point is the max of measured scores; permutation returns the same best_C") {
    const std::vector<double> grid = {0.01, 0.5, 1.0, 5.0};
    const GridResult r = grid_search(fx.train_set, fx.val_set, fx.fs, grid, lex);
    REQUIRE(r.points.size() == grid.size());
    double best = -1.0;
    for (const GridPoint& p : r.points) best = std::max(best, p.f1);
    CHECK(r.best_f1 == best);

    std::vector<double> permuted = {5.0, 0.5, 0.01, 1.0};
    const GridResult r2 = grid_search(fx.train_set, fx.val_set, fx.fs, permuted, lex);
    CHECK(r2.best_C == r.best_C);
    CHECK(r2.best_f1 == r.best_f1);
  }
  SECTION("invalid grids are rejected") {
    CHECK_THROWS_AS(grid_search(fx.train_set, fx.val_set, fx.fs, {}, lex), InvalidArgument);
    CHECK_THROWS_AS(grid_search(fx.train_set, fx.val_set, fx.fs, {0.5, -1.0}, lex),
                    InvalidArgument);
  }
}

TEST_CASE("default grid is 0.01..10.00 step 0.01", "[evaltune]") {
  const std::vector<double> grid = default_grid();
  REQUIRE(grid.size() == 1000);
  CHECK(grid.front() == 0.01);
  CHECK(grid.back() == 10.0);
  CHECK_THAT(grid[89], Catch::Matchers::WithinAbs(0.9, 1e-12));
}

TEST_CASE("grid_search annotates training errors with the offending C", "[evaltune]") {
  const auto& lex = testutil::bundled_lexicons();
  // Single-class corpus: every C fails with DegenerateLabels.
  Dataset degenerate;
  degenerate.name = "deg";
  for (int i = 0; i < 4; ++i) {
    Tweet t;
    t.uid = "d" + std::to_string(i);
    t.gold = Sentiment::positive;
    t.tokens = {testutil::tok("fine")};
    degenerate.tweets.push_back(std::move(t));
  }
  NGramConfig cfg;
  cfg.min_df = 1;
  const FeatureSpace fs = fit_feature_space(degenerate, cfg, FeatureConfig{}, lex);
  try {
    grid_search(degenerate, degenerate, fs, {0.5}, lex);
    FAIL("expected DegenerateLabels");
  } catch (const DegenerateLabels& e) {
    CHECK(std::string(e.what()).find("C=0.5") != std::string::npos);
  }
}

namespace {

struct ReportFixture {
  Dataset ds;
  FeatureSpace fs;
  LRModel model;

  ReportFixture() {
    const auto& lex = testutil::bundled_lexicons();
    ds = preprocess(testutil::make_synthetic(90, 17), PrepConfig{}, testutil::bundled_abbrevs());
    NGramConfig cfg;
    cfg.min_df = 1;
    fs = fit_feature_space(ds, cfg, FeatureConfig{}, lex);
    std::vector<SparseVector> X;
    std::vector<Sentiment> y;
    for (const Tweet& t : ds.tweets) {
      X.push_back(vectorize(t, fs, lex));
      y.push_back(*t.gold);
    }
    model = train(X, y, TrainConfig{});
    model.space_fingerprint = fs.fingerprint();
  }
};

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("error_report on a perfectly classified dataset has zero rows", "[evaltune]") {
  const ReportFixture fx;
  const auto& lex = testutil::bundled_lexicons();
  // The synthetic corpus is linearly separable; training-set predictions are
  // perfect, which is exactly the zero-row case.
  std::ostringstream out;
  error_report(fx.model, fx.ds, fx.fs, 10, lex, out);
  const std::string text = out.str();
  CHECK(count_lines_starting(text, "uid=") == 0);
  CHECK(text.find("confusion matrix") != std::string::npos);
}

TEST_CASE("error_report respects k and reports mismatches", "[evaltune]") {
  const ReportFixture fx;
  const auto& lex = testutil::bundled_lexicons();

  // Evaluate a fresh sample from the same generator family but a different
  // seed; some tweets will be misclassified.
  const Dataset other = preprocess(testutil::make_synthetic(90, 911, "other"), PrepConfig{},
                                   testutil::bundled_abbrevs());

  std::ostringstream full;
  error_report(fx.model, other, fx.fs, other.tweets.size(), lex, full);
  const std::size_t all_rows = count_lines_starting(full.str(), "uid=");

  std::ostringstream capped;
  error_report(fx.model, other, fx.fs, 2, lex, capped);
  const std::size_t capped_rows = count_lines_starting(capped.str(), "uid=");
  CHECK(capped_rows == std::min<std::size_t>(2, all_rows));

  std::ostringstream none;
  error_report(fx.model, other, fx.fs, 0, lex, none);
  CHECK(count_lines_starting(none.str(), "uid=") == 0);
  CHECK(none.str().find("confusion matrix") != std::string::npos);

  // Machine block mirrors the shown rows.
  CHECK(count_lines_starting(capped.str(), "uid,gold,pred") == 1);
}

TEST_CASE("error_report with exactly one misclassified tweet has exactly one row", "[evaltune]") {
  const ReportFixture fx;
  const auto& lex = testutil::bundled_lexicons();
  // Training-set predictions are perfect; flipping one gold label forces
  // exactly one disagreement.
  Dataset flipped = fx.ds;
  flipped.tweets[0].gold = flipped.tweets[0].gold == Sentiment::positive ? Sentiment::negative
                                                                         : Sentiment::positive;
  std::ostringstream out;
  error_report(fx.model, flipped, fx.fs, 10, lex, out);
  CHECK(count_lines_starting(out.str(), "uid=") == 1);
  CHECK(out.str().find("uid=" + flipped.tweets[0].uid + " ") != std::string::npos);
}

TEST_CASE("error_report rows always disagree with gold", "[evaltune]") {
  const ReportFixture fx;
  const auto& lex = testutil::bundled_lexicons();
  const Dataset other = preprocess(testutil::make_synthetic(60, 313, "other"), PrepConfig{},
                                   testutil::bundled_abbrevs());
  std::ostringstream out;
  error_report(fx.model, other, fx.fs, 100, lex, out);
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("uid=", 0) != 0) continue;
    const auto gold_pos = line.find("gold=");
    const auto pred_pos = line.find("pred=");
    REQUIRE(gold_pos != std::string::npos);
    REQUIRE(pred_pos != std::string::npos);
    const std::string gold = line.substr(gold_pos + 5, line.find(' ', gold_pos) - gold_pos - 5);
    const std::string pred = line.substr(pred_pos + 5, line.find(' ', pred_pos) - pred_pos - 5);
    CHECK(gold != pred);
  }
}
