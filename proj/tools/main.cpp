// Command-line front end: stats, train, grid, eval, predict.
//
// Exit codes: 0 success, 2 input/parse error, 3 training error,
// 4 usage/contract error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmsent/cmsent.hpp"

namespace {

struct Options {
  std::string train_path, val_path, test_path;
  std::string model_path, space_path;
  std::string lexicon_dir = "data";
  std::string valence_path, emoji_path, profanity_path, abbrev_path;
  std::string report_path, out_path = "-";
  std::size_t report_k = 10;
  bool merge_val = false;

  double grid_start = 0.01, grid_stop = 10.0, grid_step = 0.01;

  bool no_ngrams = false, no_sentiment = false, no_emoji = false;
  bool no_profanity = false, no_metadata = false;

  bool no_expand_abbrev = false, no_normalize_repetition = false;
  bool no_strip_handles_urls = false, strip_hashtags = false;
  int max_run = 2;

  std::string orders = "1,2,3";
  int min_df = 2;
  bool no_lowercase = false;

  double C = 0.9;
  int max_iters = 1000;
  double grad_tol = 1e-5;
};

std::string resolve(const std::string& explicit_path, const std::string& dir,
                    const std::string& filename) {
  return explicit_path.empty() ? dir + "/" + filename : explicit_path;
}

void require_paths(const std::vector<std::string>& paths) {
  for (const std::string& p : paths) {
    if (!std::filesystem::exists(p)) {
      throw cmsent::IoError("input path does not exist: '" + p + "'");
    }
  }
}

cmsent::PrepConfig prep_config(const Options& o) {
  cmsent::PrepConfig cfg;
  cfg.expand_abbrev = !o.no_expand_abbrev;
  cfg.normalize_repetition = !o.no_normalize_repetition;
  cfg.strip_handles_urls = !o.no_strip_handles_urls;
  cfg.strip_hashtags = o.strip_hashtags;
  cfg.max_run = o.max_run;
  return cfg;
}

cmsent::NGramConfig ngram_config(const Options& o) {
  cmsent::NGramConfig cfg;
  cfg.orders.clear();
  std::size_t start = 0;
  while (start <= o.orders.size() && !o.orders.empty()) {
    const std::size_t comma = o.orders.find(',', start);
    const std::string piece =
        o.orders.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    int n = 0;
    if (!cmsent::parse_int(piece, n) || n < 1) {
      throw cmsent::InvalidArgument("bad --ngram-orders value: '" + o.orders + "'");
    }
    cfg.orders.push_back(n);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  cfg.min_df = o.min_df;
  cfg.lowercase = !o.no_lowercase;
  return cfg;
}

cmsent::FeatureConfig feature_config(const Options& o) {
  cmsent::FeatureConfig cfg;
  cfg.ngrams = !o.no_ngrams;
  cfg.sentiment = !o.no_sentiment;
  cfg.emoji = !o.no_emoji;
  cfg.profanity = !o.no_profanity;
  cfg.metadata = !o.no_metadata;
  return cfg;
}

cmsent::TrainConfig train_config(const Options& o) {
  cmsent::TrainConfig cfg;
  cfg.C = o.C;
  cfg.max_iters = o.max_iters;
  cfg.grad_tol = o.grad_tol;
  return cfg;
}

struct LexiconPaths {
  std::string valence, emoji, profanity, abbrev;
};

LexiconPaths lexicon_paths(const Options& o) {
  return LexiconPaths{resolve(o.valence_path, o.lexicon_dir, "valence.tsv"),
                      resolve(o.emoji_path, o.lexicon_dir, "emoji.tsv"),
                      resolve(o.profanity_path, o.lexicon_dir, "profanity.txt"),
                      resolve(o.abbrev_path, o.lexicon_dir, "abbreviations.tsv")};
}

cmsent::LexiconBundle load_lexicons(const LexiconPaths& p) {
  cmsent::LexiconBundle bundle;
  {
    std::ifstream in(p.valence, std::ios::binary);
    if (!in) throw cmsent::IoError("cannot open '" + p.valence + "'");
    bundle.valence = cmsent::load_valence_lexicon(in);
  }
  {
    std::ifstream in(p.emoji, std::ios::binary);
    if (!in) throw cmsent::IoError("cannot open '" + p.emoji + "'");
    bundle.emoji = cmsent::load_emoji_lexicon(in);
  }
  {
    std::ifstream in(p.profanity, std::ios::binary);
    if (!in) throw cmsent::IoError("cannot open '" + p.profanity + "'");
    bundle.profanity = cmsent::load_profanity(in);
  }
  return bundle;
}

cmsent::AbbrevMap load_abbrevs(const LexiconPaths& p) {
  std::ifstream in(p.abbrev, std::ios::binary);
  if (!in) throw cmsent::IoError("cannot open '" + p.abbrev + "'");
  return cmsent::load_abbrev_map(in);
}

// Resolved settings echoed at the top of command output for provenance.
void echo_config(std::ostream& out, const std::string& command, const Options& o,
                 const LexiconPaths& lp) {
  out << "# cmsent " << command << '\n';
  auto kv = [&](const std::string& k, const std::string& v) {
    if (!v.empty()) out << "# " << k << '=' << v << '\n';
  };
  kv("train", o.train_path);
  kv("val", o.val_path);
  kv("test", o.test_path);
  kv("model", o.model_path);
  kv("space", o.space_path);
  kv("valence_lexicon", lp.valence);
  kv("emoji_lexicon", lp.emoji);
  kv("profanity_list", lp.profanity);
  kv("abbrev_map", lp.abbrev);
  if (command == "train" || command == "grid") {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "C=%g max_iters=%d grad_tol=%g", o.C, o.max_iters,
                  o.grad_tol);
    out << "# " << buf << '\n';
    out << "# ngram_orders=" << o.orders << " min_df=" << o.min_df
        << " lowercase=" << (o.no_lowercase ? 0 : 1) << '\n';
    out << "# families ngrams=" << (o.no_ngrams ? 0 : 1)
        << " sentiment=" << (o.no_sentiment ? 0 : 1) << " emoji=" << (o.no_emoji ? 0 : 1)
        << " profanity=" << (o.no_profanity ? 0 : 1) << " metadata=" << (o.no_metadata ? 0 : 1)
        << '\n';
    out << "# prep expand_abbrev=" << (o.no_expand_abbrev ? 0 : 1)
        << " normalize_repetition=" << (o.no_normalize_repetition ? 0 : 1)
        << " strip_handles_urls=" << (o.no_strip_handles_urls ? 0 : 1)
        << " strip_hashtags=" << (o.strip_hashtags ? 1 : 0) << " max_run=" << o.max_run << '\n';
  }
  if (command == "train") kv("merge_val", o.merge_val ? "1" : "0");
  if (command == "grid") {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "grid_start=%g grid_stop=%g grid_step=%g", o.grid_start,
                  o.grid_stop, o.grid_step);
    out << "# " << buf << '\n';
  }
}

void print_stats(const std::string& path, std::ostream& out) {
  const cmsent::Dataset ds = cmsent::parse_conll_file(path);
  const cmsent::DatasetStats st = cmsent::dataset_stats(ds);
  char buf[128];
  out << "dataset " << ds.name << " (" << path << ")\n";
  std::snprintf(buf, sizeof(buf), "  tweets      %10zu\n", st.tweet_count);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  labeled     %10zu\n", st.labeled);
  out << buf;
  for (const cmsent::Sentiment s : cmsent::kAllSentiments) {
    std::snprintf(buf, sizeof(buf), "  %-10s  %10zu\n", std::string(to_string(s)).c_str(),
                  st.class_counts[static_cast<std::size_t>(s)]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "  mean tokens %10.1f\n", st.mean_tokens());
  out << buf;
  out << "class.positive=" << st.class_counts[2] << '\n';
  out << "class.negative=" << st.class_counts[0] << '\n';
  out << "class.neutral=" << st.class_counts[1] << '\n';
  out << "total=" << st.labeled << '\n';
  out << "tweets=" << st.tweet_count << '\n';
  out << "tokens=" << st.token_count << '\n';
  std::snprintf(buf, sizeof(buf), "mean_tokens=%.1f\n", st.mean_tokens());
  out << buf;
}

int cmd_stats(const Options& o) {
  std::vector<std::string> files;
  for (const std::string& p : {o.train_path, o.val_path, o.test_path}) {
    if (!p.empty()) files.push_back(p);
  }
  if (files.empty()) {
    throw cmsent::InvalidArgument("stats needs at least one of --train/--val/--test");
  }
  require_paths(files);
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i) std::cout << '\n';
    print_stats(files[i], std::cout);
  }
  return 0;
}

// Shared by train/grid: parse + preprocess a labeled file.
cmsent::Dataset load_prepped(const std::string& path, const cmsent::PrepConfig& prep,
                             const cmsent::AbbrevMap& abbrev) {
  return cmsent::preprocess(cmsent::parse_conll_file(path), prep, abbrev);
}

int cmd_train(const Options& o) {
  if (o.train_path.empty() || o.model_path.empty() || o.space_path.empty()) {
    throw cmsent::InvalidArgument("train needs --train, --model and --space");
  }
  if (o.merge_val && o.val_path.empty()) {
    throw cmsent::InvalidArgument("--merge-val needs --val");
  }
  const LexiconPaths lp = lexicon_paths(o);
  std::vector<std::string> inputs = {o.train_path, lp.valence, lp.emoji, lp.profanity, lp.abbrev};
  if (o.merge_val) inputs.push_back(o.val_path);
  require_paths(inputs);

  echo_config(std::cout, "train", o, lp);
  const cmsent::LexiconBundle lex = load_lexicons(lp);
  const cmsent::AbbrevMap abbrev = load_abbrevs(lp);
  const cmsent::PrepConfig prep = prep_config(o);

  cmsent::Dataset train_set = load_prepped(o.train_path, prep, abbrev);
  if (o.merge_val) {
    cmsent::Dataset val_set = load_prepped(o.val_path, prep, abbrev);
    std::unordered_set<std::string> uids;
    for (const cmsent::Tweet& t : train_set.tweets) uids.insert(t.uid);
    for (cmsent::Tweet& t : val_set.tweets) {
      if (!uids.insert(t.uid).second) {
        throw cmsent::InvalidArgument("merged train/val share uid '" + t.uid + "'");
      }
      train_set.tweets.push_back(std::move(t));
    }
    train_set.name += "+" + val_set.name;
  }

  const cmsent::FeatureSpace fs =
      cmsent::fit_feature_space(train_set, ngram_config(o), feature_config(o), lex, prep);

  std::vector<cmsent::SparseVector> X;
  std::vector<cmsent::Sentiment> y;
  for (const cmsent::Tweet& t : train_set.tweets) {
    if (!t.gold) continue;
    X.push_back(cmsent::vectorize(t, fs, lex));
    y.push_back(*t.gold);
  }
  cmsent::LRModel model = cmsent::train(X, y, train_config(o));
  model.space_fingerprint = fs.fingerprint();

  {
    std::ofstream out(o.space_path, std::ios::binary);
    if (!out) throw cmsent::IoError("cannot write '" + o.space_path + "'");
    cmsent::save_feature_space(fs, out);
  }
  {
    std::ofstream out(o.model_path, std::ios::binary);
    if (!out) throw cmsent::IoError("cannot write '" + o.model_path + "'");
    cmsent::save_model(model, out);
  }

  std::cout << "trained_on=" << model.trained_on << '\n';
  std::cout << "dim=" << fs.dim() << '\n';
  std::cout << "terms=" << fs.terms.size() << '\n';
  std::cout << "space=" << o.space_path << '\n';
  std::cout << "model=" << o.model_path << '\n';
  return 0;
}

std::vector<double> make_grid(const Options& o) {
  if (!(o.grid_start > 0.0) || !(o.grid_stop >= o.grid_start) || !(o.grid_step > 0.0)) {
    throw cmsent::InvalidArgument("bad grid range");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double c = o.grid_start + static_cast<double>(i) * o.grid_step;
    if (c > o.grid_stop + 1e-12) break;
    grid.push_back(c);
  }
  return grid;
}

int cmd_grid(const Options& o) {
  if (o.train_path.empty() || o.val_path.empty()) {
    throw cmsent::InvalidArgument("grid needs --train and --val");
  }
  const LexiconPaths lp = lexicon_paths(o);
  require_paths({o.train_path, o.val_path, lp.valence, lp.emoji, lp.profanity, lp.abbrev});

  echo_config(std::cout, "grid", o, lp);
  const cmsent::LexiconBundle lex = load_lexicons(lp);
  const cmsent::AbbrevMap abbrev = load_abbrevs(lp);
  const cmsent::PrepConfig prep = prep_config(o);

  const cmsent::Dataset train_set = load_prepped(o.train_path, prep, abbrev);
  const cmsent::Dataset val_set = load_prepped(o.val_path, prep, abbrev);
  const cmsent::FeatureSpace fs =
      cmsent::fit_feature_space(train_set, ngram_config(o), feature_config(o), lex, prep);

  const cmsent::GridResult result =
      cmsent::grid_search(train_set, val_set, fs, make_grid(o), lex, train_config(o));

  char buf[64];
  std::cout << "       C      f1\n";
  for (const cmsent::GridPoint& p : result.points) {
    std::snprintf(buf, sizeof(buf), "%8g  %.4f\n", p.C, p.f1);
    std::cout << buf;
  }
  std::snprintf(buf, sizeof(buf), "best_C=%g\n", result.best_C);
  std::cout << buf;
  std::snprintf(buf, sizeof(buf), "best_f1=%.4f\n", result.best_f1);
  std::cout << buf;
  return 0;
}

struct LoadedModel {
  cmsent::FeatureSpace fs;
  cmsent::LRModel model;
};

LoadedModel load_model_and_space(const Options& o) {
  LoadedModel lm;
  {
    std::ifstream in(o.space_path, std::ios::binary);
    if (!in) throw cmsent::IoError("cannot open '" + o.space_path + "'");
    lm.fs = cmsent::load_feature_space(in);
  }
  {
    std::ifstream in(o.model_path, std::ios::binary);
    if (!in) throw cmsent::IoError("cannot open '" + o.model_path + "'");
    lm.model = cmsent::load_model(in);
  }
  cmsent::require_space_match(lm.model, lm.fs);
  return lm;
}

int cmd_eval(const Options& o) {
  const std::string eval_path = o.val_path.empty() ? o.test_path : o.val_path;
  if (o.model_path.empty() || o.space_path.empty() || eval_path.empty()) {
    throw cmsent::InvalidArgument("eval needs --model, --space and one of --val/--test");
  }
  const LexiconPaths lp = lexicon_paths(o);
  require_paths({o.model_path, o.space_path, eval_path, lp.valence, lp.emoji, lp.profanity,
                 lp.abbrev});

  echo_config(std::cout, "eval", o, lp);
  const LoadedModel lm = load_model_and_space(o);
  const cmsent::LexiconBundle lex = load_lexicons(lp);
  const cmsent::AbbrevMap abbrev = load_abbrevs(lp);

  // Featurization must mirror training; the prep config comes from the space.
  const cmsent::Dataset ds = load_prepped(eval_path, lm.fs.prep, abbrev);

  std::vector<cmsent::Sentiment> gold, pred;
  for (const cmsent::Tweet& t : ds.tweets) {
    if (!t.gold) continue;
    gold.push_back(*t.gold);
    pred.push_back(cmsent::predict(lm.model, cmsent::vectorize(t, lm.fs, lex)));
  }
  if (gold.empty()) {
    throw cmsent::InvalidArgument("eval file '" + eval_path + "' has no gold labels");
  }

  const cmsent::Metrics metrics = cmsent::compute_metrics(gold, pred);
  cmsent::write_metrics(metrics, std::cout);

  if (!o.report_path.empty()) {
    std::ofstream out(o.report_path, std::ios::binary);
    if (!out) throw cmsent::IoError("cannot write '" + o.report_path + "'");
    echo_config(out, "eval", o, lp);
    cmsent::error_report(lm.model, ds, lm.fs, o.report_k, lex, out);
    std::cout << "report=" << o.report_path << '\n';
  }
  return 0;
}

int cmd_predict(const Options& o) {
  if (o.model_path.empty() || o.space_path.empty() || o.test_path.empty()) {
    throw cmsent::InvalidArgument("predict needs --model, --space and --test");
  }
  const LexiconPaths lp = lexicon_paths(o);
  require_paths({o.model_path, o.space_path, o.test_path, lp.valence, lp.emoji, lp.profanity,
                 lp.abbrev});

  // Keep stdout reserved for the uid,label stream.
  echo_config(std::cerr, "predict", o, lp);
  const LoadedModel lm = load_model_and_space(o);
  const cmsent::LexiconBundle lex = load_lexicons(lp);
  const cmsent::AbbrevMap abbrev = load_abbrevs(lp);
  const cmsent::Dataset ds = load_prepped(o.test_path, lm.fs.prep, abbrev);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (o.out_path != "-") {
    file.open(o.out_path, std::ios::binary);
    if (!file) throw cmsent::IoError("cannot write '" + o.out_path + "'");
    out = &file;
  }
  for (const cmsent::Tweet& t : ds.tweets) {
    const cmsent::Sentiment label = cmsent::predict(lm.model, cmsent::vectorize(t, lm.fs, lex));
    *out << t.uid << ',' << to_string(label) << '\n';
  }
  if (o.out_path != "-") {
    std::cerr << "predictions=" << o.out_path << " (" << ds.tweets.size() << " lines)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment classifier for code-mixed (Hinglish/Spanglish) tweets"};
  app.fallthrough();

  Options o;
  app.set_config("--config", "", "Flat key=value config file; flags win over file entries");

  app.add_option("--train", o.train_path, "Training file (CONLL-style blocks)");
  app.add_option("--val", o.val_path, "Validation file");
  app.add_option("--test", o.test_path, "Test/prediction file");
  app.add_option("--model", o.model_path, "Model file path");
  app.add_option("--space", o.space_path, "Feature-space file path");
  app.add_option("--lexicon-dir", o.lexicon_dir, "Directory with bundled lexicons")
      ->capture_default_str();
  app.add_option("--valence-lexicon", o.valence_path, "Valence lexicon TSV (overrides dir)");
  app.add_option("--emoji-lexicon", o.emoji_path, "Emoji polarity TSV (overrides dir)");
  app.add_option("--profanity-list", o.profanity_path, "Profanity list (overrides dir)");
  app.add_option("--abbrev-map", o.abbrev_path, "Abbreviation map TSV (overrides dir)");
  app.add_option("--report", o.report_path, "Write the error-analysis report here");
  app.add_option("--report-k", o.report_k, "Misclassified tweets to include in the report")
      ->capture_default_str();
  app.add_option("--out", o.out_path, "Prediction output path, '-' for stdout")
      ->capture_default_str();
  app.add_flag("--merge-val", o.merge_val, "Merge --val into the training corpus");

  app.add_option("--grid-start", o.grid_start, "Smallest grid C")->capture_default_str();
  app.add_option("--grid-stop", o.grid_stop, "Largest grid C")->capture_default_str();
  app.add_option("--grid-step", o.grid_step, "Grid step")->capture_default_str();

  app.add_flag("--no-ngrams", o.no_ngrams, "Disable the n-gram feature family");
  app.add_flag("--no-sentiment", o.no_sentiment, "Disable the sentiment-lexicon family");
  app.add_flag("--no-emoji", o.no_emoji, "Disable the emoji family");
  app.add_flag("--no-profanity", o.no_profanity, "Disable the profanity family");
  app.add_flag("--no-metadata", o.no_metadata, "Disable the metadata family");

  app.add_flag("--no-expand-abbrev", o.no_expand_abbrev, "Keep abbreviations as-is");
  app.add_flag("--no-normalize-repetition", o.no_normalize_repetition,
               "Keep elongated character runs");
  app.add_flag("--no-strip-handles-urls", o.no_strip_handles_urls, "Keep @handles and URLs");
  app.add_flag("--strip-hashtags", o.strip_hashtags, "Also remove #hashtag tokens");
  app.add_option("--max-run", o.max_run, "Longest kept character run")->capture_default_str();

  app.add_option("--ngram-orders", o.orders, "Comma-separated n-gram orders")
      ->capture_default_str();
  app.add_option("--min-df", o.min_df, "Minimum document frequency for vocabulary terms")
      ->capture_default_str();
  app.add_flag("--no-lowercase", o.no_lowercase, "Keep term case when extracting n-grams");

  app.add_option("-C,--C", o.C, "Regularization trade-off")->capture_default_str();
  app.add_option("--max-iters", o.max_iters, "Optimizer iteration cap")->capture_default_str();
  app.add_option("--grad-tol", o.grad_tol, "Gradient infinity-norm stop threshold")
      ->capture_default_str();

  app.require_subcommand(1);
  CLI::App* stats = app.add_subcommand("stats", "Dataset statistics");
  CLI::App* train = app.add_subcommand("train", "Fit feature space and model");
  CLI::App* grid = app.add_subcommand("grid", "C grid search on the validation split");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a trained model on labeled data");
  CLI::App* predict = app.add_subcommand("predict", "Write uid,label predictions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (stats->parsed()) return cmd_stats(o);
    if (train->parsed()) return cmd_train(o);
    if (grid->parsed()) return cmd_grid(o);
    if (eval->parsed()) return cmd_eval(o);
    if (predict->parsed()) return cmd_predict(o);
    return 4;
  } catch (const cmsent::DegenerateLabels& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const cmsent::EmptyTrainingSet& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const cmsent::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const cmsent::FeatureSpaceMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const cmsent::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const cmsent::EmptyInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const cmsent::LengthMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const cmsent::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
