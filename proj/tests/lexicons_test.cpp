#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "cmsent/lexicons.hpp"
#include "test_util.hpp"

using namespace cmsent;
using testutil::tok;

TEST_CASE("load_valence_lexicon parses token/valence pairs", "[lexicons]") {
  std::istringstream in("good\t1.9\nbad\t-2.5\ngood\t2.0\n");
  const ValenceLexicon lex = load_valence_lexicon(in);
  CHECK(lex.size() == 2);
  CHECK(lex.valence("good") == 2.0);  // duplicate takes the last value
  CHECK(lex.valence("bad") == -2.5);
  CHECK(lex.valence("unknown") == 0.0);
}

TEST_CASE("load_valence_lexicon error cases", "[lexicons]") {
  SECTION("non-numeric valence") {
    std::istringstream in("good\tx\n");
    try {
      load_valence_lexicon(in);
      FAIL("expected MalformedLexiconLine");
    } catch (const MalformedLexiconLine& e) {
      CHECK(e.line == 1);
    }
  }
  SECTION("missing tab") {
    std::istringstream in("good 1.9\n");
    CHECK_THROWS_AS(load_valence_lexicon(in), MalformedLexiconLine);
  }
  SECTION("out-of-range valence") {
    std::istringstream in("good\t4.5\n");
    CHECK_THROWS_AS(load_valence_lexicon(in), OutOfRangeValence);
  }
  SECTION("empty stream yields empty lexicon and all-zero scores") {
    std::istringstream in("");
    const ValenceLexicon lex = load_valence_lexicon(in);
    CHECK(lex.empty());
    const SentimentScores s = score_tokens({tok("good")}, lex, default_negators());
    CHECK(s == SentimentScores{});
  }
}

TEST_CASE("lookup is case-insensitive", "[lexicons]") {
  std::istringstream in("Good\t1.9\n");
  const ValenceLexicon lex = load_valence_lexicon(in);
  CHECK(lex.valence("good") == 1.9);
  CHECK(lex.valence(fold_case("GOOD")) == 1.9);
}

TEST_CASE("score_tokens ignores non-English tokens", "[lexicons]") {
  ValenceLexicon lex;
  lex.add("good", 2.0);
  const std::vector<Token> tokens = {Token{"good", LangTag{LangTag::Kind::Hin, {}}},
                                     Token{"good", LangTag{LangTag::Kind::Es, {}}}};
  const SentimentScores s = score_tokens(tokens, lex, default_negators());
  CHECK(s.pos_count == 0);
  CHECK(s.neg_count == 0);
  CHECK(s.sum_valence == 0.0);
  CHECK(s.compound == 0.0);
}

TEST_CASE("score_tokens computes the compound normalization", "[lexicons]") {
  ValenceLexicon lex;
  lex.add("good", 2.0);
  const SentimentScores s = score_tokens({tok("good")}, lex, default_negators());
  CHECK(s.pos_count == 1);
  CHECK(s.neg_count == 0);
  CHECK(s.sum_valence == 2.0);
  CHECK_THAT(s.compound, Catch::Matchers::WithinAbs(0.4588314677411235, 1e-12));
}

TEST_CASE("negation flips and damps valence within a 3-token window", "[lexicons]") {
  ValenceLexicon lex;
  lex.add("good", 2.0);

  SECTION("immediately preceding negator") {
    const SentimentScores s = score_tokens({tok("not"), tok("good")}, lex, default_negators());
    CHECK(s.neg_count == 1);
    CHECK(s.pos_count == 0);
    CHECK_THAT(s.sum_valence, Catch::Matchers::WithinAbs(-1.48, 1e-12));
    CHECK_THAT(s.compound, Catch::Matchers::WithinAbs(-0.35695931886407123, 1e-12));
  }
  SECTION("negator three participating tokens back still applies") {
    const SentimentScores s =
        score_tokens({tok("not"), tok("it"), tok("was"), tok("good")}, lex, default_negators());
    CHECK(s.neg_count == 1);
  }
  SECTION("negator four tokens back does not apply") {
    const SentimentScores s = score_tokens(
        {tok("not"), tok("it"), tok("was"), tok("very"), tok("good")}, lex, default_negators());
    CHECK(s.pos_count == 1);
    CHECK(s.sum_valence == 2.0);
  }
  SECTION("non-participating tokens do not occupy window slots") {
    const std::vector<Token> tokens = {
        tok("not"), Token{"bahut", LangTag{LangTag::Kind::Hin, {}}},
        Token{"hi", LangTag{LangTag::Kind::Hin, {}}},
        Token{"accha", LangTag{LangTag::Kind::Hin, {}}}, tok("good")};
    const SentimentScores s = score_tokens(tokens, lex, default_negators());
    CHECK(s.neg_count == 1);
  }
}

TEST_CASE("empty negator set equals no negation clause", "[lexicons][property]") {
  std::mt19937 rng(777);
  ValenceLexicon lex;
  lex.add("good", 1.9);
  lex.add("bad", -2.5);
  lex.add("love", 3.2);
  lex.add("not", -0.5);

  const std::vector<std::string> pool = {"good", "bad", "love", "not", "never", "meeting", "x"};
  for (int round = 0; round < 200; ++round) {
    std::vector<Token> tokens;
    std::uniform_int_distribution<int> n_tok(0, 10);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const int n = n_tok(rng);
    for (int i = 0; i < n; ++i) tokens.push_back(tok(pool[pick(rng)]));

    const SentimentScores with_empty = score_tokens(tokens, lex, {});
    // Reference: plain sum of looked-up valences.
    double sum = 0.0;
    int pos = 0, neg = 0;
    for (const Token& t : tokens) {
      const double v = lex.valence(fold_case(t.surface));
      sum += v;
      if (v > 0) ++pos;
      if (v < 0) ++neg;
    }
    CHECK(with_empty.sum_valence == sum);
    CHECK(with_empty.pos_count == pos);
    CHECK(with_empty.neg_count == neg);
  }
}

TEST_CASE("compound is monotone in sum_valence and bounded", "[lexicons][property]") {
  CHECK(compound_score(0.0) == 0.0);
  double prev = -1.0;
  for (double s = -40.0; s <= 40.0; s += 0.25) {
    const double c = compound_score(s);
    CHECK(c > -1.0);
    CHECK(c < 1.0);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("removing non-English tokens leaves scores unchanged", "[lexicons][property]") {
  ValenceLexicon lex;
  lex.add("good", 1.9);
  lex.add("bad", -2.5);
  std::mt19937 rng(4242);
  const std::vector<std::string> pool = {"good", "bad", "not", "xyz"};
  const std::vector<LangTag::Kind> kinds = {LangTag::Kind::Eng, LangTag::Kind::Hin,
                                            LangTag::Kind::O, LangTag::Kind::Univ};
  for (int round = 0; round < 200; ++round) {
    std::vector<Token> tokens;
    std::uniform_int_distribution<int> n_tok(0, 12);
    std::uniform_int_distribution<std::size_t> pick_s(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_k(0, kinds.size() - 1);
    const int n = n_tok(rng);
    for (int i = 0; i < n; ++i) {
      tokens.push_back(Token{pool[pick_s(rng)], LangTag{kinds[pick_k(rng)], {}}});
    }
    std::vector<Token> eng_only;
    for (const Token& t : tokens) {
      if (t.lang.kind == LangTag::Kind::Eng) eng_only.push_back(t);
    }
    const SentimentScores a = score_tokens(tokens, lex, default_negators());
    const SentimentScores b = score_tokens(eng_only, lex, default_negators());
    CHECK(a == b);
  }
}

TEST_CASE("emoji lexicon lookup and defaults", "[lexicons]") {
  std::istringstream in(
      "\U0001F60A\thappy\n"
      "\U0001F622\tsad\n"
      "\U0001F62D\tneutral\n");
  const EmojiLexicon lex = load_emoji_lexicon(in);
  CHECK(emoji_polarity("\U0001F60A", lex) == EmojiPolarity::happy);
  CHECK(emoji_polarity("\U0001F622", lex) == EmojiPolarity::sad);
  CHECK(emoji_polarity("\U0001F62D", lex) == EmojiPolarity::neutral);
  CHECK(emoji_polarity("abc", lex) == EmojiPolarity::neutral);
  CHECK(emoji_polarity("", lex) == EmojiPolarity::neutral);
}

TEST_CASE("load_emoji_lexicon rejects unknown polarity words", "[lexicons]") {
  std::istringstream in("\U0001F60A\tglad\n");
  CHECK_THROWS_AS(load_emoji_lexicon(in), MalformedLexiconLine);
}

TEST_CASE("bundled emoji lexicon matches its construction thresholds", "[lexicons]") {
  const EmojiLexicon& lex = testutil::bundled_lexicons().emoji;
  CHECK(lex.size() >= 700);
  // Smiling face: source score above the happy threshold.
  CHECK(emoji_polarity("\U0001F60A", lex) == EmojiPolarity::happy);
  // Loudly-crying face: source score inside (-0.2, +0.2) -> neutral.
  CHECK(emoji_polarity("\U0001F62D", lex) == EmojiPolarity::neutral);
  CHECK(emoji_polarity("\U0001F622", lex) == EmojiPolarity::sad);
}

TEST_CASE("profanity_present folds case and matches whole tokens", "[lexicons]") {
  ProfanitySet set;
  set.add("damn");
  CHECK(profanity_present({tok("DAMN")}, set));
  CHECK(profanity_present({tok("ok"), tok("Damn")}, set));
  CHECK_FALSE(profanity_present({tok("damnation")}, set));
  CHECK_FALSE(profanity_present({tok("ok"), tok("fine")}, set));
  CHECK_FALSE(profanity_present({tok("damn")}, ProfanitySet{}));
}

TEST_CASE("bundled valence lexicon spot checks", "[lexicons]") {
  const ValenceLexicon& lex = testutil::bundled_lexicons().valence;
  CHECK(lex.size() >= 300);
  CHECK(lex.valence("good") == 1.9);
  CHECK(lex.valence("bad") < 0.0);
  CHECK(lex.valence("love") > 0.0);
}

TEST_CASE("bundled profanity list spot checks", "[lexicons]") {
  const ProfanitySet& set = testutil::bundled_lexicons().profanity;
  CHECK(set.size() >= 200);
  CHECK(set.contains("damn"));
  CHECK_FALSE(set.contains("meeting"));
}

TEST_CASE("is_emoji_codepoint covers the main blocks", "[lexicons]") {
  CHECK(is_emoji_codepoint(0x1F60A));
  CHECK(is_emoji_codepoint(0x2764));
  CHECK(is_emoji_codepoint(0x2B50));
  CHECK_FALSE(is_emoji_codepoint('a'));
  CHECK_FALSE(is_emoji_codepoint(0x0915));  // Devanagari letter
}
