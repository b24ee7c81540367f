#include <gtest/gtest.h>

#include <random>

#include "incivil/text.hpp"

using namespace incivil;
using namespace incivil::text;

namespace {

std::vector<std::string> surfaces(const TokenSeq& t) {
  std::vector<std::string> out;
  for (const auto& tok : t) out.push_back(tok.surface);
  return out;
}

std::vector<std::string> entities(const std::vector<EntityMention>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.entity);
  return out;
}

}  // namespace

TEST(Tokenize, SplitsPunctuationRuns) {
  EXPECT_EQ(surfaces(tokenize("@user1 you LOSER!!")), (std::vector<std::string>{"@user1", "you", "LOSER", "!!"}));
  EXPECT_EQ(surfaces(tokenize("don't die.")), (std::vector<std::string>{"don't", "die", "."}));
  EXPECT_TRUE(tokenize("").empty());
}

TEST(Tokenize, SigilTokensKeptWhole) {
  EXPECT_EQ(surfaces(tokenize("#winning! @bob,")), (std::vector<std::string>{"#winning!", "@bob,"}));
}

TEST(Tokenize, SpansIncreaseAndLowerMatches) {
  auto toks = tokenize("\"Hey\" \xC3\x89mile, WHAT?! ok");
  for (std::size_t i = 0; i < toks.size(); ++i) {
    EXPECT_LT(toks[i].begin, toks[i].end);
    if (i > 0) EXPECT_LE(toks[i - 1].end, toks[i].begin);
    EXPECT_EQ(toks[i].lower, utf8::to_lower(toks[i].surface));
  }
}

TEST(CharEncode, PadsAndRecordsLength) {
  CharVocab vocab(U"ab");
  auto cs = char_encode("ab", vocab, 4);
  EXPECT_EQ(cs.indices, (std::vector<std::int32_t>{2, 3, 0, 0}));
  EXPECT_EQ(cs.length, 2u);
}

TEST(CharEncode, Truncates) {
  CharVocab vocab(U"abcdef");
  auto cs = char_encode("abcdef", vocab, 4);
  EXPECT_EQ(cs.indices, (std::vector<std::int32_t>{2, 3, 4, 5}));
  EXPECT_EQ(cs.length, 4u);
}

TEST(CharEncode, UnknownMapsToUnk) {
  CharVocab vocab(U"a");
  auto cs = char_encode("a\xE2\x98\x83", vocab, 4);
  EXPECT_EQ(cs.indices[0], 2);
  EXPECT_EQ(cs.indices[1], CharVocab::kUnk);
}

TEST(CharEncode, DecodeInvertsInsideVocab) {
  std::mt19937_64 rng(3);
  const std::u32string alphabet = U"abc xyz!☃é";
  CharVocab vocab(alphabet);
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string s;
    const std::size_t n = rng() % 20;
    for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    const std::size_t max_len = 1 + rng() % 15;
    auto cs = char_encode(utf8::encode(s), vocab, max_len);
    EXPECT_EQ(cs.indices.size(), max_len);
    EXPECT_LE(cs.length, max_len);
    EXPECT_EQ(char_decode(cs, vocab), utf8::encode(s.substr(0, max_len)));
  }
}

TEST(CharVocab, BuildIsSortedAndStable) {
  auto v = CharVocab::build({"cab", "bz"});
  EXPECT_EQ(v.chars(), U"abcz");
  EXPECT_EQ(v.size(), 6u);
  EXPECT_EQ(v.index(U'a'), 2);
  EXPECT_EQ(v.index(U'q'), CharVocab::kUnk);
}

TEST(Ngrams, Counts) {
  auto t = from_words({"a", "b", "a"});
  EXPECT_EQ(ngrams(t, {1}), (NgramCounts{{"a", 2}, {"b", 1}}));
  EXPECT_EQ(ngrams(t, {2}), (NgramCounts{{"a b", 1}, {"b a", 1}}));
  EXPECT_TRUE(ngrams(from_words({"a"}), {3}).empty());
}

TEST(Ngrams, TotalCountPerOrder) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> words;
    const std::size_t len = rng() % 12;
    for (std::size_t i = 0; i < len; ++i) words.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
    auto toks = from_words(words);
    for (int n = 1; n <= 4; ++n) {
      std::int64_t total = 0;
      for (const auto& [k, c] : ngrams(toks, {n})) total += c;
      EXPECT_EQ(total, std::max<std::int64_t>(0, static_cast<std::int64_t>(len) - n + 1));
    }
  }
}

TEST(Negation, Window) {
  corpus::Lexicon lex({{"die", 1}});
  EXPECT_TRUE(detect_negation(tokenize("Please don't die."), lex));
  EXPECT_FALSE(detect_negation(tokenize("die already"), lex));
  EXPECT_FALSE(detect_negation(tokenize("not a very bad big die"), lex, 3));
  EXPECT_TRUE(detect_negation(tokenize("not a very bad big die"), lex, 5));
  EXPECT_TRUE(detect_negation(tokenize("shouldn't die"), lex));
}

TEST(Negation, MonotoneInWindow) {
  std::mt19937_64 rng(17);
  corpus::Lexicon lex({{"die", 1}, {"idiot", 2}});
  const std::vector<std::string> words = {"not", "die", "idiot", "a", "b", "never", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < 1 + rng() % 10; ++i) w.push_back(words[rng() % words.size()]);
    auto toks = from_words(w);
    bool prev = false;
    for (std::size_t win = 1; win <= 12; ++win) {
      bool now = detect_negation(toks, lex, win);
      if (prev) EXPECT_TRUE(now);
      prev = now;
    }
  }
}

TEST(Entities, CapitalizedRuns) {
  EXPECT_EQ(entities(entity_candidates(tokenize("I love Donald Trump"))), std::vector<std::string>{"donald trump"});
  EXPECT_EQ(entities(entity_candidates(tokenize("@FoxNews lies"))), std::vector<std::string>{"foxnews"});
  EXPECT_TRUE(entity_candidates(tokenize("the")).empty());
  EXPECT_EQ(entities(entity_candidates(tokenize("Trump Tower is tall"))), std::vector<std::string>{"trump tower"});
  EXPECT_EQ(entities(entity_candidates(tokenize("go #Brexit now"))), std::vector<std::string>{"brexit"});
}

TEST(Entities, SpansNeverOverlap) {
  std::mt19937_64 rng(21);
  const std::vector<std::string> words = {"Big", "apple", "@Joe", "#Tag", "New", "York", "is", "!", "Ok"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < 1 + rng() % 10; ++i) w.push_back(words[rng() % words.size()]);
    auto ms = entity_candidates(from_words(w));
    for (std::size_t i = 0; i < ms.size(); ++i) {
      EXPECT_GT(ms[i].end, ms[i].begin);
      EXPECT_FALSE(ms[i].entity.empty());
      if (i > 0) EXPECT_LE(ms[i - 1].end, ms[i].begin);
    }
  }
}

TEST(Entities, NormalizeCollapsesWhitespace) { EXPECT_EQ(normalize_entity("  Donald \t TRUMP "), "donald trump"); }

TEST(AnnotatedRecognizer, OverridesRulesAndFallsBack) {
  RuleBasedRecognizer rules;
  auto rec = AnnotatedRecognizer::parse(R"({"tweet_id":"1","entities":[{"text":"Nike","start_token":2,"end_token":3}]})",
                                        &rules);
  auto toks = tokenize("I like nike shoes");
  EXPECT_EQ(entities(rec.recognize("1", toks)), std::vector<std::string>{"nike"});
  EXPECT_EQ(entities(rec.recognize("2", tokenize("we saw Paris"))), std::vector<std::string>{"paris"});
}
