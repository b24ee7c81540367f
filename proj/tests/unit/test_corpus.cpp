#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "incivil/corpus.hpp"

using namespace incivil;
using namespace incivil::corpus;

namespace {

Tweet make(const std::string& id, const std::string& author, const std::string& text,
           std::vector<std::string> mentions = {}, const std::string& when = "2017-08-01T00:00:00Z") {
  return Tweet{id, author, text, parse_iso8601(when), std::move(mentions), std::nullopt};
}

}  // namespace

TEST(LoadTweets, AutoExtractsMentions) {
  auto r = parse_tweets(R"({"id":"1","author_id":"u9","text":"@a hi","created_at":"2017-08-01T14:30:00Z"})");
  ASSERT_TRUE(r.errors.empty());
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].mentions, std::vector<std::string>{"a"});
  EXPECT_EQ(r.records[0].author_id, "u9");
}

TEST(LoadTweets, EmptyFileGivesEmptyList) {
  auto r = parse_tweets("");
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.errors.empty());
}

TEST(LoadTweets, BadDateIsRecordError) {
  std::string content;
  for (int i = 0; i < 10; ++i)
    content += R"({"id":")" + std::to_string(i) + R"(","author_id":"u","text":"x","created_at":"2017-08-01T14:30:00Z"})" + "\n";
  content += R"({"id":"bad","author_id":"u","text":"x","created_at":"not-a-date"})";
  auto r = parse_tweets(content);
  EXPECT_EQ(r.records.size(), 10u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 11u);
}

TEST(LoadTweets, MostlyMalformedFileFails) {
  std::string content = R"({"id":"1","author_id":"u","text":"x","created_at":"2017-08-01T14:30:00Z"})" "\n{oops\n{oops\n";
  try {
    parse_tweets(content);
    FAIL() << "expected whole-file error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(LoadTweets, GivenMentionsAreNormalizedAndDeduped) {
  auto r = parse_tweets(
      R"({"id":"1","author_id":"@U9","text":"hi","created_at":"2017-08-01T14:30:00Z","mentions":["@Bob","bob","carl"]})");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].author_id, "u9");
  EXPECT_EQ(r.records[0].mentions, (std::vector<std::string>{"bob", "carl"}));
}

TEST(LoadTweets, SaveLoadRoundTrip) {
  std::vector<Tweet> tweets = {make("1", "a", "@b you \"idiot\"\n", {"b"}, "2017-08-01T14:30:00Z"),
                               make("2", "c", "caf\xC3\xA9 \xE2\x98\x83", {}, "2018-01-02T03:04:05Z")};
  tweets[1].in_reply_to = "1";
  auto r = parse_tweets(serialize_tweets(tweets));
  ASSERT_TRUE(r.errors.empty());
  EXPECT_EQ(r.records, tweets);
}

TEST(Lexicon, ParsesSeverities) {
  auto lex = parse_lexicon("idiot\t1\nf**k\t2\n");
  EXPECT_EQ(lex.severity("idiot"), 1);
  EXPECT_EQ(lex.severity("f**k"), 2);
  EXPECT_EQ(lex.size(), 2u);
}

TEST(Lexicon, DuplicateKeepsMaxSeverity) {
  auto lex = parse_lexicon("Die\t1\ndie\t2\n");
  EXPECT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex.severity("die"), 2);
}

TEST(Lexicon, SeverityDefaultsToOne) { EXPECT_EQ(parse_lexicon("moron\n").severity("moron"), 1); }

TEST(Lexicon, InvalidSeverityNamesLine) {
  try {
    parse_lexicon("word\t3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(Lexicon, EmptyWordRejected) { EXPECT_THROW(parse_lexicon("\t1\n"), Error); }

TEST(Labels, RequiresHeader) {
  EXPECT_THROW(parse_labels("1,civil\n"), Error);
  auto l = parse_labels("tweet_id,label\n1,civil\n2,incivil\n");
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[1].label, Label::kIncivil);
  EXPECT_EQ(parse_labels(serialize_labels(l)).size(), 2u);
}

TEST(OffensiveFilter, ExactTokenMatch) {
  Lexicon lex({{"idiot", 1}});
  auto kept = offensive_filter({make("1", "a", "you idiot"), make("2", "a", "have a nice day"), make("3", "a", "idi0t"),
                                make("4", "a", "IDIOT!!")},
                               lex);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "1");
  EXPECT_EQ(kept[1].id, "4");
}

TEST(MentionFilter, KeepsOrder) {
  auto kept = mention_filter({make("1", "a", "x", {"b"}), make("2", "a", "x"), make("3", "a", "x", {"c"})});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "1");
  EXPECT_EQ(kept[1].id, "3");
}

TEST(Filters, IdempotentAndPartitioning) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> words = {"idiot", "moron", "nice", "day", "you", "@x", "clown", "ok"};
  Lexicon lex({{"idiot", 1}, {"moron", 2}, {"clown", 1}});
  std::vector<Tweet> tweets;
  for (int i = 0; i < 300; ++i) {
    std::string text;
    std::vector<std::string> mentions;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int j = 0; j < n; ++j) {
      const auto& w = words[rng() % words.size()];
      text += w + (rng() % 3 == 0 ? "! " : " ");
      if (w == "@x") mentions = {"x"};
    }
    tweets.push_back(make(std::to_string(i), "a", text, mentions));
  }
  auto once = offensive_filter(tweets, lex);
  EXPECT_EQ(offensive_filter(once, lex), once);
  auto m = mention_filter(tweets);
  EXPECT_EQ(mention_filter(m), m);
  EXPECT_LE(once.size(), tweets.size());

  std::set<std::string> kept_ids;
  for (const auto& t : once) {
    kept_ids.insert(t.id);
    auto toks = filter_tokens(t.text);
    EXPECT_TRUE(std::any_of(toks.begin(), toks.end(), [&](const std::string& w) { return lex.contains(w); }));
  }
  std::size_t dropped = 0;
  for (const auto& t : tweets) {
    if (kept_ids.count(t.id)) continue;
    ++dropped;
    for (const auto& w : filter_tokens(t.text)) EXPECT_FALSE(lex.contains(w));
  }
  EXPECT_EQ(dropped + once.size(), tweets.size());
}

TEST(ExtractPairs, AccountHolderAndTargets) {
  auto p = extract_pairs(make("1", "u2", "x", {"u1"}));
  EXPECT_EQ(p.account_holder_id, "u2");
  EXPECT_EQ(p.target_ids, std::vector<std::string>{"u1"});
  EXPECT_EQ(extract_pairs(make("1", "a", "x", {"b", "c", "b"})).target_ids, (std::vector<std::string>{"b", "c"}));
}

TEST(ExtractPairs, Errors) {
  try {
    extract_pairs(make("1", "a", "x", {"a"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSelfMentionOnly);
  }
  try {
    extract_pairs(make("1", "a", "x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoTargets);
  }
}

namespace {

std::vector<Tweet> timeline_of(const std::string& user, int n) {
  std::vector<Tweet> out;
  for (int i = 0; i < n; ++i) {
    auto t = make(user + "-" + std::to_string(i), user, "t", {}, "2017-01-01T00:00:00Z");
    t.created_at += std::chrono::seconds(60 * i);
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST(BuildContext, TakesNewestK) {
  auto all = timeline_of("a", 250);
  auto t30 = timeline_of("b", 30);
  all.insert(all.end(), t30.begin(), t30.end());
  auto timelines = build_timelines(all);
  auto ctx = build_context(make("x", "a", "@b @c", {"b", "c"}), timelines, 100);
  ASSERT_EQ(ctx.account_context.size(), 100u);
  EXPECT_EQ(ctx.account_context.front().id, "a-249");
  EXPECT_EQ(ctx.account_context.back().id, "a-150");
  EXPECT_EQ(ctx.target_contexts.at("b").size(), 30u);
  EXPECT_TRUE(ctx.target_contexts.at("c").empty());
  EXPECT_EQ(ctx.missing_timelines, std::vector<std::string>{"c"});
}

TEST(BuildContext, NeverLongerThanK) {
  auto timelines = build_timelines(timeline_of("a", 40));
  for (std::size_t k : {1u, 7u, 39u, 40u, 41u, 100u}) {
    auto ctx = build_context(make("x", "b", "@a", {"a"}), timelines, k);
    EXPECT_LE(ctx.target_contexts.at("a").size(), k);
    EXPECT_EQ(ctx.target_contexts.at("a").size(), std::min<std::size_t>(k, 40));
  }
}

TEST(Timeline, DeduplicatesAndOrdersNewestFirst) {
  auto tweets = timeline_of("a", 5);
  tweets.push_back(tweets[2]);
  auto tl = build_timelines(tweets).at("a");
  ASSERT_EQ(tl.size(), 5u);
  for (std::size_t i = 1; i < tl.size(); ++i) EXPECT_GE(tl.tweets()[i - 1].created_at, tl.tweets()[i].created_at);
}

TEST(Timeline, RejectsForeignAuthor) { EXPECT_THROW(Timeline("a", {make("1", "b", "x")}), Error); }
