#include <gtest/gtest.h>

#include <random>

#include "incivil/posthoc.hpp"

using namespace incivil;
using namespace incivil::posthoc;

namespace {

corpus::UserProfile user(std::uint64_t followers, std::uint64_t friends) { return {"u", followers, friends, 0}; }

}  // namespace

TEST(Reputation, Examples) {
  EXPECT_EQ(reputation(user(300, 100)), 0.75);
  EXPECT_GT(reputation(user(5000000, 12)), 0.99999);
  try {
    reputation(user(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedReputation);
  }
}

TEST(Reputation, OpenIntervalAndScaleInvariant) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t f = 1 + rng() % 100000, r = 1 + rng() % 100000, c = 1 + rng() % 50;
    const double rep = reputation(user(f, r));
    EXPECT_GT(rep, 0.0);
    EXPECT_LT(rep, 1.0);
    EXPECT_NEAR(reputation(user(c * f, c * r)), rep, 1e-15);
  }
}

TEST(ReputationRatio, Examples) {
  // 0.9 / 0.45
  EXPECT_NEAR(reputation_ratio(user(45, 55), user(90, 10)), 2.0, 1e-15);
  EXPECT_EQ(reputation_ratio(user(7, 3), user(70, 30)), 1.0);
  EXPECT_THROW(reputation_ratio(user(0, 10), user(5, 5)), Error);
  EXPECT_THROW(reputation_ratio(user(5, 5), user(0, 0)), Error);
}

TEST(ReputationRatio, PairTable) {
  struct Row {
    std::uint64_t af, ar, tf, tr;
    double ratio;
  };
  const std::vector<Row> table = {
      {300, 100, 90, 10, 1.2}, {1, 1, 1, 3, 0.5}, {5, 0, 2, 8, 0.2}, {1, 3, 3, 1, 3.0}, {2, 2, 9, 0, 2.0}};
  for (const auto& r : table) EXPECT_NEAR(reputation_ratio(user(r.af, r.ar), user(r.tf, r.tr)), r.ratio, 1e-15);
  std::vector<RatioRow> rows = {{"t1", "a", "b", 0.5, 0.25, 0.5}};
  auto csv = ratio_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tweet_id,account_holder,target,account_reputation,target_reputation,ratio");
}

TEST(Repetition, Examples) {
  EXPECT_TRUE(repetition_histogram({}).account_holders.empty());
  EXPECT_TRUE(repetition_histogram({}).targets.empty());
  auto r = repetition_histogram({{"1", "a", {"x"}}, {"2", "a", {"y"}}, {"3", "a", {"x", "x"}}, {"4", "b", {"y"}}});
  EXPECT_EQ(r.account_holders, (Histogram{{3, 1}}));
  EXPECT_EQ(r.targets, (Histogram{{2, 2}}));
  EXPECT_EQ(r.per_target.at("x"), 2);
}

TEST(Repetition, MatchesCountingOracle) {
  std::mt19937_64 rng(2);
  std::vector<Incident> incidents;
  for (int i = 0; i < 1000; ++i) {
    Incident inc{"t" + std::to_string(i), "a" + std::to_string(rng() % 400), {}};
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t k = 0; k < n; ++k) inc.targets.push_back("u" + std::to_string(rng() % 600));
    incidents.push_back(inc);
  }
  std::map<std::string, std::int64_t> per_a, per_t;
  for (const auto& inc : incidents) {
    ++per_a[inc.account_holder];
    std::set<std::string> seen(inc.targets.begin(), inc.targets.end());
    for (const auto& t : seen) ++per_t[t];
  }
  Histogram ha, ht;
  std::int64_t singletons = 0;
  for (const auto& [_, c] : per_a) c >= 2 ? ++ha[c] : ++singletons;
  for (const auto& [_, c] : per_t)
    if (c >= 2) ++ht[c];
  auto r = repetition_histogram(incidents);
  EXPECT_EQ(r.account_holders, ha);
  EXPECT_EQ(r.targets, ht);
  EXPECT_EQ(r.per_account_holder, per_a);
  EXPECT_EQ(r.per_target, per_t);

  std::int64_t total = singletons;
  for (const auto& [count, users] : r.account_holders) total += count * users;
  EXPECT_EQ(total, 1000);
}

TEST(Repetition, RoleSwaps) {
  auto r = repetition_histogram({{"1", "a", {"b"}}, {"2", "b", {"c"}}, {"3", "d", {"e"}}});
  EXPECT_EQ(role_swaps(r), (std::vector<std::string>{"b"}));
  EXPECT_EQ(histogram_csv(r.account_holders, "tweets").substr(0, 15), "tweets,users\n");
}

TEST(Buckets, Examples) {
  BucketSpec spec({1, 100, 1000});
  auto h = bucket_distribution({50, 500}, spec);
  EXPECT_EQ(h.interval_fractions(), (std::vector<double>{0.5, 0.5}));
  EXPECT_FALSE(h.empty);
  auto e = bucket_distribution({}, spec);
  EXPECT_TRUE(e.empty);
  for (double f : e.fractions) EXPECT_EQ(f, 0.0);
  EXPECT_EQ(spec.bucket_of(100), 2u);
  EXPECT_EQ(spec.bucket_of(0), 0u);
  EXPECT_EQ(spec.bucket_of(1000), 3u);
  EXPECT_THROW(BucketSpec({1, 1}), Error);
  EXPECT_THROW(BucketSpec({5}), Error);
  EXPECT_THROW(bucket_distribution({-1}, spec), Error);
  EXPECT_EQ(BucketSpec().edges().size(), 8u);
}

TEST(Buckets, FractionsSumToOne) {
  std::mt19937_64 rng(3);
  BucketSpec spec;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 50);
    for (auto& x : v) x = static_cast<double>(rng() % 1000000000ULL);
    auto h = bucket_distribution(v, spec);
    double sum = 0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < h.fractions.size(); ++i) {
      sum += h.fractions[i];
      count += h.counts[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_EQ(count, static_cast<std::int64_t>(v.size()));
  }
}

TEST(Categories, Examples) {
  auto lex = CategoryLexicon::parse("Anger: war, violent*\n# comment\n\nReligion: worship*\n");
  auto s = category_scores(text::tokenize("the war was violent"), lex);
  EXPECT_EQ(s.at("Anger"), 0.5);
  EXPECT_EQ(s.at("Religion"), 0.0);
  EXPECT_TRUE(lex.matches("Religion", "worshipping"));
  EXPECT_FALSE(lex.matches("Anger", "warm"));
  EXPECT_TRUE(category_scores(text::tokenize("anything"), CategoryLexicon{}).empty());
  for (const auto& [_, v] : category_scores(text::tokenize(""), lex)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(CategoryLexicon::parse("NoColonHere\n"), Error);
  EXPECT_THROW(CategoryLexicon::parse(": war\n"), Error);
  CategoryLexicon manual;
  EXPECT_THROW(manual.add("A", ""), Error);
  EXPECT_THROW(manual.add("", "war"), Error);
}

TEST(Categories, BoundedAndDoublingInvariant) {
  auto lex = CategoryLexicon::parse("A: war, fight*\nB: love, peace*\nC: the\n");
  const std::vector<std::string> words = {"war", "fighting", "love", "peaceful", "the", "dog", "cat", "ran", "!"};
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (std::size_t i = 0, n = 1 + rng() % 12; i < n; ++i) text += words[rng() % words.size()] + " ";
    auto s = category_scores(text::tokenize(text), lex);
    auto d = category_scores(text::tokenize(text + " " + text), lex);
    for (const auto& [cat, v] : s) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_NEAR(d.at(cat), v, 1e-15);
    }
  }
}

TEST(MeanSe, Values) {
  auto m = mean_se({1, 2, 3, 4});
  EXPECT_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(mean_se({7}).se, 0.0);
  std::map<std::string, std::vector<text::TokenSeq>> by_user = {
      {"a", {text::tokenize("war war"), text::tokenize("dog")}}, {"b", {text::tokenize("war dog")}}};
  auto summary = user_category_summary(by_user, CategoryLexicon::parse("A: war\n"));
  // user a: mean(1, 0) = 0.5; user b: 0.5
  EXPECT_EQ(summary.at("A").mean, 0.5);
  EXPECT_EQ(summary.at("A").se, 0.0);
  EXPECT_EQ(summary.at("A").n, 2u);
}
