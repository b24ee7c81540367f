#include <gtest/gtest.h>

#include <random>

#include "incivil/conflict.hpp"
#include "support/conflict_fixture.hpp"

using namespace incivil;
using namespace incivil::conflict;
using tdsa::EntitySentimentProfile;
using tdsa::SentimentCounts;

namespace {

int oracle_sign(const SentimentCounts& c) { return c.positive > c.negative ? 1 : c.negative > c.positive ? -1 : 0; }

std::pair<std::int64_t, std::int64_t> oracle_counts(const EntitySentimentProfile& a, const EntitySentimentProfile& t) {
  std::int64_t conflicts = 0, agreements = 0;
  for (const auto& [ea, ca] : a.counts)
    for (const auto& [et, ct] : t.counts) {
      if (ea != et) continue;
      const int sa = oracle_sign(ca), st = oracle_sign(ct);
      if (sa == 0 || st == 0) continue;
      (sa == st ? agreements : conflicts) += 1;
    }
  return {conflicts, agreements};
}

EntitySentimentProfile random_profile(const std::string& user, std::mt19937_64& rng) {
  EntitySentimentProfile p{user, {}};
  const std::size_t n = rng() % 8;
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = p.counts["e" + std::to_string(rng() % 10)];
    c.positive = static_cast<std::int64_t>(rng() % 5);
    c.negative = static_cast<std::int64_t>(rng() % 5);
    c.neutral = static_cast<std::int64_t>(rng() % 3);
  }
  return p;
}

corpus::IncivilityContext context(const std::string& holder, std::vector<std::string> targets) {
  corpus::IncivilityContext c;
  c.tweet_id = "t";
  c.account_holder_id = holder;
  c.target_ids = std::move(targets);
  return c;
}

}  // namespace

TEST(AggregateSign, Examples) {
  EXPECT_EQ(aggregate_sign({8, 2, 0}), OpinionSign::kPositive);
  EXPECT_EQ(aggregate_sign({4, 16, 0}), OpinionSign::kNegative);
  EXPECT_EQ(aggregate_sign({3, 3, 5}), OpinionSign::kNeutral);
  EXPECT_EQ(aggregate_sign({0, 0, 0}), OpinionSign::kNeutral);
}

TEST(CountConflicts, WorkedExample) {
  auto r = count_conflicts({"A", {{"trump", {4, 16, 0}}}}, {"T", {{"trump", {8, 2, 0}}}});
  EXPECT_EQ(r.conflicts, 1);
  EXPECT_EQ(r.agreements, 0);
  EXPECT_EQ(r.account_holder_id, "A");
  EXPECT_EQ(r.target_id, "T");
  EXPECT_EQ(r.per_entity.at("trump"), std::make_pair(OpinionSign::kNegative, OpinionSign::kPositive));
}

TEST(CountConflicts, DisjointEntities) {
  auto r = count_conflicts({"A", {{"x", {1, 0, 0}}}}, {"T", {{"y", {0, 1, 0}}}});
  EXPECT_EQ(r.conflicts, 0);
  EXPECT_EQ(r.agreements, 0);
  EXPECT_TRUE(r.per_entity.empty());
}

TEST(CountConflicts, MatchesEnumerationOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = random_profile("A", rng), t = random_profile("T", rng);
    auto r = count_conflicts(a, t);
    auto [c, g] = oracle_counts(a, t);
    EXPECT_EQ(r.conflicts, c);
    EXPECT_EQ(r.agreements, g);
  }
}

TEST(CountConflicts, Properties) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_profile("A", rng), t = random_profile("T", rng);
    auto r = count_conflicts(a, t);
    auto swapped = count_conflicts(t, a);
    EXPECT_EQ(r.conflicts, swapped.conflicts);
    EXPECT_EQ(r.agreements, swapped.agreements);
    std::size_t common = 0;
    for (const auto& [e, _] : a.counts) common += t.counts.count(e);
    EXPECT_LE(static_cast<std::size_t>(r.conflicts + r.agreements), common);

    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 7);
    auto scale = [k](EntitySentimentProfile p) {
      for (auto& [_, c] : p.counts) {
        c.positive *= k;
        c.negative *= k;
        c.neutral *= k;
      }
      return p;
    };
    auto scaled = count_conflicts(scale(a), scale(t));
    EXPECT_EQ(scaled.conflicts, r.conflicts);
    EXPECT_EQ(scaled.agreements, r.agreements);
    EXPECT_EQ(scaled.per_entity, r.per_entity);
  }
}

TEST(ConflictFeature, Examples) {
  ProfileMap m;
  m["A"] = {"A", {{"trump", {4, 16, 0}}, {"x", {1, 0, 0}}, {"y", {1, 0, 0}}}};
  m["T1"] = {"T1", {{"trump", {8, 2, 0}}}};
  m["T2"] = {"T2", {{"trump", {8, 2, 0}}, {"x", {0, 1, 0}}}};
  m["T3"] = {"T3", {{"trump", {8, 2, 0}}, {"x", {0, 1, 0}}, {"y", {0, 2, 0}}}};
  EXPECT_EQ(conflict_feature(context("A", {"T1"}), m), 1);
  EXPECT_EQ(conflict_feature(context("A", {"T2", "T3"}), m), 5);
  EXPECT_EQ(conflict_feature(context("A", {"nobody", "ghost"}), m), 0);
  EXPECT_EQ(conflict_feature(context("A", {}), m), 0);
  try {
    conflict_feature(context("missing", {"T1"}), m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInput);
  }
  auto reports = context_reports(context("A", {"T2", "ghost", "T3"}), m);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].target_id, "T2");
  EXPECT_EQ(reports[1].conflicts, 3);
}

TEST(ConflictFeature, MonotoneInNewConflicts) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    ProfileMap m;
    m["A"] = random_profile("A", rng);
    m["A"].counts["fresh"] = {3, 0, 0};
    m["T"] = random_profile("T", rng);
    m["T"].counts.erase("fresh");
    const auto before = conflict_feature(context("A", {"T"}), m);
    m["T"].counts["fresh"] = {0, 2, 1};
    EXPECT_EQ(conflict_feature(context("A", {"T"}), m), before + 1);
  }
}

TEST(ConflictStatistics, TenContextHandTally) {
  auto stats = conflict_statistics(fixture::conflict_contexts(), fixture::conflict_labels(), fixture::conflict_profiles());
  ASSERT_TRUE(stats.civil && stats.incivil);
  auto check = [](const ClassStatistics& s, const fixture::ExpectedClass& e) {
    EXPECT_EQ(s.contexts, e.contexts);
    EXPECT_EQ(s.with_conflict, e.with_conflict);
    EXPECT_NEAR(s.fraction_with_conflict, e.fraction, 1e-15);
    EXPECT_EQ(s.total_conflicts, e.conflicts);
    EXPECT_EQ(s.total_agreements, e.agreements);
    EXPECT_NEAR(s.mean_conflicts, e.mean_conflicts, 1e-15);
    EXPECT_NEAR(s.mean_agreements, e.mean_agreements, 1e-15);
    EXPECT_NEAR(s.se_agreements, e.se_agreements, 1e-12);
  };
  check(*stats.incivil, fixture::kExpectedIncivil);
  check(*stats.civil, fixture::kExpectedCivil);
  auto csv = stats.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "class,contexts,with_conflict,fraction_with_conflict,total_conflicts,total_agreements,mean_conflicts,"
            "mean_agreements,se_agreements");
  EXPECT_NE(csv.find("\nincivil,5,3,"), std::string::npos);
}

TEST(ConflictStatistics, EveryIncivilContextConflicts) {
  auto contexts = fixture::conflict_contexts();
  std::vector<corpus::LabeledTweet> labels;
  std::vector<corpus::IncivilityContext> chosen;
  for (const auto& c : contexts)
    if (c.target_ids == std::vector<std::string>{"T1"}) {
      chosen.push_back(c);
      labels.push_back({c.tweet_id, corpus::Label::kIncivil});
    }
  auto stats = conflict_statistics(chosen, labels, fixture::conflict_profiles());
  ASSERT_TRUE(stats.incivil);
  EXPECT_EQ(stats.incivil->fraction_with_conflict, 1.0);
  EXPECT_FALSE(stats.civil);
  EXPECT_EQ(stats.to_csv().find("\ncivil"), std::string::npos);
  EXPECT_NE(stats.metadata_json().find("\"civil\""), std::string::npos);
}

TEST(ConflictStatistics, UnlabeledContextRejected) {
  EXPECT_THROW(conflict_statistics(fixture::conflict_contexts(), {}, fixture::conflict_profiles()), Error);
}

TEST(ConflictCsv, FeatureRoundTrip) {
  std::vector<std::pair<std::string, std::int64_t>> rows = {{"a", 0}, {"b", 7}};
  auto back = parse_feature_csv(feature_csv(rows));
  EXPECT_EQ(back.at("a"), 0);
  EXPECT_EQ(back.at("b"), 7);
  EXPECT_THROW(parse_feature_csv("id,count\na,1\n"), Error);
  EXPECT_THROW(parse_feature_csv("tweet_id,conflict_count\na,-1\n"), Error);
  ConflictReport r{"A", "T", 2, 1, {}};
  EXPECT_EQ(reports_to_csv({{"t9", r}}), "tweet_id,account_holder,target,conflicts,agreements\nt9,A,T,2,1\n");
}
