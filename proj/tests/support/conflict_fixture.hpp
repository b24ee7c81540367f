#pragma once

// Ten labeled contexts over four target profiles with hand-tallied statistics.

#include <string>
#include <vector>

#include "incivil/conflict.hpp"

namespace fixture {

inline incivil::tdsa::EntitySentimentProfile profile(
    const std::string& user, std::map<std::string, incivil::tdsa::SentimentCounts> counts) {
  return {user, std::move(counts)};
}

/// A likes x and dislikes y. T1 dislikes x (1 conflict). T2 agrees on both
/// (2 agreements). T3 flips both (2 conflicts). T0 only talks about z.
inline incivil::conflict::ProfileMap conflict_profiles() {
  incivil::conflict::ProfileMap m;
  m["A"] = profile("A", {{"x", {1, 0, 0}}, {"y", {0, 1, 0}}});
  m["T0"] = profile("T0", {{"z", {1, 0, 0}}});
  m["T1"] = profile("T1", {{"x", {0, 1, 0}}});
  m["T2"] = profile("T2", {{"x", {1, 0, 0}}, {"y", {0, 1, 0}}});
  m["T3"] = profile("T3", {{"x", {0, 1, 0}}, {"y", {1, 0, 0}}});
  return m;
}

struct ConflictCase {
  std::string id;
  std::vector<std::string> targets;
  incivil::corpus::Label label;
};

inline std::vector<ConflictCase> conflict_cases() {
  using incivil::corpus::Label;
  return {{"c01", {"T1"}, Label::kIncivil},       {"c02", {"T3"}, Label::kIncivil},
          {"c03", {"T1", "T2"}, Label::kIncivil}, {"c04", {"T0"}, Label::kIncivil},
          {"c05", {"Tx"}, Label::kIncivil},       {"c06", {"T2"}, Label::kCivil},
          {"c07", {"T0"}, Label::kCivil},         {"c08", {"T2", "T0"}, Label::kCivil},
          {"c09", {"T1"}, Label::kCivil},         {"c10", {"T3", "T2"}, Label::kCivil}};
}

inline std::vector<incivil::corpus::IncivilityContext> conflict_contexts() {
  std::vector<incivil::corpus::IncivilityContext> out;
  for (const auto& c : conflict_cases()) {
    incivil::corpus::IncivilityContext ctx;
    ctx.tweet_id = c.id;
    ctx.account_holder_id = "A";
    ctx.target_ids = c.targets;
    out.push_back(ctx);
  }
  return out;
}

inline std::vector<incivil::corpus::LabeledTweet> conflict_labels() {
  std::vector<incivil::corpus::LabeledTweet> out;
  for (const auto& c : conflict_cases()) out.push_back({c.id, c.label});
  return out;
}

/// Per class: contexts, with_conflict, fraction, conflicts, agreements, mean conflicts, mean agreements, se.
struct ExpectedClass {
  std::size_t contexts, with_conflict;
  double fraction;
  std::int64_t conflicts, agreements;
  double mean_conflicts, mean_agreements, se_agreements;
};

// incivil agreements per incident {0,0,2,0,0}; civil {2,0,2,0,2}.
inline const ExpectedClass kExpectedIncivil{5, 3, 0.6, 4, 2, 0.8, 0.4, 0.4};
inline const ExpectedClass kExpectedCivil{5, 2, 0.4, 3, 6, 0.6, 1.2, 0.48989794855663561};

}  // namespace fixture
