#pragma once

// Hand-tallied feature values for fixtures/features20.jsonl against
// fixtures/lexicon.tsv (idiot 1, moron 2, die 1, f**k 2, loser 1).

#include <array>
#include <string>
#include <vector>

namespace fixture {

struct FeatureRow {
  const char* id;
  const char* text;
  const char* created_at;
  std::array<double, 5> content;
  std::array<double, 10> textual;
};

inline const std::vector<FeatureRow>& feature_rows() {
  static const std::vector<FeatureRow> rows = {
      {"f01", "you idiot", "2017-08-01T14:30:00Z", {2, 1, 1, 14, 0}, {2, 9, 1, 4.5, 2, 0.5, 0, 0, 0, 0}},
      {"f02", "Please don't die.", "2017-08-01T02:05:00Z", {3, 1, 1, 2, 1}, {3, 17, 1, 17.0 / 3, 3, 1.0 / 3, 1, 2, 0, 0}},
      {"f03", "", "2017-08-01T00:00:00Z", {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
      {"f04", "You idiot!", "2017-08-01T09:00:00Z", {2, 1, 1, 9, 0}, {2, 10, 1, 5, 2, 0.5, 1, 1, 0, 0}},
      {"f05", "Go. Stop.", "2017-08-01T23:59:00Z", {2, 0, 0, 23, 0}, {2, 9, 2, 4.5, 1, 0, 1, 1, 0, 0}},
      {"f06", "@bob you MORON!!", "2017-08-01T18:45:00Z", {3, 1, 2, 18, 0},
       {3, 16, 1, 16.0 / 3, 3, 1.0 / 3, 5, 3, 0, 1.0 / 3}},
      {"f07", "f**k you idiot", "2017-08-01T12:00:00Z", {3, 2, 3, 12, 0}, {3, 14, 1, 14.0 / 3, 3, 2.0 / 3, 0, 2, 0, 0}},
      {"f08", "you idiot idiot", "2017-08-01T07:15:00Z", {3, 2, 2, 7, 0}, {3, 15, 1, 5, 3, 2.0 / 3, 0, 0, 0, 0}},
      {"f09", "nice day", "2017-08-01T10:00:00Z", {2, 0, 0, 10, 0}, {2, 8, 1, 4, 2, 0, 0, 0, 0, 0}},
      {"f10", "Read this http://x.co/a now", "2017-08-01T15:20:00Z", {4, 0, 0, 15, 0},
       {4, 27, 2, 6.75, 2, 0, 0.5, 2.5, 0.25, 0}},
      {"f11", "@a @b die die DIE", "2017-08-01T01:00:00Z", {5, 3, 3, 1, 0}, {5, 17, 1, 3.4, 5, 0.6, 3, 2, 0, 0.4}},
      {"f12", "I will never call you a loser", "2017-08-01T20:00:00Z", {7, 1, 1, 20, 0},
       {7, 29, 1, 29.0 / 7, 7, 1.0 / 7, 1, 0, 0, 0}},
      {"f13", "never a loser", "2017-08-01T21:00:00Z", {3, 1, 1, 21, 1}, {3, 13, 1, 13.0 / 3, 3, 1.0 / 3, 0, 0, 0, 0}},
      {"f14", "What?! Really... ok", "2017-08-01T05:30:00Z", {3, 0, 0, 5, 0},
       {3, 19, 3, 19.0 / 3, 1, 0, 2.0 / 3, 5.0 / 3, 0, 0}},
      {"f15", "!!!", "2017-08-01T11:00:00Z", {0, 0, 0, 11, 0}, {0, 3, 1, 0, 0, 0, 0, 3, 0, 0}},
      {"f16", "Don't be a MORON, @Sam", "2017-08-01T16:00:00Z", {5, 1, 2, 16, 1}, {5, 22, 1, 4.4, 5, 0.2, 7, 3, 0, 0.2}},
      {"f17", "Loser.", "2017-08-01T03:00:00Z", {1, 1, 1, 3, 0}, {1, 6, 1, 6, 1, 1, 1, 1, 0, 0}},
      {"f18", "www.site.com is great", "2017-08-01T13:00:00Z", {3, 0, 0, 13, 0},
       {3, 21, 3, 7, 1, 0, 0, 2.0 / 3, 1.0 / 3, 0}},
      {"f19", "no no no die", "2017-08-01T08:00:00Z", {4, 1, 1, 8, 1}, {4, 12, 1, 3, 4, 0.25, 0, 0, 0, 0}},
      {"f20", "not a very bad big die", "2017-08-01T22:00:00Z", {6, 1, 1, 22, 0},
       {6, 22, 1, 22.0 / 6, 6, 1.0 / 6, 0, 0, 0, 0}},
  };
  return rows;
}

/// Indices of the ratio columns in the textual vector; the rest are integers.
inline constexpr std::array<std::size_t, 7> kTextualRatioColumns = {3, 4, 5, 6, 7, 8, 9};

}  // namespace fixture
