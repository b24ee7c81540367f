#pragma once

// Post-hoc analytics over predicted incidents: reputation, repetition,
// bucketed distributions and category-lexicon scoring.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "incivil/corpus.hpp"
#include "incivil/text.hpp"

namespace incivil::posthoc {

/// followers / (followers + friends). Throws Error(kUndefinedReputation) when both are zero.
double reputation(const corpus::UserProfile& profile);

/// reputation(target) / reputation(account). Throws Error(kUndefinedReputation)
/// when either is undefined or the account reputation is 0.
double reputation_ratio(const corpus::UserProfile& account, const corpus::UserProfile& target);

struct Incident {
  std::string tweet_id;
  std::string account_holder;
  std::vector<std::string> targets;
};

/// count -> number of users with that count; only counts >= 2 appear.
using Histogram = std::map<std::int64_t, std::int64_t>;

struct RepetitionReport {
  Histogram account_holders;
  Histogram targets;
  std::map<std::string, std::int64_t> per_account_holder;
  std::map<std::string, std::int64_t> per_target;
};

/// A target mentioned in m incidents counts m; duplicate targets within one
/// incident count once.
RepetitionReport repetition_histogram(const std::vector<Incident>& incidents);

/// Users that appear both as an account holder and as a target.
std::vector<std::string> role_swaps(const RepetitionReport& report);

/// Half-open buckets [e_i, e_{i+1}); values below the first edge go to an
/// underflow bucket and values at or above the last edge to an overflow bucket.
class BucketSpec {
 public:
  /// 1, 100, 1k, 10k, 100k, 1M, 10M, 100M.
  BucketSpec();
  /// Throws Error(kInvalidArgument) unless edges are strictly increasing (at least 2).
  explicit BucketSpec(std::vector<double> edges);

  const std::vector<double>& edges() const { return edges_; }
  /// underflow, one per interval, overflow.
  std::size_t bucket_count() const { return edges_.size() + 1; }
  std::size_t bucket_of(double v) const;
  std::vector<std::string> labels() const;

 private:
  std::vector<double> edges_;
};

struct BucketHistogram {
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;
  std::vector<double> fractions;
  bool empty = true;

  /// Fractions of the interval buckets only (underflow and overflow dropped).
  std::vector<double> interval_fractions() const;
};

/// Throws Error(kInvalidArgument) on negative or non-finite values.
BucketHistogram bucket_distribution(const std::vector<double>& values, const BucketSpec& spec);

/// Category -> patterns; a trailing '*' matches any token with that prefix.
class CategoryLexicon {
 public:
  /// `Category: word1, word2, stem*` per line; blank lines and '#' comments skipped.
  static CategoryLexicon parse(std::string_view text);
  static CategoryLexicon load(const std::string& path);

  /// Throws Error(kInvalidArgument) for empty names or patterns.
  void add(const std::string& category, const std::string& pattern);
  bool matches(const std::string& category, std::string_view token) const;
  const std::map<std::string, std::vector<std::string>>& categories() const { return categories_; }

 private:
  std::map<std::string, std::vector<std::string>> categories_;
};

/// Tokens used for category scoring: words of the text with punctuation-only tokens dropped, lowercased.
std::vector<std::string> scoring_tokens(const text::TokenSeq& tokens);

/// Matched-token count over total tokens per category; 0 for empty text.
std::map<std::string, double> category_scores(const text::TokenSeq& tokens, const CategoryLexicon& lexicon);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Mean with standard error (sample sd / sqrt(n); 0 when n < 2).
MeanSe mean_se(const std::vector<double>& values);

/// Per category: mean over users of each user's mean tweet score.
std::map<std::string, MeanSe> user_category_summary(const std::map<std::string, std::vector<text::TokenSeq>>& texts_by_user,
                                                    const CategoryLexicon& lexicon);

std::string histogram_csv(const Histogram& h, const std::string& count_column);
std::string bucket_csv(const std::map<std::string, BucketHistogram>& groups);
std::string category_csv(const std::map<std::string, std::map<std::string, MeanSe>>& groups);

struct RatioRow {
  std::string tweet_id;
  std::string account_holder;
  std::string target;
  double account_reputation = 0.0;
  double target_reputation = 0.0;
  double ratio = 0.0;
};

std::string ratio_csv(const std::vector<RatioRow>& rows);

}  // namespace incivil::posthoc
