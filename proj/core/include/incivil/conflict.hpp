#pragma once

// Opinion aggregation per (user, entity) and conflict / agreement counting
// between an account holder and the users it mentions.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "incivil/corpus.hpp"
#include "incivil/tdsa.hpp"

namespace incivil::conflict {

enum class OpinionSign { kPositive, kNegative, kNeutral };

std::string_view to_string(OpinionSign s);

/// Strict majority of positive over negative counts; ties are neutral.
OpinionSign aggregate_sign(const tdsa::SentimentCounts& counts);

struct ConflictReport {
  std::string account_holder_id;
  std::string target_id;
  std::int64_t conflicts = 0;
  std::int64_t agreements = 0;
  /// Every shared entity with (sign of A, sign of T).
  std::map<std::string, std::pair<OpinionSign, OpinionSign>> per_entity;
};

ConflictReport count_conflicts(const tdsa::EntitySentimentProfile& a, const tdsa::EntitySentimentProfile& t);

using ProfileMap = std::map<std::string, tdsa::EntitySentimentProfile>;

/// Sum of conflicts between the account holder and every target. Targets
/// without a profile contribute 0; a missing account-holder profile throws
/// Error(kMissingInput).
std::int64_t conflict_feature(const corpus::IncivilityContext& context, const ProfileMap& profiles);

/// One report per target that has a profile, in target order.
std::vector<ConflictReport> context_reports(const corpus::IncivilityContext& context, const ProfileMap& profiles);

struct ClassStatistics {
  corpus::Label label = corpus::Label::kCivil;
  std::size_t contexts = 0;
  std::size_t with_conflict = 0;
  double fraction_with_conflict = 0.0;
  std::int64_t total_conflicts = 0;
  std::int64_t total_agreements = 0;
  double mean_conflicts = 0.0;
  double mean_agreements = 0.0;
  /// Standard error of the per-incident agreement count (0 for one incident).
  double se_agreements = 0.0;
};

struct ConflictStatistics {
  /// Classes with no contexts are absent.
  std::optional<ClassStatistics> civil;
  std::optional<ClassStatistics> incivil;

  std::string to_csv() const;
  /// Sidecar describing the columns, including the note that the share of
  /// conflicts among "all sentiments" has no single denominator.
  std::string metadata_json() const;
};

/// Throws Error(kInvalidArgument) when a context has no label.
ConflictStatistics conflict_statistics(const std::vector<corpus::IncivilityContext>& contexts,
                                       const std::vector<corpus::LabeledTweet>& labels, const ProfileMap& profiles);

/// `tweet_id,account_holder,target,conflicts,agreements` with header.
std::string reports_to_csv(const std::vector<std::pair<std::string, ConflictReport>>& rows);

/// `tweet_id,conflict_count` CSV with header.
std::string feature_csv(const std::vector<std::pair<std::string, std::int64_t>>& rows);
std::map<std::string, std::int64_t> parse_feature_csv(std::string_view csv);
std::map<std::string, std::int64_t> load_feature_csv(const std::string& path);

}  // namespace incivil::conflict
