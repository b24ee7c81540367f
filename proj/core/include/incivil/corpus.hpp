#pragma once

// Corpus data model, file ingestion, the offensive-word and mention filters,
// and incivility-context construction.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "incivil/util.hpp"

namespace incivil::corpus {

struct Tweet {
  std::string id;
  std::string author_id;
  std::string text;
  Timestamp created_at{};
  std::vector<std::string> mentions;
  std::optional<std::string> in_reply_to;

  bool operator==(const Tweet&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::uint64_t followers_count = 0;
  std::uint64_t friends_count = 0;
  std::uint64_t statuses_count = 0;
};

/// Tweets of one user ordered newest-first, unique by id.
class Timeline {
 public:
  Timeline() = default;
  /// Sorts newest-first (stable on ties) and drops duplicate ids.
  /// Throws if a tweet has a different author.
  Timeline(std::string user_id, std::vector<Tweet> tweets);

  const std::string& user_id() const { return user_id_; }
  const std::vector<Tweet>& tweets() const { return tweets_; }
  std::size_t size() const { return tweets_.size(); }

 private:
  std::string user_id_;
  std::vector<Tweet> tweets_;
};

using TimelineMap = std::map<std::string, Timeline>;

/// Groups tweets by author into timelines.
TimelineMap build_timelines(const std::vector<Tweet>& tweets);

/// Offensive words with severity in {1, 2}.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(const std::map<std::string, int>& entries);

  /// Adds a word (normalized to lowercase); duplicates keep the max severity.
  void add(std::string_view word, int severity);
  /// Severity of a normalized token, or 0 when absent.
  int severity(std::string_view normalized) const;
  bool contains(std::string_view normalized) const { return severity(normalized) > 0; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, int, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, int, std::less<>> entries_;
};

enum class Label { kCivil, kIncivil };

std::string_view to_string(Label label);
Label parse_label(std::string_view s);

struct LabeledTweet {
  std::string tweet_id;
  Label label = Label::kCivil;
};

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct LoadResult {
  std::vector<T> records;
  std::vector<RecordError> errors;
};

/// Strips a leading '@' and lowercases.
std::string normalize_mention(std::string_view handle);
/// Mentions auto-extracted from '@' tokens, normalized, de-duplicated in order.
std::vector<std::string> extract_mentions(std::string_view text);

/// Parses one JSON line into a Tweet. Throws Error(kParse).
Tweet parse_tweet_json(std::string_view line);
std::string tweet_to_json(const Tweet& tweet);

/// Loads JSONL tweets. Malformed lines are reported per line; more than 10%
/// malformed lines makes the whole file fail with Error(kParse).
LoadResult<Tweet> load_tweets(const std::string& path);
LoadResult<Tweet> parse_tweets(std::string_view content);
void save_tweets(const std::string& path, const std::vector<Tweet>& tweets);
std::string serialize_tweets(const std::vector<Tweet>& tweets);

LoadResult<UserProfile> load_profiles(const std::string& path);
LoadResult<UserProfile> parse_profiles(std::string_view content);

/// `word<TAB>severity` per line, severity optional (default 1).
/// Throws Error(kParse) naming the offending line.
Lexicon load_lexicon(const std::string& path);
Lexicon parse_lexicon(std::string_view content);

/// `tweet_id,label` CSV with header.
std::vector<LabeledTweet> load_labels(const std::string& path);
std::vector<LabeledTweet> parse_labels(std::string_view content);
std::string serialize_labels(const std::vector<LabeledTweet>& labels);

/// Tokens used for lexicon matching: whitespace split, leading/trailing
/// punctuation stripped, lowercased, empty pieces dropped.
std::vector<std::string> filter_tokens(std::string_view text);

/// Keeps tweets with at least one lexicon token; order preserved.
std::vector<Tweet> offensive_filter(const std::vector<Tweet>& tweets, const Lexicon& lexicon);
/// Keeps tweets with at least one mention; order preserved.
std::vector<Tweet> mention_filter(const std::vector<Tweet>& tweets);

struct AccountTargets {
  std::string account_holder_id;
  std::vector<std::string> target_ids;
};

/// Account holder is the author; targets are the mentions minus the author.
/// Throws Error(kNoTargets) / Error(kSelfMentionOnly).
AccountTargets extract_pairs(const Tweet& tweet);

struct IncivilityContext {
  std::string tweet_id;
  std::string account_holder_id;
  std::vector<std::string> target_ids;
  std::vector<Tweet> account_context;
  std::map<std::string, std::vector<Tweet>> target_contexts;
  /// Users whose timeline was missing (context left empty).
  std::vector<std::string> missing_timelines;
};

inline constexpr std::size_t kDefaultContextSize = 100;

IncivilityContext build_context(const Tweet& tweet, const TimelineMap& timelines,
                                std::size_t k = kDefaultContextSize);

}  // namespace incivil::corpus
