#include "incivil/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "json.hpp"

namespace incivil::corpus {

using nlohmann::json;

Timeline::Timeline(std::string user_id, std::vector<Tweet> tweets) : user_id_(std::move(user_id)) {
  for (const auto& t : tweets) {
    if (t.author_id != user_id_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tweet " + t.id + " by '" + t.author_id + "' in timeline of '" + user_id_ + "'");
    }
  }
  std::stable_sort(tweets.begin(), tweets.end(),
                   [](const Tweet& a, const Tweet& b) { return a.created_at > b.created_at; });
  std::set<std::string> seen;
  for (auto& t : tweets) {
    if (seen.insert(t.id).second) tweets_.push_back(std::move(t));
  }
}

TimelineMap build_timelines(const std::vector<Tweet>& tweets) {
  std::map<std::string, std::vector<Tweet>> grouped;
  for (const auto& t : tweets) grouped[t.author_id].push_back(t);
  TimelineMap out;
  for (auto& [user, list] : grouped) out.emplace(user, Timeline(user, std::move(list)));
  return out;
}

Lexicon::Lexicon(const std::map<std::string, int>& entries) {
  for (const auto& [w, s] : entries) add(w, s);
}

void Lexicon::add(std::string_view word, int severity) {
  std::string key = utf8::to_lower(trim(word));
  if (key.empty()) throw Error(ErrorCode::kInvalidArgument, "empty lexicon word");
  for (char32_t cp : utf8::decode(key)) {
    if (utf8::is_space(cp)) throw Error(ErrorCode::kInvalidArgument, "lexicon word contains whitespace: '" + key + "'");
  }
  if (severity != 1 && severity != 2) {
    throw Error(ErrorCode::kInvalidArgument, "invalid severity " + std::to_string(severity) + " for '" + key + "'");
  }
  auto [it, inserted] = entries_.emplace(key, severity);
  if (!inserted) it->second = std::max(it->second, severity);
}

int Lexicon::severity(std::string_view normalized) const {
  auto it = entries_.find(normalized);
  return it == entries_.end() ? 0 : it->second;
}

std::string_view to_string(Label label) {
  return label == Label::kIncivil ? "incivil" : "civil";
}

Label parse_label(std::string_view s) {
  std::string v = utf8::to_lower(trim(s));
  if (v == "incivil") return Label::kIncivil;
  if (v == "civil") return Label::kCivil;
  throw Error(ErrorCode::kParse, "unknown label '" + std::string(s) + "'");
}

std::string normalize_mention(std::string_view handle) {
  std::string_view h = handle;
  if (!h.empty() && h.front() == '@') h.remove_prefix(1);
  return utf8::to_lower(trim(h));
}

std::vector<std::string> extract_mentions(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : split_whitespace(text)) {
    if (tok.size() < 2 || tok.front() != '@') continue;
    // Handles are [A-Za-z0-9_]; anything after the handle (":", "'s", "!") is not part of it.
    std::size_t end = 1;
    while (end < tok.size()) {
      unsigned char c = static_cast<unsigned char>(tok[end]);
      if (std::isalnum(c) || c == '_' || c >= 0x80) {
        ++end;
      } else {
        break;
      }
    }
    if (end == 1) continue;
    std::string m = normalize_mention(std::string_view(tok).substr(0, end));
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::string require_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw Error(ErrorCode::kParse, std::string("missing field '") + field + "'");
  if (!it->is_string()) throw Error(ErrorCode::kParse, std::string("field '") + field + "' is not a string");
  return it->get<std::string>();
}

std::uint64_t require_count(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw Error(ErrorCode::kParse, std::string("missing field '") + field + "'");
  if (!it->is_number_integer()) throw Error(ErrorCode::kParse, std::string("field '") + field + "' is not an integer");
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  auto v = it->get<std::int64_t>();
  if (v < 0) throw Error(ErrorCode::kParse, std::string("field '") + field + "' is negative");
  return static_cast<std::uint64_t>(v);
}

template <typename T, typename ParseLine>
LoadResult<T> parse_jsonl(std::string_view content, ParseLine parse_line) {
  LoadResult<T> result;
  std::size_t nonblank = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    ++line_no;
    if (!trim(line).empty()) {
      ++nonblank;
      try {
        result.records.push_back(parse_line(line));
      } catch (const Error& e) {
        result.errors.push_back({line_no, e.what()});
      } catch (const json::exception& e) {
        result.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
      }
    }
    if (end == content.size()) break;
    start = end + 1;
  }
  if (nonblank > 0 && result.errors.size() * 10 > nonblank) {
    std::ostringstream msg;
    msg << result.errors.size() << " of " << nonblank << " records malformed (first at line "
        << result.errors.front().line << ": " << result.errors.front().message << ")";
    throw Error(ErrorCode::kParse, msg.str());
  }
  return result;
}

}  // namespace

Tweet parse_tweet_json(std::string_view line) {
  json obj = json::parse(line);
  if (!obj.is_object()) throw Error(ErrorCode::kParse, "record is not a JSON object");
  Tweet t;
  t.id = require_string(obj, "id");
  if (t.id.empty()) throw Error(ErrorCode::kParse, "empty tweet id");
  t.author_id = normalize_mention(require_string(obj, "author_id"));
  if (t.author_id.empty()) throw Error(ErrorCode::kParse, "empty author_id");
  t.text = require_string(obj, "text");
  t.created_at = parse_iso8601(require_string(obj, "created_at"));
  if (auto it = obj.find("mentions"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::kParse, "field 'mentions' is not an array");
    for (const auto& m : *it) {
      if (!m.is_string()) throw Error(ErrorCode::kParse, "mention is not a string");
      std::string norm = normalize_mention(m.get<std::string>());
      if (norm.empty()) throw Error(ErrorCode::kParse, "empty mention");
      if (std::find(t.mentions.begin(), t.mentions.end(), norm) == t.mentions.end()) t.mentions.push_back(norm);
    }
  } else {
    t.mentions = extract_mentions(t.text);
  }
  if (auto it = obj.find("in_reply_to"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kParse, "field 'in_reply_to' is not a string");
    t.in_reply_to = it->get<std::string>();
  }
  return t;
}

std::string tweet_to_json(const Tweet& tweet) {
  json obj = json::object();
  obj["id"] = tweet.id;
  obj["author_id"] = tweet.author_id;
  obj["text"] = tweet.text;
  obj["created_at"] = format_iso8601(tweet.created_at);
  obj["mentions"] = tweet.mentions;
  if (tweet.in_reply_to) obj["in_reply_to"] = *tweet.in_reply_to;
  return obj.dump();
}

LoadResult<Tweet> parse_tweets(std::string_view content) {
  return parse_jsonl<Tweet>(content, parse_tweet_json);
}

LoadResult<Tweet> load_tweets(const std::string& path) { return parse_tweets(read_file(path)); }

std::string serialize_tweets(const std::vector<Tweet>& tweets) {
  std::string out;
  for (const auto& t : tweets) {
    out += tweet_to_json(t);
    out += '\n';
  }
  return out;
}

void save_tweets(const std::string& path, const std::vector<Tweet>& tweets) {
  write_file(path, serialize_tweets(tweets));
}

LoadResult<UserProfile> parse_profiles(std::string_view content) {
  return parse_jsonl<UserProfile>(content, [](std::string_view line) {
    json obj = json::parse(line);
    if (!obj.is_object()) throw Error(ErrorCode::kParse, "record is not a JSON object");
    UserProfile p;
    p.user_id = normalize_mention(require_string(obj, "user_id"));
    if (p.user_id.empty()) throw Error(ErrorCode::kParse, "empty user_id");
    p.followers_count = require_count(obj, "followers_count");
    p.friends_count = require_count(obj, "friends_count");
    p.statuses_count = require_count(obj, "statuses_count");
    return p;
  });
}

LoadResult<UserProfile> load_profiles(const std::string& path) { return parse_profiles(read_file(path)); }

Lexicon parse_lexicon(std::string_view content) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    std::string word = trim(cols[0]);
    int sev = 1;
    if (cols.size() >= 2 && !trim(cols[1]).empty()) {
      std::string s = trim(cols[1]);
      if (s != "1" && s != "2") {
        throw Error(ErrorCode::kParse, "lexicon line " + std::to_string(line_no) + ": invalid severity '" + s + "'");
      }
      sev = s[0] - '0';
    }
    if (word.empty()) throw Error(ErrorCode::kParse, "lexicon line " + std::to_string(line_no) + ": empty word");
    try {
      lex.add(word, sev);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

Lexicon load_lexicon(const std::string& path) { return parse_lexicon(read_file(path)); }

std::vector<LabeledTweet> parse_labels(std::string_view content) {
  std::vector<LabeledTweet> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (!header_seen) {
      if (cols.size() < 2 || trim(cols[0]) != "tweet_id" || trim(cols[1]) != "label") {
        throw Error(ErrorCode::kParse, "label file must start with header 'tweet_id,label'");
      }
      header_seen = true;
      continue;
    }
    if (cols.size() < 2) throw Error(ErrorCode::kParse, "label line " + std::to_string(line_no) + ": expected 2 columns");
    try {
      out.push_back({trim(cols[0]), parse_label(cols[1])});
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "label line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LabeledTweet> load_labels(const std::string& path) { return parse_labels(read_file(path)); }

std::string serialize_labels(const std::vector<LabeledTweet>& labels) {
  std::string out = "tweet_id,label\n";
  for (const auto& l : labels) {
    out += l.tweet_id;
    out += ',';
    out += to_string(l.label);
    out += '\n';
  }
  return out;
}

std::vector<std::string> filter_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& raw : split_whitespace(text)) {
    std::string t = utf8::to_lower(strip_punct(raw));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Tweet> offensive_filter(const std::vector<Tweet>& tweets, const Lexicon& lexicon) {
  std::vector<Tweet> out;
  for (const auto& t : tweets) {
    auto toks = filter_tokens(t.text);
    if (std::any_of(toks.begin(), toks.end(), [&](const std::string& w) { return lexicon.contains(w); })) {
      out.push_back(t);
    }
  }
  return out;
}

std::vector<Tweet> mention_filter(const std::vector<Tweet>& tweets) {
  std::vector<Tweet> out;
  std::copy_if(tweets.begin(), tweets.end(), std::back_inserter(out),
               [](const Tweet& t) { return !t.mentions.empty(); });
  return out;
}

AccountTargets extract_pairs(const Tweet& tweet) {
  if (tweet.mentions.empty()) throw Error(ErrorCode::kNoTargets, "tweet " + tweet.id + " has no mentions");
  AccountTargets out;
  out.account_holder_id = tweet.author_id;
  const std::string self = normalize_mention(tweet.author_id);
  for (const auto& m : tweet.mentions) {
    std::string norm = normalize_mention(m);
    if (norm == self) continue;
    if (std::find(out.target_ids.begin(), out.target_ids.end(), norm) == out.target_ids.end()) {
      out.target_ids.push_back(std::move(norm));
    }
  }
  if (out.target_ids.empty()) {
    throw Error(ErrorCode::kSelfMentionOnly, "tweet " + tweet.id + " only mentions its author");
  }
  return out;
}

IncivilityContext build_context(const Tweet& tweet, const TimelineMap& timelines, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "context size k must be positive");
  auto pairs = extract_pairs(tweet);
  IncivilityContext ctx;
  ctx.tweet_id = tweet.id;
  ctx.account_holder_id = pairs.account_holder_id;
  ctx.target_ids = pairs.target_ids;
  auto slice = [&](const std::string& user) {
    auto it = timelines.find(user);
    if (it == timelines.end()) {
      ctx.missing_timelines.push_back(user);
      return std::vector<Tweet>{};
    }
    const auto& tw = it->second.tweets();
    return std::vector<Tweet>(tw.begin(), tw.begin() + static_cast<std::ptrdiff_t>(std::min(k, tw.size())));
  };
  ctx.account_context = slice(ctx.account_holder_id);
  for (const auto& target : ctx.target_ids) ctx.target_contexts[target] = slice(target);
  return ctx;
}

}  // namespace incivil::corpus
