#include "incivil/conflict.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace incivil::conflict {

std::string_view to_string(OpinionSign s) {
  switch (s) {
    case OpinionSign::kPositive: return "positive";
    case OpinionSign::kNegative: return "negative";
    case OpinionSign::kNeutral: return "neutral";
  }
  return "neutral";
}

OpinionSign aggregate_sign(const tdsa::SentimentCounts& c) {
  if (c.positive < 0 || c.negative < 0 || c.neutral < 0)
    throw Error(ErrorCode::kInvalidArgument, "sentiment counts must be non-negative");
  if (c.positive > c.negative) return OpinionSign::kPositive;
  if (c.negative > c.positive) return OpinionSign::kNegative;
  return OpinionSign::kNeutral;
}

ConflictReport count_conflicts(const tdsa::EntitySentimentProfile& a, const tdsa::EntitySentimentProfile& t) {
  ConflictReport r;
  r.account_holder_id = a.user_id;
  r.target_id = t.user_id;
  auto ia = a.counts.begin();
  auto it = t.counts.begin();
  while (ia != a.counts.end() && it != t.counts.end()) {
    if (ia->first < it->first) {
      ++ia;
    } else if (it->first < ia->first) {
      ++it;
    } else {
      OpinionSign sa = aggregate_sign(ia->second), st = aggregate_sign(it->second);
      r.per_entity[ia->first] = {sa, st};
      if (sa != OpinionSign::kNeutral && st != OpinionSign::kNeutral) {
        if (sa == st)
          ++r.agreements;
        else
          ++r.conflicts;
      }
      ++ia;
      ++it;
    }
  }
  return r;
}

namespace {

const tdsa::EntitySentimentProfile& holder_profile(const corpus::IncivilityContext& ctx, const ProfileMap& profiles) {
  auto it = profiles.find(ctx.account_holder_id);
  if (it == profiles.end()) {
    throw Error(ErrorCode::kMissingInput,
                "no sentiment profile for account holder '" + ctx.account_holder_id + "' of tweet " + ctx.tweet_id);
  }
  return it->second;
}

}  // namespace

std::vector<ConflictReport> context_reports(const corpus::IncivilityContext& context, const ProfileMap& profiles) {
  const auto& a = holder_profile(context, profiles);
  std::vector<ConflictReport> out;
  for (const auto& target : context.target_ids) {
    auto it = profiles.find(target);
    if (it != profiles.end()) out.push_back(count_conflicts(a, it->second));
  }
  return out;
}

std::int64_t conflict_feature(const corpus::IncivilityContext& context, const ProfileMap& profiles) {
  std::int64_t total = 0;
  for (const auto& r : context_reports(context, profiles)) total += r.conflicts;
  return total;
}

ConflictStatistics conflict_statistics(const std::vector<corpus::IncivilityContext>& contexts,
                                       const std::vector<corpus::LabeledTweet>& labels, const ProfileMap& profiles) {
  std::map<std::string, corpus::Label> label_of;
  for (const auto& l : labels) label_of[l.tweet_id] = l.label;

  std::map<corpus::Label, std::vector<std::pair<std::int64_t, std::int64_t>>> per_class;
  for (const auto& ctx : contexts) {
    auto it = label_of.find(ctx.tweet_id);
    if (it == label_of.end()) throw Error(ErrorCode::kInvalidArgument, "no label for tweet " + ctx.tweet_id);
    std::int64_t c = 0, a = 0;
    for (const auto& r : context_reports(ctx, profiles)) {
      c += r.conflicts;
      a += r.agreements;
    }
    per_class[it->second].emplace_back(c, a);
  }

  auto summarize = [](corpus::Label label, const std::vector<std::pair<std::int64_t, std::int64_t>>& rows) {
    ClassStatistics s;
    s.label = label;
    s.contexts = rows.size();
    for (const auto& [c, a] : rows) {
      if (c >= 1) ++s.with_conflict;
      s.total_conflicts += c;
      s.total_agreements += a;
    }
    const double n = static_cast<double>(rows.size());
    s.fraction_with_conflict = static_cast<double>(s.with_conflict) / n;
    s.mean_conflicts = static_cast<double>(s.total_conflicts) / n;
    s.mean_agreements = static_cast<double>(s.total_agreements) / n;
    if (rows.size() > 1) {
      double ss = 0.0;
      for (const auto& row : rows) {
        const double d = static_cast<double>(row.second) - s.mean_agreements;
        ss += d * d;
      }
      s.se_agreements = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
  };

  ConflictStatistics out;
  if (auto it = per_class.find(corpus::Label::kCivil); it != per_class.end())
    out.civil = summarize(corpus::Label::kCivil, it->second);
  if (auto it = per_class.find(corpus::Label::kIncivil); it != per_class.end())
    out.incivil = summarize(corpus::Label::kIncivil, it->second);
  return out;
}

std::string ConflictStatistics::to_csv() const {
  std::ostringstream out;
  out << "class,contexts,with_conflict,fraction_with_conflict,total_conflicts,total_agreements,mean_conflicts,"
         "mean_agreements,se_agreements\n";
  for (const auto* s : {&civil, &incivil}) {
    if (!*s) continue;
    const auto& c = **s;
    out << corpus::to_string(c.label) << ',' << c.contexts << ',' << c.with_conflict << ','
        << format_double(c.fraction_with_conflict) << ',' << c.total_conflicts << ',' << c.total_agreements << ','
        << format_double(c.mean_conflicts) << ',' << format_double(c.mean_agreements) << ','
        << format_double(c.se_agreements) << '\n';
  }
  return out.str();
}

std::string ConflictStatistics::metadata_json() const {
  nlohmann::ordered_json j;
  j["columns"] = {"class", "contexts", "with_conflict", "fraction_with_conflict", "total_conflicts",
                  "total_agreements", "mean_conflicts", "mean_agreements", "se_agreements"};
  j["absent_classes"] = nlohmann::json::array();
  if (!civil) j["absent_classes"].push_back("civil");
  if (!incivil) j["absent_classes"].push_back("incivil");
  j["conflict_share_denominator"] =
      "ambiguous: the share of conflicts among all sentiments can be taken over conflicts+agreements or over all "
      "shared entities; both counts are reported so either ratio can be derived";
  return j.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<std::pair<std::string, ConflictReport>>& rows) {
  std::ostringstream out;
  out << "tweet_id,account_holder,target,conflicts,agreements\n";
  for (const auto& [tweet_id, r] : rows)
    out << tweet_id << ',' << r.account_holder_id << ',' << r.target_id << ',' << r.conflicts << ',' << r.agreements
        << '\n';
  return out.str();
}

std::string feature_csv(const std::vector<std::pair<std::string, std::int64_t>>& rows) {
  std::ostringstream out;
  out << "tweet_id,conflict_count\n";
  for (const auto& [id, c] : rows) out << id << ',' << c << '\n';
  return out.str();
}

std::map<std::string, std::int64_t> parse_feature_csv(std::string_view csv) {
  std::map<std::string, std::int64_t> out;
  std::size_t line_no = 0;
  for (auto line : split(csv, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "tweet_id,conflict_count")
        throw Error(ErrorCode::kParse, "conflict CSV must start with 'tweet_id,conflict_count'");
      continue;
    }
    auto cols = split(line, ',');
    if (cols.size() != 2) throw Error(ErrorCode::kParse, "conflict CSV line " + std::to_string(line_no) + ": 2 columns expected");
    try {
      std::size_t used = 0;
      long long v = std::stoll(cols[1], &used);
      if (used != cols[1].size() || v < 0) throw std::invalid_argument(cols[1]);
      out[cols[0]] = v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "conflict CSV line " + std::to_string(line_no) + ": bad count '" + cols[1] + "'");
    }
  }
  return out;
}

std::map<std::string, std::int64_t> load_feature_csv(const std::string& path) {
  if (!file_exists(path)) throw Error(ErrorCode::kMissingInput, "conflicts CSV not found: " + path);
  return parse_feature_csv(read_file(path));
}

}  // namespace incivil::conflict
