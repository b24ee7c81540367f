#include "incivil/posthoc.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace incivil::posthoc {

double reputation(const corpus::UserProfile& p) {
  const double total = static_cast<double>(p.followers_count) + static_cast<double>(p.friends_count);
  if (total == 0.0) {
    throw Error(ErrorCode::kUndefinedReputation, "reputation undefined for '" + p.user_id + "': no followers or friends");
  }
  return static_cast<double>(p.followers_count) / total;
}

double reputation_ratio(const corpus::UserProfile& account, const corpus::UserProfile& target) {
  const double a = reputation(account);
  if (a == 0.0) {
    throw Error(ErrorCode::kUndefinedReputation, "reputation ratio undefined: account '" + account.user_id +
                                                     "' has reputation 0");
  }
  return reputation(target) / a;
}

RepetitionReport repetition_histogram(const std::vector<Incident>& incidents) {
  RepetitionReport r;
  for (const auto& inc : incidents) {
    ++r.per_account_holder[inc.account_holder];
    std::set<std::string> seen;
    for (const auto& t : inc.targets)
      if (seen.insert(t).second) ++r.per_target[t];
  }
  for (const auto& [user, n] : r.per_account_holder)
    if (n >= 2) ++r.account_holders[n];
  for (const auto& [user, n] : r.per_target)
    if (n >= 2) ++r.targets[n];
  return r;
}

std::vector<std::string> role_swaps(const RepetitionReport& report) {
  std::vector<std::string> out;
  for (const auto& [user, n] : report.per_account_holder)
    if (report.per_target.count(user)) out.push_back(user);
  return out;
}

BucketSpec::BucketSpec() : edges_{1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8} {}

BucketSpec::BucketSpec(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw Error(ErrorCode::kInvalidArgument, "a bucket spec needs at least two edges");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!std::isfinite(edges_[i])) throw Error(ErrorCode::kInvalidArgument, "bucket edges must be finite");
    if (i > 0 && !(edges_[i] > edges_[i - 1]))
      throw Error(ErrorCode::kInvalidArgument, "bucket edges must be strictly increasing");
  }
}

std::size_t BucketSpec::bucket_of(double v) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), v);
  return static_cast<std::size_t>(it - edges_.begin());
}

namespace {

std::string edge_label(double v) {
  static const std::pair<double, const char*> kSuffixes[] = {{1e9, "B"}, {1e6, "M"}, {1e3, "k"}};
  for (const auto& [scale, suffix] : kSuffixes) {
    if (std::abs(v) >= scale && std::fmod(v, scale) == 0.0) return format_double(v / scale) + suffix;
  }
  return format_double(v);
}

}  // namespace

std::vector<std::string> BucketSpec::labels() const {
  std::vector<std::string> out;
  out.push_back("<" + edge_label(edges_.front()));
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
    out.push_back("[" + edge_label(edges_[i]) + "," + edge_label(edges_[i + 1]) + ")");
  out.push_back(">=" + edge_label(edges_.back()));
  return out;
}

std::vector<double> BucketHistogram::interval_fractions() const {
  if (fractions.size() < 2) return {};
  return std::vector<double>(fractions.begin() + 1, fractions.end() - 1);
}

BucketHistogram bucket_distribution(const std::vector<double>& values, const BucketSpec& spec) {
  BucketHistogram h;
  h.labels = spec.labels();
  h.counts.assign(spec.bucket_count(), 0);
  h.fractions.assign(spec.bucket_count(), 0.0);
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::kInvalidArgument, "bucketed values must be finite and >= 0");
    ++h.counts[spec.bucket_of(v)];
  }
  h.empty = values.empty();
  if (!h.empty) {
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      h.fractions[i] = static_cast<double>(h.counts[i]) / static_cast<double>(values.size());
  }
  return h;
}

CategoryLexicon CategoryLexicon::parse(std::string_view text) {
  CategoryLexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kParse, "category lexicon line " + std::to_string(line_no) + ": expected 'Category: words'");
    }
    std::string name = trim(line.substr(0, colon));
    if (name.empty()) throw Error(ErrorCode::kParse, "category lexicon line " + std::to_string(line_no) + ": empty category");
    lex.categories_[name];
    for (const auto& piece : split(line.substr(colon + 1), ',')) {
      std::string pattern = utf8::to_lower(trim(piece));
      if (pattern.empty()) continue;
      try {
        lex.add(name, pattern);
      } catch (const Error& e) {
        throw Error(ErrorCode::kParse, "category lexicon line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return lex;
}

CategoryLexicon CategoryLexicon::load(const std::string& path) {
  if (!file_exists(path)) throw Error(ErrorCode::kMissingInput, "category lexicon not found: " + path);
  return parse(read_file(path));
}

void CategoryLexicon::add(const std::string& category, const std::string& pattern) {
  if (category.empty()) throw Error(ErrorCode::kInvalidArgument, "empty category name");
  std::string p = utf8::to_lower(pattern);
  if (p.empty() || p == "*") throw Error(ErrorCode::kInvalidArgument, "empty category pattern");
  auto& list = categories_[category];
  if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(p);
}

bool CategoryLexicon::matches(const std::string& category, std::string_view token) const {
  auto it = categories_.find(category);
  if (it == categories_.end()) return false;
  for (const auto& p : it->second) {
    if (p.back() == '*') {
      std::string_view stem(p.data(), p.size() - 1);
      if (token.substr(0, stem.size()) == stem) return true;
    } else if (token == p) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> scoring_tokens(const text::TokenSeq& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    bool visible = false;
    for (char32_t cp : utf8::decode(t.lower))
      if (!utf8::is_punct(cp)) visible = true;
    if (visible) out.push_back(t.lower);
  }
  return out;
}

std::map<std::string, double> category_scores(const text::TokenSeq& tokens, const CategoryLexicon& lexicon) {
  std::map<std::string, double> out;
  const auto words = scoring_tokens(tokens);
  for (const auto& [category, patterns] : lexicon.categories()) {
    std::size_t hits = 0;
    for (const auto& w : words)
      if (lexicon.matches(category, w)) ++hits;
    out[category] = words.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(words.size());
  }
  return out;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  r.n = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  r.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return r;
}

std::map<std::string, MeanSe> user_category_summary(const std::map<std::string, std::vector<text::TokenSeq>>& texts_by_user,
                                                    const CategoryLexicon& lexicon) {
  std::map<std::string, std::vector<double>> per_category;
  for (const auto& [user, texts] : texts_by_user) {
    if (texts.empty()) continue;
    std::map<std::string, double> sums;
    for (const auto& tokens : texts)
      for (const auto& [cat, score] : category_scores(tokens, lexicon)) sums[cat] += score;
    for (const auto& [cat, patterns] : lexicon.categories())
      per_category[cat].push_back(sums[cat] / static_cast<double>(texts.size()));
  }
  std::map<std::string, MeanSe> out;
  for (const auto& [cat, patterns] : lexicon.categories()) out[cat] = mean_se(per_category[cat]);
  return out;
}

std::string histogram_csv(const Histogram& h, const std::string& count_column) {
  std::ostringstream out;
  out << count_column << ",users\n";
  for (const auto& [count, users] : h) out << count << ',' << users << '\n';
  return out.str();
}

std::string bucket_csv(const std::map<std::string, BucketHistogram>& groups) {
  std::ostringstream out;
  out << "group,bucket,count,fraction\n";
  for (const auto& [group, h] : groups)
    for (std::size_t i = 0; i < h.labels.size(); ++i)
      out << group << ",\"" << h.labels[i] << "\"," << h.counts[i] << ',' << format_double(h.fractions[i]) << '\n';
  return out.str();
}

std::string category_csv(const std::map<std::string, std::map<std::string, MeanSe>>& groups) {
  std::ostringstream out;
  out << "group,category,users,mean,standard_error\n";
  for (const auto& [group, cats] : groups)
    for (const auto& [cat, m] : cats)
      out << group << ',' << cat << ',' << m.n << ',' << format_double(m.mean) << ',' << format_double(m.se) << '\n';
  return out.str();
}

std::string ratio_csv(const std::vector<RatioRow>& rows) {
  std::ostringstream out;
  out << "tweet_id,account_holder,target,account_reputation,target_reputation,ratio\n";
  for (const auto& r : rows)
    out << r.tweet_id << ',' << r.account_holder << ',' << r.target << ',' << format_double(r.account_reputation) << ','
        << format_double(r.target_reputation) << ',' << format_double(r.ratio) << '\n';
  return out.str();
}

}  // namespace incivil::posthoc
