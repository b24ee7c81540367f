#include "incivil/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "json.hpp"

namespace incivil::features {

const std::vector<std::string>& content_feature_names() {
  static const std::vector<std::string> names = {"word_count", "offensive_word_count", "severity", "hour_of_day",
                                                 "negation"};
  return names;
}

const std::vector<std::string>& textual_feature_names() {
  static const std::vector<std::string> names = {
      "words",          "characters",          "sentences",         "avg_word_length",      "avg_sentence_length",
      "profane_ratio",  "uppercase_per_sentence", "punct_per_sentence", "url_ratio",       "mention_ratio"};
  return names;
}

std::int64_t severity(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon) {
  std::int64_t total = 0;
  for (const auto& w : corpus::filter_tokens(tweet.text)) total += lexicon.severity(w);
  return total;
}

std::int64_t offensive_word_count(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon) {
  std::int64_t total = 0;
  for (const auto& w : corpus::filter_tokens(tweet.text)) total += lexicon.contains(w) ? 1 : 0;
  return total;
}

FeatureVector content_features(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon, int utc_offset_hours) {
  FeatureVector fv;
  fv.schema_id = kContentSchema;
  auto words = corpus::filter_tokens(tweet.text);
  bool negated = text::detect_negation(text::tokenize(tweet.text), lexicon);
  fv.values = {static_cast<double>(words.size()),
               static_cast<double>(offensive_word_count(tweet, lexicon)),
               static_cast<double>(severity(tweet, lexicon)),
               static_cast<double>(hour_of_day(tweet.created_at, utc_offset_hours)),
               negated ? 1.0 : 0.0};
  return fv;
}

std::size_t count_sentences(std::string_view text) {
  std::u32string cps = utf8::decode(text);
  std::size_t sentences = 0;
  bool in_content = false;
  bool any_visible = false;
  for (char32_t cp : cps) {
    if (cp == U'.' || cp == U'!' || cp == U'?') {
      if (in_content) ++sentences;
      in_content = false;
      any_visible = true;
    } else if (!utf8::is_space(cp)) {
      any_visible = true;
      if (!utf8::is_punct(cp)) in_content = true;
    }
  }
  if (in_content) ++sentences;
  if (sentences == 0 && any_visible) sentences = 1;
  return sentences;
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

FeatureVector textual_features(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon) {
  FeatureVector fv;
  fv.schema_id = kTextualSchema;
  const auto words = static_cast<double>(corpus::filter_tokens(tweet.text).size());
  std::u32string cps = utf8::decode(tweet.text);
  const auto chars = static_cast<double>(cps.size());
  const auto sentences = static_cast<double>(count_sentences(tweet.text));
  double upper = 0, punct = 0;
  for (char32_t cp : cps) {
    if (utf8::is_upper(cp)) ++upper;
    if (utf8::is_punct(cp)) ++punct;
  }
  double urls = 0, mentions = 0;
  for (const auto& raw : split_whitespace(tweet.text)) {
    std::string lower = utf8::to_lower(raw);
    if (starts_with(lower, "http://") || starts_with(lower, "https://") || starts_with(lower, "www.")) ++urls;
    if (raw.size() > 1 && raw.front() == '@') ++mentions;
  }
  const auto profane = static_cast<double>(offensive_word_count(tweet, lexicon));
  fv.values = {words,
               chars,
               sentences,
               ratio(chars, words),
               ratio(words, sentences),
               ratio(profane, words),
               ratio(upper, sentences),
               ratio(punct, sentences),
               ratio(urls, words),
               ratio(mentions, words)};
  return fv;
}

SparseRow VectorizerModel::counts(const text::TokenSeq& tokens) const {
  SparseRow row;
  for (const auto& [gram, c] : text::ngrams(tokens, n_values)) {
    auto it = column.find(gram);
    if (it != column.end()) row.emplace_back(it->second, static_cast<double>(c));
  }
  std::sort(row.begin(), row.end());
  return row;
}

std::vector<double> VectorizerModel::transform(const text::TokenSeq& tokens) const {
  std::vector<double> out(selected_columns.size(), 0.0);
  std::vector<std::ptrdiff_t> position(features.size(), -1);
  for (std::size_t i = 0; i < selected_columns.size(); ++i) position[selected_columns[i]] = static_cast<std::ptrdiff_t>(i);
  for (const auto& [col, c] : counts(tokens)) {
    if (position[col] >= 0) out[static_cast<std::size_t>(position[col])] = c;
  }
  return out;
}

std::string VectorizerModel::to_json() const {
  nlohmann::json j;
  j["format"] = "incivil-vectorizer";
  j["version"] = kVersion;
  j["n_values"] = std::vector<int>(n_values.begin(), n_values.end());
  j["min_df"] = min_df;
  auto& cols = j["features"] = nlohmann::json::array();
  for (std::size_t i = 0; i < features.size(); ++i) {
    nlohmann::json f;
    f["feature"] = features[i];
    f["column"] = i;
    f["df"] = document_frequency[i];
    if (!selection_scores.empty()) f["score"] = selection_scores[i];
    cols.push_back(std::move(f));
  }
  j["selected_columns"] = selected_columns;
  return j.dump(1) + "\n";
}

VectorizerModel VectorizerModel::from_json(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text);
  if (j.value("format", "") != "incivil-vectorizer") throw Error(ErrorCode::kParse, "not a vectorizer model");
  if (j.at("version").get<int>() != kVersion) throw Error(ErrorCode::kParse, "unsupported vectorizer version");
  VectorizerModel m;
  for (int n : j.at("n_values")) m.n_values.insert(n);
  m.min_df = j.at("min_df").get<std::size_t>();
  bool scored = false;
  for (const auto& f : j.at("features")) {
    auto col = f.at("column").get<std::size_t>();
    if (col != m.features.size()) throw Error(ErrorCode::kParse, "vectorizer columns out of order");
    m.features.push_back(f.at("feature").get<std::string>());
    m.document_frequency.push_back(f.at("df").get<std::int64_t>());
    m.column[m.features.back()] = col;
    if (f.contains("score")) {
      scored = true;
      m.selection_scores.push_back(f.at("score").get<double>());
    }
  }
  if (scored && m.selection_scores.size() != m.features.size()) throw Error(ErrorCode::kParse, "partial score list");
  m.selected_columns = j.at("selected_columns").get<std::vector<std::size_t>>();
  for (auto c : m.selected_columns)
    if (c >= m.features.size()) throw Error(ErrorCode::kParse, "selected column out of range");
  return m;
}

VectorizerModel fit_vectorizer(const std::vector<text::TokenSeq>& corpus, const std::set<int>& n_values,
                               std::size_t min_df) {
  if (corpus.empty()) throw Error(ErrorCode::kEmpty, "cannot fit a vectorizer on an empty corpus");
  std::map<std::string, std::int64_t> df;
  for (const auto& doc : corpus)
    for (const auto& [gram, c] : text::ngrams(doc, n_values)) ++df[gram];
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [gram, d] : df)
    if (d >= static_cast<std::int64_t>(min_df)) kept.emplace_back(gram, d);
  if (kept.empty()) throw Error(ErrorCode::kEmpty, "no n-gram reaches min_df");
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  VectorizerModel m;
  m.n_values = n_values;
  m.min_df = min_df;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    m.features.push_back(kept[i].first);
    m.document_frequency.push_back(kept[i].second);
    m.column[kept[i].first] = i;
    m.selected_columns.push_back(i);
  }
  return m;
}

double chi2_statistic(std::int64_t present_pos, std::int64_t present_neg, std::int64_t n_pos, std::int64_t n_neg) {
  const double n = static_cast<double>(n_pos + n_neg);
  const double observed[2][2] = {
      {static_cast<double>(present_pos), static_cast<double>(present_neg)},
      {static_cast<double>(n_pos - present_pos), static_cast<double>(n_neg - present_neg)}};
  const double row[2] = {observed[0][0] + observed[0][1], observed[1][0] + observed[1][1]};
  const double col[2] = {static_cast<double>(n_pos), static_cast<double>(n_neg)};
  double chi2 = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      double expected = row[r] * col[c] / n;
      if (expected == 0.0) return 0.0;
      double d = observed[r][c] - expected;
      chi2 += d * d / expected;
    }
  }
  return chi2;
}

namespace {

/// chi2 as the exact fraction N(ad-bc)^2 / (R1 R2 C1 C2); den 0 means score 0.
struct Chi2Fraction {
  unsigned __int128 num = 0;
  unsigned __int128 den = 1;
};

Chi2Fraction chi2_fraction(std::int64_t a, std::int64_t b, std::int64_t n_pos, std::int64_t n_neg) {
  const std::int64_t c = n_pos - a, d = n_neg - b, n = n_pos + n_neg;
  const auto r1 = static_cast<unsigned __int128>(a + b), r2 = static_cast<unsigned __int128>(c + d);
  const unsigned __int128 den = r1 * r2 * static_cast<unsigned __int128>(n_pos) * static_cast<unsigned __int128>(n_neg);
  if (den == 0) return {};
  const __int128 diff = static_cast<__int128>(a) * d - static_cast<__int128>(b) * c;
  const auto mag = static_cast<unsigned __int128>(diff < 0 ? -diff : diff);
  return {static_cast<unsigned __int128>(n) * mag * mag, den};
}

/// -1, 0, 1 for x < y, x == y, x > y; nullopt when the cross products overflow.
std::optional<int> compare_exact(const Chi2Fraction& x, const Chi2Fraction& y) {
  unsigned __int128 lhs = 0, rhs = 0;
  if (__builtin_mul_overflow(x.num, y.den, &lhs) || __builtin_mul_overflow(y.num, x.den, &rhs)) return std::nullopt;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace

VectorizerModel chi2_select(const VectorizerModel& model, const std::vector<SparseRow>& X, const std::vector<int>& y,
                            std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (X.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "X and y differ in length");
  if (X.size() < 2) throw Error(ErrorCode::kInvalidArgument, "chi2_select needs at least 2 documents");
  std::int64_t n_pos = std::count(y.begin(), y.end(), 1);
  std::int64_t n_neg = static_cast<std::int64_t>(y.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::kSingleClass, "chi2_select needs both classes");
  const std::size_t n_cols = model.features.size();
  std::vector<std::int64_t> pos(n_cols, 0), neg(n_cols, 0);
  for (std::size_t d = 0; d < X.size(); ++d) {
    for (const auto& [col, c] : X[d]) {
      if (col >= n_cols) throw Error(ErrorCode::kDimensionMismatch, "column index out of range");
      if (c <= 0) continue;
      (y[d] == 1 ? pos : neg)[col] += 1;
    }
  }
  VectorizerModel out = model;
  out.selection_scores.assign(n_cols, 0.0);
  std::vector<Chi2Fraction> exact(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    out.selection_scores[c] = chi2_statistic(pos[c], neg[c], n_pos, n_neg);
    exact[c] = chi2_fraction(pos[c], neg[c], n_pos, n_neg);
  }
  std::vector<std::size_t> order(n_cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (auto cmp = compare_exact(exact[a], exact[b])) return *cmp > 0;
    return out.selection_scores[a] > out.selection_scores[b];
  });
  order.resize(std::min(k, n_cols));
  out.selected_columns = order;
  return out;
}

}  // namespace incivil::features
