#pragma once

// Hand-crafted baseline features and the n-gram vectorizer with chi-squared
// feature selection.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "incivil/corpus.hpp"
#include "incivil/text.hpp"

namespace incivil::features {

struct FeatureVector {
  std::vector<double> values;
  std::string schema_id;
};

inline constexpr const char* kContentSchema = "content.v1";
inline constexpr const char* kTextualSchema = "textual.v1";

const std::vector<std::string>& content_feature_names();
const std::vector<std::string>& textual_feature_names();

/// Sum of per-word severities over lexicon token occurrences.
std::int64_t severity(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon);
std::int64_t offensive_word_count(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon);

/// [word_count, offensive_word_count, severity, hour_of_day, negation_flag].
FeatureVector content_features(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon,
                               int utc_offset_hours = 0);

/// [#words, #characters, #sentences, avg word length, avg sentence length,
///  profane ratio, uppercase/sentence, punctuation/sentence, URL ratio,
///  mention ratio]. Divisions by zero yield 0.
FeatureVector textual_features(const corpus::Tweet& tweet, const corpus::Lexicon& lexicon);

std::size_t count_sentences(std::string_view text);

using SparseRow = std::vector<std::pair<std::size_t, double>>;

struct VectorizerModel {
  static constexpr int kVersion = 1;

  std::set<int> n_values;
  std::size_t min_df = 2;
  /// Column order: descending document frequency, ties lexicographic.
  std::vector<std::string> features;
  std::vector<std::int64_t> document_frequency;
  std::map<std::string, std::size_t> column;
  /// Columns kept after selection (all columns when no selection ran).
  std::vector<std::size_t> selected_columns;
  /// Per-column selection statistic; empty until chi2_select.
  std::vector<double> selection_scores;

  std::size_t output_dim() const { return selected_columns.size(); }

  /// Sparse counts over all columns; OOV n-grams are ignored.
  SparseRow counts(const text::TokenSeq& tokens) const;
  /// Dense counts over the selected columns.
  std::vector<double> transform(const text::TokenSeq& tokens) const;

  std::string to_json() const;
  static VectorizerModel from_json(std::string_view json_text);
};

VectorizerModel fit_vectorizer(const std::vector<text::TokenSeq>& corpus, const std::set<int>& n_values,
                               std::size_t min_df = 2);

/// 2x2 presence-by-label chi-squared statistic; 0 when an expected cell is 0.
double chi2_statistic(std::int64_t present_pos, std::int64_t present_neg, std::int64_t n_pos, std::int64_t n_neg);

inline constexpr std::size_t kDefaultSelectK = 2000;

/// Scores every column of `model` on (X, y) and keeps the top-k by chi-squared
/// (ties by column order). `y` holds 0/1 labels.
VectorizerModel chi2_select(const VectorizerModel& model, const std::vector<SparseRow>& X,
                            const std::vector<int>& y, std::size_t k);

}  // namespace incivil::features
