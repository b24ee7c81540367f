#pragma once

// File-based commands tying the modules together. Each command reads the
// paths named in a PipelineConfig, writes its artifacts under out_dir and
// returns a process exit code.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "incivil/classifier.hpp"
#include "incivil/corpus.hpp"
#include "incivil/nn/train.hpp"
#include "incivil/tdsa.hpp"

namespace incivil::pipeline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
/// Missing or unusable input.
inline constexpr int kExitInput = 2;

/// 21,000 of 24,271 labeled tweets.
inline constexpr double kDefaultTrainFraction = 21000.0 / 24271.0;

struct PipelineConfig {
  // Inputs.
  std::string corpus;
  std::string profiles;
  std::string timelines;
  std::string lexicon;
  std::string labels;
  std::string embeddings;
  std::string category_lexicon;
  std::string entities;
  std::string tdsa_train;
  std::string tdsa_validation;
  std::string tdsa_checkpoint;
  std::string conflicts;
  std::string checkpoint;
  std::string predictions;
  std::string split;

  std::string out_dir = "out";
  std::uint64_t seed = 0;

  std::size_t context_k = corpus::kDefaultContextSize;
  double train_fraction = kDefaultTrainFraction;
  /// Share of the training split held out for early stopping.
  double validation_fraction = 0.1;
  int utc_offset_hours = 0;

  nn::TrainingConfig training;
  classifier::CharCnnConfig charcnn;
  classifier::CharBiLstmConfig bilstm;
  std::size_t fusion_hidden = 64;
  tdsa::TdLstmConfig tdsa;

  double l2 = 0.0;
  classifier::LogisticConfig logistic;
  /// "content" or "textual".
  std::string feature_set = "content";
  std::set<int> ngram_n = {1, 2, 3};
  std::size_t min_df = 2;
  std::size_t select_k = 2000;

  /// Throws Error(kParse) on unknown keys or bad types.
  static PipelineConfig from_json(std::string_view text);
  static PipelineConfig load(const std::string& path);
  /// Canonical JSON of every field.
  std::string to_json() const;
  /// FNV-1a of to_json(), hex.
  std::string digest() const;
};

/// Sizes of a split: round(n * fraction) train, the rest test.
std::pair<std::size_t, std::size_t> split_sizes(std::size_t n, double train_fraction);

/// Seeded split stratified by label: each class contributes its share of the
/// train total (largest remainder). Returns train and test index lists,
/// each in ascending order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const std::vector<int>& labels,
                                                                               double train_fraction,
                                                                               std::uint64_t seed);

struct FilterStats {
  std::size_t input = 0;
  std::size_t offensive_kept = 0;
  std::size_t offensive_dropped = 0;
  std::size_t mention_kept = 0;
  std::size_t mention_dropped = 0;
};

struct Prediction {
  std::string tweet_id;
  double p_incivil = 0.0;
  corpus::Label label_pred = corpus::Label::kCivil;
  std::optional<std::int64_t> conflict_feature;
};

std::string predictions_to_jsonl(const std::vector<Prediction>& predictions);
std::vector<Prediction> parse_predictions(std::string_view jsonl);

/// The model names accepted by cmd_train.
const std::vector<std::string>& model_names();

int cmd_filter(const PipelineConfig& config, std::ostream& log);
int cmd_featurize(const PipelineConfig& config, std::ostream& log);
int cmd_conflicts(const PipelineConfig& config, std::ostream& log);
int cmd_train(const PipelineConfig& config, const std::string& model, std::ostream& log);
int cmd_predict(const PipelineConfig& config, std::ostream& log);
int cmd_eval(const PipelineConfig& config, std::ostream& log);
int cmd_posthoc(const PipelineConfig& config, std::ostream& log);
int cmd_gradcheck(const PipelineConfig& config, std::ostream& log);

}  // namespace incivil::pipeline
