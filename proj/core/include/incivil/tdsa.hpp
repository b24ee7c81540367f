#pragma once

// Target-dependent sentiment: the TD-LSTM classifier over (sentence, target
// span) pairs and per-user entity-sentiment profiles built from it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "incivil/corpus.hpp"
#include "incivil/nn/checkpoint.hpp"
#include "incivil/nn/layers.hpp"
#include "incivil/nn/lstm.hpp"
#include "incivil/nn/train.hpp"
#include "incivil/text.hpp"

namespace incivil::tdsa {

enum class Sentiment : std::uint8_t { kNegative = 0, kNeutral = 1, kPositive = 2 };
inline constexpr std::size_t kNumSentiments = 3;

std::string_view to_string(Sentiment s);
Sentiment parse_sentiment(std::string_view s);

/// Probabilities indexed by Sentiment.
using Distribution = std::array<double, kNumSentiments>;

Sentiment argmax(const Distribution& d);

struct TdExample {
  text::TokenSeq tokens;
  std::size_t target_begin = 0;
  std::size_t target_end = 0;  // exclusive
  std::optional<Sentiment> label;
};

/// Throws Error(kInvalidArgument) for an empty token list or an invalid span.
void validate_example(const TdExample& ex);

/// `text<TAB>start<TAB>end<TAB>label` lines; spans index tokenize(text).
std::vector<TdExample> parse_dataset(std::string_view tsv);
std::vector<TdExample> load_dataset(const std::string& path);

class WordEmbeddingTable {
 public:
  WordEmbeddingTable() = default;
  explicit WordEmbeddingTable(std::size_t dim) : dim_(dim) {}

  /// `word v1 ... vd` per line; every line must have the same d.
  static WordEmbeddingTable parse(std::string_view text);
  static WordEmbeddingTable load(const std::string& path);

  void add(const std::string& word, std::vector<double> vec);
  const std::vector<double>* find(const std::string& word) const;
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const std::map<std::string, std::vector<double>>& vectors() const { return vectors_; }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>> vectors_;
};

/// Anything that maps a (sentence, target span) to a sentiment distribution.
class TargetSentimentClassifier {
 public:
  virtual ~TargetSentimentClassifier() = default;
  virtual Distribution classify(const TdExample& example) const = 0;
};

/// Always returns the same class; used as a stub in tests and fixtures.
class ConstantClassifier final : public TargetSentimentClassifier {
 public:
  explicit ConstantClassifier(Sentiment s) : sentiment_(s) {}
  Distribution classify(const TdExample& example) const override;

 private:
  Sentiment sentiment_;
};

/// Rule-based classifier: polarity of the nearest cue word outside the
/// target span. Equidistant opposite cues or no cue give neutral.
class CueLexiconClassifier final : public TargetSentimentClassifier {
 public:
  CueLexiconClassifier(std::set<std::string> positive, std::set<std::string> negative);

  Distribution classify(const TdExample& example) const override;

  nn::Checkpoint to_checkpoint() const;
  static CueLexiconClassifier from_checkpoint(const nn::Checkpoint& ckpt);

 private:
  std::set<std::string> positive_;
  std::set<std::string> negative_;
};

struct TdLstmConfig {
  std::size_t embed_dim = 16;
  std::size_t hidden_dim = 16;
  /// When false, pretrained rows stay fixed and only the OOV row learns.
  bool fine_tune_embeddings = true;
};

/// Left LSTM over tokens[0, end) and right LSTM over tokens[begin, n)
/// reversed, both including the target; final states concatenated, then a
/// dense layer and softmax over {negative, neutral, positive}.
class TdLstmModel final : public TargetSentimentClassifier {
 public:
  static constexpr std::int32_t kOov = 0;

  TdLstmModel() = default;
  /// Vocabulary: pretrained words seen in `vocabulary_words` when a table is
  /// given (rows copied from it), otherwise every word in `vocabulary_words`.
  TdLstmModel(const TdLstmConfig& config, const std::set<std::string>& vocabulary_words,
              const WordEmbeddingTable* pretrained, Rng& rng);

  Distribution classify(const TdExample& example) const override;
  Distribution forward(const TdExample& example) const { return classify(example); }

  /// Forward + backward for one labeled example; adds dL/dparam and returns the loss.
  double accumulate_gradients(const TdExample& example);

  std::vector<nn::Parameter*> parameters();
  std::vector<std::int32_t> encode(const text::TokenSeq& tokens) const;
  const TdLstmConfig& config() const { return config_; }
  std::size_t vocabulary_size() const { return words_.size() + 1; }
  /// Zeroes gradients of frozen embedding rows (all but OOV when not fine-tuning).
  void mask_frozen_gradients();

  nn::Checkpoint to_checkpoint(std::uint64_t seed) const;
  static TdLstmModel from_checkpoint(const nn::Checkpoint& ckpt);

  nn::Embedding embedding;
  nn::LstmCell left;
  nn::LstmCell right;
  nn::Dense output;

 private:
  TdLstmConfig config_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::int32_t> index_;
  void build_index();
};

struct TdsaTrainingResult {
  TdLstmModel model;
  nn::TrainingHistory history;
};

/// Throws Error(kSingleClass) when fewer than two sentiment classes are
/// present among the training labels.
TdsaTrainingResult train_tdsa(const std::vector<TdExample>& train, const std::vector<TdExample>& validation,
                              const WordEmbeddingTable* embeddings, const TdLstmConfig& arch,
                              const nn::TrainingConfig& config);

double accuracy(const TargetSentimentClassifier& model, const std::vector<TdExample>& data);
double mean_loss(const TargetSentimentClassifier& model, const std::vector<TdExample>& data);

struct SentimentCounts {
  std::int64_t positive = 0;
  std::int64_t negative = 0;
  std::int64_t neutral = 0;

  std::int64_t total() const { return positive + negative + neutral; }
  bool operator==(const SentimentCounts&) const = default;
};

struct EntitySentimentProfile {
  std::string user_id;
  std::map<std::string, SentimentCounts> counts;

  std::int64_t total() const;
};

/// Classifies every recognized entity mention in the slice and tallies the
/// argmax class per normalized entity.
EntitySentimentProfile profile_user(const std::string& user_id, const std::vector<corpus::Tweet>& timeline_slice,
                                    const text::EntityRecognizer& recognizer,
                                    const TargetSentimentClassifier& classifier);

/// Loads either a TD-LSTM or a cue-lexicon checkpoint.
std::unique_ptr<TargetSentimentClassifier> load_classifier(const nn::Checkpoint& ckpt);

}  // namespace incivil::tdsa
