#pragma once

// Incivility classifiers: char-CNN, char-biLSTM, the char-CNN + conflict
// fusion model, logistic regression baselines and evaluation metrics.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "incivil/nn/checkpoint.hpp"
#include "incivil/nn/conv.hpp"
#include "incivil/nn/gradcheck.hpp"
#include "incivil/nn/layers.hpp"
#include "incivil/nn/lstm.hpp"
#include "incivil/nn/train.hpp"
#include "incivil/text.hpp"

namespace incivil::classifier {

/// {P(civil), P(incivil)}.
using Distribution = std::array<double, 2>;

struct CharExample {
  text::CharSeq seq;
  int label = 0;  // 1 = incivil
  std::int64_t conflict = 0;
};

/// Common inference surface for the character models.
class IncivilityModel {
 public:
  virtual ~IncivilityModel() = default;
  virtual Distribution classify(const text::CharSeq& cs, std::int64_t conflict) const = 0;
  virtual const text::CharVocab& vocab() const = 0;
  virtual std::size_t max_len() const = 0;
  virtual nn::Checkpoint to_checkpoint(std::uint64_t seed) const = 0;
  /// Batched P(incivil), same values as classify.
  virtual std::vector<double> predict(const std::vector<CharExample>& batch) const;
};

struct CharCnnConfig {
  std::size_t max_len = 64;
  std::size_t embed_dim = 16;
  std::size_t filters = 16;
  std::size_t kernel = 5;
};

/// Shape chain of the trunk for one example, each as [C, H, W].
struct CharCnnShapes {
  std::array<std::size_t, 3> conv1, pool1, conv2, pool2;
  std::size_t flatten = 0;
};

/// Throws Error(kDimensionMismatch) when the input is too small for the chain.
CharCnnShapes charcnn_shapes(const CharCnnConfig& config);

/// Embedding -> conv -> BN -> ReLU -> pool -> conv -> BN -> ReLU -> pool -> flatten.
class CharCnnTrunk {
 public:
  CharCnnTrunk() = default;
  CharCnnTrunk(const CharCnnConfig& config, std::size_t vocab_size, Rng& rng);

  /// [N, flatten]
  nn::Tensor forward(const std::vector<const text::CharSeq*>& batch, nn::Mode mode);
  void backward(const nn::Tensor& dflat);
  nn::Tensor apply(const std::vector<const text::CharSeq*>& batch) const;

  std::vector<nn::Parameter*> parameters();
  std::vector<nn::Tensor*> buffers();
  /// ReLU patterns and pool selections of the last forward pass.
  nn::Signature signature() const;
  std::size_t flatten_size() const { return flatten_; }

  nn::Embedding embedding;
  nn::Conv2d conv1, conv2;
  nn::BatchNorm bn1, bn2;

 private:
  std::size_t max_len_ = 0;
  std::size_t flatten_ = 0;
  nn::ReLU relu1_, relu2_;
  nn::MaxPool2 pool1_, pool2_;
  std::vector<std::size_t> pooled_shape_;

  std::vector<std::int32_t> gather(const std::vector<const text::CharSeq*>& batch) const;
};

class CharCnnModel final : public IncivilityModel {
 public:
  CharCnnModel() = default;
  CharCnnModel(text::CharVocab vocab, const CharCnnConfig& config, Rng& rng);

  /// Logits [N, 2]; dropout masks drawn from rng in train mode.
  nn::Tensor forward(const std::vector<const CharExample*>& batch, nn::Mode mode, Rng& rng);
  void backward(const nn::Tensor& dlogits);

  Distribution classify(const text::CharSeq& cs, std::int64_t conflict = 0) const override;
  std::vector<double> predict(const std::vector<CharExample>& batch) const override;
  const text::CharVocab& vocab() const override { return vocab_; }
  std::size_t max_len() const override { return config_.max_len; }
  const CharCnnConfig& config() const { return config_; }

  std::vector<nn::Parameter*> parameters();
  std::vector<nn::Tensor*> buffers() { return trunk.buffers(); }
  nn::Signature signature() const { return trunk.signature(); }

  nn::Checkpoint to_checkpoint(std::uint64_t seed) const override;
  static CharCnnModel from_checkpoint(const nn::Checkpoint& ckpt);

  CharCnnTrunk trunk;
  nn::Dropout dropout;
  nn::Dense head;

 private:
  text::CharVocab vocab_;
  CharCnnConfig config_;
  nn::Tensor logits_eval(const std::vector<const CharExample*>& batch) const;
};

/// (x - mean) / sd; a zero sd keeps centering only.
struct ScalarStandardizer {
  double mean = 0.0;
  double sd = 1.0;
  bool fitted = false;

  void fit(const std::vector<double>& values);
  /// Throws Error(kState) when not fitted.
  double apply(double x) const;
};

struct FusionConfig {
  CharCnnConfig trunk;
  std::size_t hidden = 64;
};

/// Char-CNN trunk whose flattened output is concatenated with the
/// standardized conflict count, then Dense -> ReLU -> Dense -> softmax.
class FusionModel final : public IncivilityModel {
 public:
  FusionModel() = default;
  FusionModel(text::CharVocab vocab, const FusionConfig& config, Rng& rng);

  nn::Tensor forward(const std::vector<const CharExample*>& batch, nn::Mode mode, Rng& rng);
  void backward(const nn::Tensor& dlogits);

  Distribution classify(const text::CharSeq& cs, std::int64_t conflict) const override;
  std::vector<double> predict(const std::vector<CharExample>& batch) const override;
  const text::CharVocab& vocab() const override { return vocab_; }
  std::size_t max_len() const override { return config_.trunk.max_len; }
  const FusionConfig& config() const { return config_; }

  std::vector<nn::Parameter*> parameters();
  std::vector<nn::Tensor*> buffers() { return trunk.buffers(); }
  nn::Signature signature() const;
  /// Column of hidden1's weight that reads the conflict input.
  std::size_t conflict_column() const { return trunk.flatten_size(); }

  nn::Checkpoint to_checkpoint(std::uint64_t seed) const override;
  static FusionModel from_checkpoint(const nn::Checkpoint& ckpt);

  CharCnnTrunk trunk;
  nn::Dropout dropout;
  nn::Dense hidden1;
  nn::Dense output;
  ScalarStandardizer standardizer;

 private:
  text::CharVocab vocab_;
  FusionConfig config_;
  nn::ReLU relu_;
  nn::Tensor logits_eval(const std::vector<const CharExample*>& batch) const;
  nn::Tensor concat(const nn::Tensor& flat, const std::vector<const CharExample*>& batch) const;
};

struct CharBiLstmConfig {
  std::size_t max_len = 64;
  std::size_t embed_dim = 16;
  std::size_t hidden_dim = 16;
};

/// Char embeddings over the first `length` positions -> biLSTM -> dropout ->
/// dense -> softmax.
class CharBiLstmModel final : public IncivilityModel {
 public:
  CharBiLstmModel() = default;
  CharBiLstmModel(text::CharVocab vocab, const CharBiLstmConfig& config, Rng& rng);

  /// Logits [1, 2] for one example. Empty sequences throw Error(kInvalidArgument).
  nn::Tensor forward(const text::CharSeq& cs, nn::Mode mode, Rng& rng);
  void backward(const nn::Tensor& dlogits);

  Distribution classify(const text::CharSeq& cs, std::int64_t conflict = 0) const override;
  const text::CharVocab& vocab() const override { return vocab_; }
  std::size_t max_len() const override { return config_.max_len; }
  const CharBiLstmConfig& config() const { return config_; }

  std::vector<nn::Parameter*> parameters();

  nn::Checkpoint to_checkpoint(std::uint64_t seed) const override;
  static CharBiLstmModel from_checkpoint(const nn::Checkpoint& ckpt);

  nn::Embedding embedding;
  nn::BiLstm encoder;
  nn::Dropout dropout;
  nn::Dense head;

 private:
  text::CharVocab vocab_;
  CharBiLstmConfig config_;
};

/// Mini-batch SGD with early stopping; see nn::train_loop. The dropout rate
/// comes from the training config.
nn::TrainingHistory train_charcnn(CharCnnModel& model, const std::vector<CharExample>& train,
                                  const std::vector<CharExample>& validation, const nn::TrainingConfig& config);
/// Fits the conflict standardizer on `train` first.
nn::TrainingHistory train_fusion(FusionModel& model, const std::vector<CharExample>& train,
                                 const std::vector<CharExample>& validation, const nn::TrainingConfig& config);
nn::TrainingHistory train_bilstm(CharBiLstmModel& model, const std::vector<CharExample>& train,
                                 const std::vector<CharExample>& validation, const nn::TrainingConfig& config);

std::unique_ptr<IncivilityModel> load_char_model(const nn::Checkpoint& ckpt);

/// Per-column standardization fitted on training rows; zero-variance columns are only centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const std::vector<std::vector<double>>& X);
  std::vector<double> apply(const std::vector<double>& x) const;
};

struct LogisticConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  bool standardize = true;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  std::optional<Standardizer> standardizer;

  /// P(incivil) for a raw (unstandardized) feature row.
  double predict(const std::vector<double>& x) const;
};

/// Full-batch gradient descent on the mean log-loss plus (l2/2)|w|^2, the
/// penalty applied as a proximal step; the bias is unpenalized. Throws
/// Error(kSingleClass) when y holds one class.
LogisticModel logistic_train(const std::vector<std::vector<double>>& X, const std::vector<int>& y, double l2,
                             const LogisticConfig& config = {});
double logistic_predict(const LogisticModel& model, const std::vector<double>& x);

nn::Checkpoint logistic_to_checkpoint(const LogisticModel& model, const std::string& kind, std::uint64_t seed,
                                      const std::string& extra_json);
LogisticModel logistic_from_checkpoint(const nn::Checkpoint& ckpt);

struct Confusion {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::int64_t total() const { return tp + fp + tn + fn; }
};

struct EvalReport {
  double accuracy = 0.0;
  double f1_positive = 0.0;
  /// Absent when the labels hold a single class.
  std::optional<double> roc_auc;
  Confusion confusion;

  std::string to_json() const;
};

inline constexpr double kDecisionThreshold = 0.5;

/// Accuracy and F1 (incivil class) at score >= 0.5; AUC as the rank
/// statistic with ties counted 1/2. Throws Error(kEmpty) on empty input.
EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& labels);

/// Mann-Whitney form of the AUC; nullopt for a single class.
std::optional<double> roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace incivil::classifier
