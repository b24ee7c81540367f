#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

struct TrainingConfig {
  double learning_rate = 0.05;
  double dropout_p = 0.25;
  std::size_t patience = 3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;

  void validate() const;
};

/// A model bound to its training and validation data.
class TrainingTask {
 public:
  virtual ~TrainingTask() = default;

  virtual std::vector<Parameter*> parameters() = 0;
  /// Non-learned state that must follow the best epoch (batch-norm statistics).
  virtual std::vector<Tensor*> buffers() { return {}; }
  virtual std::size_t train_size() const = 0;
  /// Gradients are zero on entry. Accumulates gradients of the mean batch
  /// loss and returns that mean loss.
  virtual double train_batch(std::span<const std::size_t> batch, Rng& rng) = 0;
  /// Mean loss on the validation split, evaluation mode.
  virtual double validation_loss() = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
  bool early_stopped = false;
};

/// p <- p - lr * g for every trainable parameter.
void sgd_update(std::span<Parameter* const> params, double lr);
void sgd_update(Parameter& param, const Tensor& grad, double lr);

void zero_grads(std::span<Parameter* const> params);
double grad_norm(std::span<Parameter* const> params);

/// Seeded shuffle -> mini-batch SGD -> validation loss, with early stopping
/// after `patience` epochs without improvement. Restores the parameters (and
/// buffers) of the best validation epoch. Non-finite losses throw
/// Error(kDivergence) naming the epoch.
TrainingHistory train_loop(TrainingTask& task, const TrainingConfig& config);

}  // namespace incivil::nn
