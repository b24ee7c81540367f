#include "incivil/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace incivil::nn {

void TrainingConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be finite and >= 0");
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw Error(ErrorCode::kInvalidArgument, "dropout_p must be in [0,1)");
  if (patience == 0) throw Error(ErrorCode::kInvalidArgument, "patience must be positive");
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  if (max_epochs == 0) throw Error(ErrorCode::kInvalidArgument, "max_epochs must be positive");
  if (clip_norm < 0.0) throw Error(ErrorCode::kInvalidArgument, "clip_norm must be >= 0");
}

void sgd_update(Parameter& param, const Tensor& grad, double lr) {
  if (!param.value.same_shape(grad)) {
    throw Error(ErrorCode::kDimensionMismatch, param.name + ": gradient shape " + shape_string(grad.shape()) +
                                                   " != parameter shape " + shape_string(param.value.shape()));
  }
  if (!param.trainable) return;
  for (std::size_t i = 0; i < grad.size(); ++i) param.value[i] -= lr * grad[i];
}

void sgd_update(std::span<Parameter* const> params, double lr) {
  for (Parameter* p : params) sgd_update(*p, p->grad, lr);
}

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

double grad_norm(std::span<Parameter* const> params) {
  double s = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.values()) s += g * g;
  return std::sqrt(s);
}

TrainingHistory train_loop(TrainingTask& task, const TrainingConfig& config) {
  config.validate();
  const std::size_t n = task.train_size();
  if (n == 0) throw Error(ErrorCode::kEmpty, "training split is empty");
  auto params = task.parameters();
  auto buffers = task.buffers();
  Rng rng(config.seed);

  std::vector<Tensor> best_params, best_buffers;
  auto snapshot = [&] {
    best_params.clear();
    best_buffers.clear();
    for (const Parameter* p : params) best_params.push_back(p->value);
    for (const Tensor* b : buffers) best_buffers.push_back(*b);
  };

  TrainingHistory history;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      zero_grads(params);
      double loss = task.train_batch(std::span<const std::size_t>(order.data() + start, end - start), rng);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kDivergence, "non-finite training loss in epoch " + std::to_string(epoch));
      }
      total += loss * static_cast<double>(end - start);
      double scale = 1.0;
      if (config.clip_norm > 0.0) {
        double norm = grad_norm(params);
        if (norm > config.clip_norm) scale = config.clip_norm / norm;
      }
      sgd_update(params, config.learning_rate * scale);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total / static_cast<double>(n);
    rec.validation_loss = task.validation_loss();
    if (!std::isfinite(rec.validation_loss)) {
      throw Error(ErrorCode::kDivergence, "non-finite validation loss in epoch " + std::to_string(epoch));
    }
    history.epochs.push_back(rec);
    if (rec.validation_loss < history.best_validation_loss || history.best_epoch == 0) {
      history.best_validation_loss = rec.validation_loss;
      history.best_epoch = epoch;
      since_best = 0;
      snapshot();
    } else if (++since_best >= config.patience) {
      history.early_stopped = true;
      break;
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];
  for (std::size_t i = 0; i < buffers.size(); ++i) *buffers[i] = best_buffers[i];
  return history;
}

}  // namespace incivil::nn
