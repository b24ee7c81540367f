#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

enum class Mode { kTrain, kEval };

/// y = x W^T + b for x of shape [N, in].
class Dense {
 public:
  Dense() = default;
  Dense(std::string name, std::size_t in, std::size_t out, Rng& rng);

  Tensor forward(const Tensor& x);
  /// Accumulates parameter gradients; returns dL/dx.
  Tensor backward(const Tensor& dy);
  /// Forward without caching (inference).
  Tensor apply(const Tensor& x) const;

  std::size_t in_features() const { return weight.value.dim(1); }
  std::size_t out_features() const { return weight.value.dim(0); }
  std::vector<Parameter*> parameters() { return {&weight, &bias}; }

  Parameter weight;  // [out, in]
  Parameter bias;    // [out]

 private:
  std::optional<Tensor> input_;
};

/// Row lookup. Rows listed in `frozen_rows` (the padding row) stay zero and
/// never receive gradient.
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::string name, std::size_t vocab, std::size_t dim, Rng& rng,
            std::optional<std::int32_t> pad_index = std::nullopt);

  /// Output shape = prefix + [dim]; prod(prefix) must equal ids.size().
  Tensor forward(const std::vector<std::int32_t>& ids, std::vector<std::size_t> prefix);
  void backward(const Tensor& dy);
  Tensor lookup(const std::vector<std::int32_t>& ids, std::vector<std::size_t> prefix) const;

  std::size_t vocab_size() const { return table.value.dim(0); }
  std::size_t dim() const { return table.value.dim(1); }
  std::optional<std::int32_t> pad_index() const { return pad_; }
  std::vector<Parameter*> parameters() { return {&table}; }

  Parameter table;  // [vocab, dim]

 private:
  std::optional<std::int32_t> pad_;
  std::optional<std::vector<std::int32_t>> ids_;
};

class ReLU {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy);
  /// Activation pattern of the last forward pass.
  const std::vector<bool>& mask() const { return mask_; }

 private:
  std::vector<bool> mask_;
  bool ready_ = false;
};

/// 2x2 window, stride 2, over the last two axes of [N, C, H, W]. Odd trailing
/// row/column is dropped.
class MaxPool2 {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy);
  const std::vector<std::size_t>& argmax() const { return argmax_; }

 private:
  std::vector<std::size_t> in_shape_;
  std::vector<std::size_t> argmax_;
};

/// Inverted dropout: eval is identity, train zeroes with probability p and
/// scales survivors by 1/(1-p).
class Dropout {
 public:
  explicit Dropout(double p = 0.25);

  Tensor forward(const Tensor& x, Mode mode, Rng& rng);
  Tensor backward(const Tensor& dy);

  double p() const { return p_; }
  void set_p(double p);
  /// When set, train-mode forward reuses the previous mask instead of drawing
  /// a new one (used when replaying a pass for finite differences).
  void set_replay(bool replay) { replay_ = replay; }

 private:
  double p_;
  bool replay_ = false;
  std::vector<double> scale_;
  bool ready_ = false;
};

Tensor relu(const Tensor& x);
/// [N, C, H, W] -> [N, C, H/2, W/2] without caching.
Tensor maxpool2_batch(const Tensor& x);

Tensor dropout_apply(const Tensor& x, double p, Mode mode, Rng& rng);

/// Batch normalization over axis 1 of [N, C] or [N, C, H, W]; statistics are
/// taken over every other axis. Running statistics use momentum 0.9.
class BatchNorm {
 public:
  static constexpr double kMomentum = 0.9;

  BatchNorm() = default;
  BatchNorm(std::string name, std::size_t channels, double eps = 1e-5);

  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);
  /// Eval-mode normalization with running statistics, no caching.
  Tensor apply(const Tensor& x) const;

  std::size_t channels() const { return gamma.value.size(); }
  double eps() const { return eps_; }
  std::vector<Parameter*> parameters() { return {&gamma, &beta}; }
  std::vector<Tensor*> buffers() { return {&running_mean, &running_var}; }

  Parameter gamma;
  Parameter beta;
  Tensor running_mean;
  Tensor running_var;

 private:
  double eps_ = 1e-5;
  Mode last_mode_ = Mode::kEval;
  std::optional<Tensor> xhat_;
  std::vector<double> inv_std_;
};

Tensor batchnorm_forward(BatchNorm& layer, const Tensor& x, Mode mode);

}  // namespace incivil::nn
