#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

inline constexpr double kProbabilityFloor = 1e-12;

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);

/// -ln(max(p_gold, 1e-12)).
double cross_entropy(std::span<const double> probabilities, std::size_t gold);

struct SoftmaxLoss {
  double loss = 0.0;
  /// Mean-loss gradient w.r.t. the logits, [N, C].
  Tensor dlogits;
  /// Row-wise probabilities, [N, C].
  Tensor probabilities;
};

/// Mean softmax cross-entropy over the rows of logits [N, C].
SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::span<const std::size_t> gold);

}  // namespace incivil::nn
