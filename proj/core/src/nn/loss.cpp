#include "incivil/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace incivil::nn {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (auto& v : out) v /= z;
  return out;
}

double cross_entropy(std::span<const double> probabilities, std::size_t gold) {
  if (gold >= probabilities.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "gold class " + std::to_string(gold) + " out of range for " + std::to_string(probabilities.size()));
  }
  return -std::log(std::max(probabilities[gold], kProbabilityFloor));
}

SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::span<const std::size_t> gold) {
  if (logits.rank() != 2 || logits.dim(0) != gold.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "softmax_cross_entropy: logits/gold mismatch");
  }
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  SoftmaxLoss out;
  out.dlogits = Tensor({n, c});
  out.probabilities = Tensor({n, c});
  for (std::size_t r = 0; r < n; ++r) {
    auto p = softmax(logits.values().subspan(r * c, c));
    out.loss += cross_entropy(p, gold[r]);
    for (std::size_t k = 0; k < c; ++k) {
      out.probabilities.at(r, k) = p[k];
      out.dlogits.at(r, k) = (p[k] - (k == gold[r] ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  out.loss /= static_cast<double>(n);
  return out;
}

}  // namespace incivil::nn
