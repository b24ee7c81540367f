#include "incivil/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace incivil::nn {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream ss;
  ss << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) ss << (i ? "," : "") << shape[i];
  ss << ']';
  return ss.str();
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "tensor data size " + std::to_string(data_.size()) + " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::vector(std::vector<double> data) {
  std::size_t n = data.size();
  return Tensor({n}, std::move(data));
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::reshape(std::vector<std::size_t> shape) {
  if (shape_product(shape) != data_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  shape_ = std::move(shape);
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  Tensor t = *this;
  t.reshape(std::move(shape));
  return t;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  uniform_fill(t, -r, r, rng);
}

void uniform_fill(Tensor& t, double low, double high, Rng& rng) {
  std::uniform_real_distribution<double> dist(low, high);
  for (auto& v : t.values()) v = dist(rng);
}

}  // namespace incivil::nn
