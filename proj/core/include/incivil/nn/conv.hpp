#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

/// Valid (unpadded, stride 1) 2-D cross-correlation plus bias. No activation.
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, std::size_t in_channels, std::size_t n_filters, std::size_t kh, std::size_t kw, Rng& rng);

  /// x: [N, C, H, W] -> [N, F, H-kh+1, W-kw+1].
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& dy);
  Tensor apply(const Tensor& x) const;

  std::size_t n_filters() const { return filters.value.dim(0); }
  std::size_t in_channels() const { return filters.value.dim(1); }
  std::size_t kernel_h() const { return filters.value.dim(2); }
  std::size_t kernel_w() const { return filters.value.dim(3); }
  std::vector<Parameter*> parameters() { return {&filters, &bias}; }

  Parameter filters;  // [F, C, kh, kw]
  Parameter bias;     // [F]

 private:
  std::optional<Tensor> input_;
};

/// Single-example form: input [C, H, W] -> [F, H-kh+1, W-kw+1].
Tensor conv2d_forward(const Conv2d& conv, const Tensor& input);
/// Output spatial size of a valid convolution; throws when the input is smaller than the kernel.
std::size_t conv_output_size(std::size_t in, std::size_t kernel);

/// Single-example form of MaxPool2: [C, H, W] -> [C, H/2, W/2].
Tensor maxpool2(const Tensor& input);

}  // namespace incivil::nn
