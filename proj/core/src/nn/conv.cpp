#include "incivil/nn/conv.hpp"

#include <algorithm>

#include "incivil/nn/layers.hpp"

namespace incivil::nn {

namespace {

// Examples per reduction chunk; fixed so weight-gradient sums do not depend on
// the number of worker threads.
constexpr std::size_t kChunk = 8;

struct ConvDims {
  std::size_t n, c, h, w, f, kh, kw, oh, ow;
};

ConvDims dims_of(const Conv2d& conv, const Tensor& x) {
  if (x.rank() != 4) throw Error(ErrorCode::kDimensionMismatch, "conv2d expects [N,C,H,W]");
  if (x.dim(1) != conv.in_channels()) {
    throw Error(ErrorCode::kDimensionMismatch, conv.filters.name + ": expected " + std::to_string(conv.in_channels()) +
                                                   " input channels, got " + std::to_string(x.dim(1)));
  }
  ConvDims d{x.dim(0), x.dim(1), x.dim(2), x.dim(3), conv.n_filters(), conv.kernel_h(), conv.kernel_w(), 0, 0};
  d.oh = conv_output_size(d.h, d.kh);
  d.ow = conv_output_size(d.w, d.kw);
  return d;
}

/// Unfolds one example into cols [C*kh*kw, oh*ow].
void im2col(const ConvDims& d, const double* in, double* cols) {
  const std::size_t plane = d.oh * d.ow;
  for (std::size_t c = 0; c < d.c; ++c) {
    const double* ic = in + c * d.h * d.w;
    for (std::size_t ki = 0; ki < d.kh; ++ki) {
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        double* col = cols + ((c * d.kh + ki) * d.kw + kj) * plane;
        for (std::size_t i = 0; i < d.oh; ++i) {
          const double* row = ic + (i + ki) * d.w + kj;
          std::copy(row, row + d.ow, col + i * d.ow);
        }
      }
    }
  }
}

/// Adds cols back onto the input layout.
void col2im(const ConvDims& d, const double* cols, double* in) {
  const std::size_t plane = d.oh * d.ow;
  for (std::size_t c = 0; c < d.c; ++c) {
    double* ic = in + c * d.h * d.w;
    for (std::size_t ki = 0; ki < d.kh; ++ki) {
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        const double* col = cols + ((c * d.kh + ki) * d.kw + kj) * plane;
        for (std::size_t i = 0; i < d.oh; ++i) {
          double* row = ic + (i + ki) * d.w + kj;
          const double* src = col + i * d.ow;
          for (std::size_t j = 0; j < d.ow; ++j) row[j] += src[j];
        }
      }
    }
  }
}

void forward_one(const Conv2d& conv, const ConvDims& d, const double* in, double* out, std::vector<double>& cols) {
  const std::size_t plane = d.oh * d.ow, ck = d.c * d.kh * d.kw;
  cols.resize(ck * plane);
  im2col(d, in, cols.data());
  const double* wt = conv.filters.value.data();
  for (std::size_t f = 0; f < d.f; ++f) {
    double* of = out + f * plane;
    std::fill(of, of + plane, conv.bias.value[f]);
    const double* wf = wt + f * ck;
    for (std::size_t k = 0; k < ck; ++k) {
      const double wv = wf[k];
      const double* col = cols.data() + k * plane;
      for (std::size_t p = 0; p < plane; ++p) of[p] += wv * col[p];
    }
  }
}

}  // namespace

std::size_t conv_output_size(std::size_t in, std::size_t kernel) {
  if (kernel == 0 || in < kernel) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input extent " + std::to_string(in) + " smaller than kernel " + std::to_string(kernel));
  }
  return in - kernel + 1;
}

Conv2d::Conv2d(std::string name, std::size_t in_channels, std::size_t n_filters, std::size_t kh, std::size_t kw,
               Rng& rng)
    : filters(name + ".filters", Tensor({n_filters, in_channels, kh, kw})), bias(name + ".bias", Tensor({n_filters})) {
  if (kh == 0 || kw == 0) throw Error(ErrorCode::kInvalidArgument, "kernel size must be >= 1");
  glorot_uniform(filters.value, in_channels * kh * kw, n_filters * kh * kw, rng);
}

Tensor Conv2d::forward(const Tensor& x) {
  Tensor y = apply(x);
  input_ = x;
  return y;
}

Tensor Conv2d::apply(const Tensor& x) const {
  const ConvDims d = dims_of(*this, x);
  Tensor y({d.n, d.f, d.oh, d.ow});
  const std::size_t in_stride = d.c * d.h * d.w, out_stride = d.f * d.oh * d.ow;
  parallel_for(d.n, [&](std::size_t i) {
    thread_local std::vector<double> cols;
    forward_one(*this, d, x.data() + i * in_stride, y.data() + i * out_stride, cols);
  });
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  if (!input_) throw Error(ErrorCode::kState, "Conv2d: backward called before forward");
  const Tensor& x = *input_;
  const ConvDims d = dims_of(*this, x);
  if (dy.shape() != std::vector<std::size_t>{d.n, d.f, d.oh, d.ow}) {
    throw Error(ErrorCode::kDimensionMismatch, filters.name + ": bad upstream gradient shape");
  }
  Tensor dx(x.shape());
  const std::size_t in_stride = d.c * d.h * d.w, out_stride = d.f * d.oh * d.ow;
  const std::size_t n_chunks = (d.n + kChunk - 1) / kChunk;
  const std::size_t wsize = filters.value.size();
  std::vector<std::vector<double>> gw(n_chunks, std::vector<double>(wsize, 0.0));
  std::vector<std::vector<double>> gb(n_chunks, std::vector<double>(d.f, 0.0));
  const double* wt = filters.value.data();
  const std::size_t plane = d.oh * d.ow, ck = d.c * d.kh * d.kw;
  parallel_for(n_chunks, [&](std::size_t chunk) {
    double* gwc = gw[chunk].data();
    double* gbc = gb[chunk].data();
    std::vector<double> cols(ck * plane), dcols(ck * plane);
    const std::size_t end = std::min(d.n, (chunk + 1) * kChunk);
    for (std::size_t n = chunk * kChunk; n < end; ++n) {
      im2col(d, x.data() + n * in_stride, cols.data());
      std::fill(dcols.begin(), dcols.end(), 0.0);
      const double* g = dy.data() + n * out_stride;
      for (std::size_t f = 0; f < d.f; ++f) {
        const double* gf = g + f * plane;
        double sb = 0.0;
        for (std::size_t p = 0; p < plane; ++p) sb += gf[p];
        gbc[f] += sb;
        const double* wf = wt + f * ck;
        double* gwf = gwc + f * ck;
        for (std::size_t k = 0; k < ck; ++k) {
          const double* col = cols.data() + k * plane;
          double* dcol = dcols.data() + k * plane;
          const double wv = wf[k];
          double acc = 0.0;
          for (std::size_t p = 0; p < plane; ++p) {
            acc += gf[p] * col[p];
            dcol[p] += wv * gf[p];
          }
          gwf[k] += acc;
        }
      }
      col2im(d, dcols.data(), dx.data() + n * in_stride);
    }
  });
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
    for (std::size_t k = 0; k < wsize; ++k) filters.grad[k] += gw[chunk][k];
    for (std::size_t f = 0; f < d.f; ++f) bias.grad[f] += gb[chunk][f];
  }
  return dx;
}

Tensor conv2d_forward(const Conv2d& conv, const Tensor& input) {
  if (input.rank() != 3) throw Error(ErrorCode::kDimensionMismatch, "conv2d_forward expects [C,H,W]");
  Tensor y = conv.apply(input.reshaped({1, input.dim(0), input.dim(1), input.dim(2)}));
  return y.reshaped({y.dim(1), y.dim(2), y.dim(3)});
}

Tensor maxpool2(const Tensor& input) {
  if (input.rank() != 3) throw Error(ErrorCode::kDimensionMismatch, "maxpool2 expects [C,H,W]");
  MaxPool2 pool;
  Tensor y = pool.forward(input.reshaped({1, input.dim(0), input.dim(1), input.dim(2)}));
  return y.reshaped({y.dim(1), y.dim(2), y.dim(3)});
}

}  // namespace incivil::nn
