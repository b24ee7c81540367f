#include "incivil/nn/layers.hpp"

#include <cmath>

namespace incivil::nn {

namespace {

[[noreturn]] void no_forward(const char* layer) {
  throw Error(ErrorCode::kState, std::string(layer) + ": backward called before forward");
}

}  // namespace

Dense::Dense(std::string name, std::size_t in, std::size_t out, Rng& rng)
    : weight(name + ".weight", Tensor({out, in})), bias(name + ".bias", Tensor({out})) {
  glorot_uniform(weight.value, in, out, rng);
}

Tensor Dense::forward(const Tensor& x) {
  Tensor y = apply(x);
  input_ = x;
  return y;
}

Tensor Dense::apply(const Tensor& x) const {
  const std::size_t in = in_features(), out = out_features();
  if (x.rank() != 2 || x.dim(1) != in) {
    throw Error(ErrorCode::kDimensionMismatch,
                weight.name + ": expected [N," + std::to_string(in) + "], got " + shape_string(x.shape()));
  }
  const std::size_t n = x.dim(0);
  Tensor y({n, out});
  const double* w = weight.value.data();
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x.data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w + o * in;
      double acc = bias.value[o];
      for (std::size_t i = 0; i < in; ++i) acc += wo[i] * xr[i];
      y.at(r, o) = acc;
    }
  }
  return y;
}

Tensor Dense::backward(const Tensor& dy) {
  if (!input_) no_forward("Dense");
  const Tensor& x = *input_;
  const std::size_t n = x.dim(0), in = in_features(), out = out_features();
  if (dy.rank() != 2 || dy.dim(0) != n || dy.dim(1) != out) {
    throw Error(ErrorCode::kDimensionMismatch, weight.name + ": bad upstream gradient shape");
  }
  Tensor dx({n, in});
  double* gw = weight.grad.data();
  const double* w = weight.value.data();
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x.data() + r * in;
    double* dxr = dx.data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dy.at(r, o);
      bias.grad[o] += g;
      double* gwo = gw + o * in;
      const double* wo = w + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gwo[i] += g * xr[i];
        dxr[i] += g * wo[i];
      }
    }
  }
  return dx;
}

Embedding::Embedding(std::string name, std::size_t vocab, std::size_t dim, Rng& rng,
                     std::optional<std::int32_t> pad_index)
    : table(name + ".table", Tensor({vocab, dim})), pad_(pad_index) {
  uniform_fill(table.value, -0.1, 0.1, rng);
  if (pad_) {
    for (std::size_t j = 0; j < dim; ++j) table.value.at(static_cast<std::size_t>(*pad_), j) = 0.0;
  }
}

Tensor Embedding::forward(const std::vector<std::int32_t>& ids, std::vector<std::size_t> prefix) {
  Tensor out = lookup(ids, std::move(prefix));
  ids_ = ids;
  return out;
}

Tensor Embedding::lookup(const std::vector<std::int32_t>& ids, std::vector<std::size_t> prefix) const {
  if (shape_product(prefix) != ids.size()) throw Error(ErrorCode::kDimensionMismatch, "embedding prefix/ids mismatch");
  const std::size_t d = dim(), v = vocab_size();
  prefix.push_back(d);
  Tensor out(prefix);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || static_cast<std::size_t>(ids[k]) >= v) {
      throw Error(ErrorCode::kVocabMismatch,
                  table.name + ": index " + std::to_string(ids[k]) + " outside vocabulary of " + std::to_string(v));
    }
    if (pad_ && ids[k] == *pad_) continue;
    const double* row = table.value.data() + static_cast<std::size_t>(ids[k]) * d;
    std::copy(row, row + d, out.data() + k * d);
  }
  return out;
}

void Embedding::backward(const Tensor& dy) {
  if (!ids_) no_forward("Embedding");
  const std::size_t d = dim();
  if (dy.size() != ids_->size() * d) throw Error(ErrorCode::kDimensionMismatch, "embedding gradient shape");
  for (std::size_t k = 0; k < ids_->size(); ++k) {
    std::int32_t id = (*ids_)[k];
    if (pad_ && id == *pad_) continue;
    double* g = table.grad.data() + static_cast<std::size_t>(id) * d;
    const double* src = dy.data() + k * d;
    for (std::size_t j = 0; j < d; ++j) g[j] += src[j];
  }
}

Tensor ReLU::forward(const Tensor& x) {
  Tensor y = x;
  mask_.assign(x.size(), false);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) {
      mask_[i] = true;
    } else {
      y[i] = 0.0;
    }
  }
  ready_ = true;
  return y;
}

Tensor ReLU::backward(const Tensor& dy) {
  if (!ready_) no_forward("ReLU");
  if (dy.size() != mask_.size()) throw Error(ErrorCode::kDimensionMismatch, "ReLU gradient shape");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!mask_[i]) dx[i] = 0.0;
  return dx;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor maxpool2_batch(const Tensor& x) {
  MaxPool2 pool;
  return pool.forward(x);
}

Tensor MaxPool2::forward(const Tensor& x) {
  if (x.rank() != 4) throw Error(ErrorCode::kDimensionMismatch, "maxpool2 expects [N,C,H,W]");
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h < 2 || w < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "maxpool2 needs H,W >= 2, got " + shape_string(x.shape()));
  }
  const std::size_t oh = h / 2, ow = w / 2;
  Tensor y({n, c, oh, ow});
  argmax_.assign(y.size(), 0);
  std::size_t o = 0;
  for (std::size_t p = 0; p < n * c; ++p) {
    const double* plane = x.data() + p * h * w;
    const std::size_t base = p * h * w;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j, ++o) {
        std::size_t best = (2 * i) * w + 2 * j;
        const std::size_t cand[3] = {best + 1, best + w, best + w + 1};
        for (std::size_t q : cand)
          if (plane[q] > plane[best]) best = q;
        y[o] = plane[best];
        argmax_[o] = base + best;
      }
    }
  }
  in_shape_ = x.shape();
  return y;
}

Tensor MaxPool2::backward(const Tensor& dy) {
  if (in_shape_.empty()) no_forward("MaxPool2");
  if (dy.size() != argmax_.size()) throw Error(ErrorCode::kDimensionMismatch, "maxpool2 gradient shape");
  Tensor dx(in_shape_);
  for (std::size_t o = 0; o < dy.size(); ++o) dx[argmax_[o]] += dy[o];
  return dx;
}

Dropout::Dropout(double p) : p_(0.0) { set_p(p); }

void Dropout::set_p(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::kInvalidArgument, "dropout probability must be in [0,1)");
  p_ = p;
}

Tensor Dropout::forward(const Tensor& x, Mode mode, Rng& rng) {
  if (mode == Mode::kEval || p_ == 0.0) {
    scale_.assign(x.size(), 1.0);
    ready_ = true;
    return x;
  }
  if (!(replay_ && ready_ && scale_.size() == x.size())) {
    std::bernoulli_distribution keep(1.0 - p_);
    const double s = 1.0 / (1.0 - p_);
    scale_.resize(x.size());
    for (auto& v : scale_) v = keep(rng) ? s : 0.0;
  }
  ready_ = true;
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= scale_[i];
  return y;
}

Tensor Dropout::backward(const Tensor& dy) {
  if (!ready_) no_forward("Dropout");
  if (dy.size() != scale_.size()) throw Error(ErrorCode::kDimensionMismatch, "dropout gradient shape");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= scale_[i];
  return dx;
}

Tensor dropout_apply(const Tensor& x, double p, Mode mode, Rng& rng) {
  Dropout d(p);
  return d.forward(x, mode, rng);
}

BatchNorm::BatchNorm(std::string name, std::size_t channels, double eps)
    : gamma(name + ".gamma", Tensor({channels}, 1.0)),
      beta(name + ".beta", Tensor({channels}, 0.0)),
      running_mean({channels}, 0.0),
      running_var({channels}, 1.0),
      eps_(eps) {}

namespace {

struct ChannelLayout {
  std::size_t n, c, inner;
};

ChannelLayout layout_of(const Tensor& x, std::size_t channels) {
  if ((x.rank() != 2 && x.rank() != 4) || x.dim(1) != channels) {
    throw Error(ErrorCode::kDimensionMismatch,
                "batchnorm expects [N," + std::to_string(channels) + "(,H,W)], got " + shape_string(x.shape()));
  }
  std::size_t inner = x.rank() == 4 ? x.dim(2) * x.dim(3) : 1;
  return {x.dim(0), channels, inner};
}

}  // namespace

Tensor BatchNorm::forward(const Tensor& x, Mode mode) {
  const auto [n, c, inner] = layout_of(x, channels());
  Tensor y(x.shape());
  Tensor xhat(x.shape());
  inv_std_.assign(c, 0.0);
  if (mode == Mode::kTrain) {
    if (n * inner < 2) throw Error(ErrorCode::kInvalidArgument, "batchnorm in train mode needs at least 2 values per channel");
    const double m = static_cast<double>(n * inner);
    for (std::size_t ch = 0; ch < c; ++ch) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* p = x.data() + (i * c + ch) * inner;
        for (std::size_t s = 0; s < inner; ++s) mean += p[s];
      }
      mean /= m;
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* p = x.data() + (i * c + ch) * inner;
        for (std::size_t s = 0; s < inner; ++s) var += (p[s] - mean) * (p[s] - mean);
      }
      var /= m;
      running_mean[ch] = kMomentum * running_mean[ch] + (1.0 - kMomentum) * mean;
      running_var[ch] = kMomentum * running_var[ch] + (1.0 - kMomentum) * var;
      const double inv = 1.0 / std::sqrt(var + eps_);
      inv_std_[ch] = inv;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = (i * c + ch) * inner;
        for (std::size_t s = 0; s < inner; ++s) {
          double h = (x[off + s] - mean) * inv;
          xhat[off + s] = h;
          y[off + s] = gamma.value[ch] * h + beta.value[ch];
        }
      }
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double inv = 1.0 / std::sqrt(running_var[ch] + eps_);
      inv_std_[ch] = inv;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = (i * c + ch) * inner;
        for (std::size_t s = 0; s < inner; ++s) {
          double h = (x[off + s] - running_mean[ch]) * inv;
          xhat[off + s] = h;
          y[off + s] = gamma.value[ch] * h + beta.value[ch];
        }
      }
    }
  }
  last_mode_ = mode;
  xhat_ = std::move(xhat);
  return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
  if (!xhat_) no_forward("BatchNorm");
  const Tensor& xhat = *xhat_;
  if (!dy.same_shape(xhat)) throw Error(ErrorCode::kDimensionMismatch, "batchnorm gradient shape");
  const auto [n, c, inner] = layout_of(dy, channels());
  Tensor dx(dy.shape());
  const double m = static_cast<double>(n * inner);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * inner;
      for (std::size_t s = 0; s < inner; ++s) {
        sum_dy += dy[off + s];
        sum_dy_xhat += dy[off + s] * xhat[off + s];
      }
    }
    gamma.grad[ch] += sum_dy_xhat;
    beta.grad[ch] += sum_dy;
    const double g = gamma.value[ch] * inv_std_[ch];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * inner;
      for (std::size_t s = 0; s < inner; ++s) {
        if (last_mode_ == Mode::kTrain) {
          dx[off + s] = g * (dy[off + s] - sum_dy / m - xhat[off + s] * sum_dy_xhat / m);
        } else {
          dx[off + s] = g * dy[off + s];
        }
      }
    }
  }
  return dx;
}

Tensor BatchNorm::apply(const Tensor& x) const {
  const auto [n, c, inner] = layout_of(x, channels());
  Tensor y(x.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double inv = 1.0 / std::sqrt(running_var[ch] + eps_);
    const double scale = gamma.value[ch] * inv;
    const double shift = beta.value[ch] - running_mean[ch] * scale;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * inner;
      for (std::size_t s = 0; s < inner; ++s) y[off + s] = x[off + s] * scale + shift;
    }
  }
  return y;
}

Tensor batchnorm_forward(BatchNorm& layer, const Tensor& x, Mode mode) { return layer.forward(x, mode); }

}  // namespace incivil::nn
