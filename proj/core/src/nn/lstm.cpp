#include "incivil/nn/lstm.hpp"

#include <cmath>

namespace incivil::nn {

namespace {

double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  double e = std::exp(v);
  return e / (1.0 + e);
}

void gate_preactivation(const Parameter& w, const Parameter& b, const std::vector<double>& z,
                        std::vector<double>& out) {
  const std::size_t h = w.value.dim(0), cols = w.value.dim(1);
  out.assign(h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = w.value.data() + r * cols;
    double acc = b.value[r];
    for (std::size_t k = 0; k < cols; ++k) acc += row[k] * z[k];
    out[r] = acc;
  }
}

std::vector<LstmStepCache> run_sequence(const LstmCell& cell, const Tensor& xs) {
  if (xs.rank() != 2 || xs.dim(0) == 0) throw Error(ErrorCode::kInvalidArgument, "LSTM needs a non-empty [T, d] sequence");
  const std::size_t T = xs.dim(0), d = xs.dim(1), h = cell.hidden_dim();
  if (d != cell.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "LSTM input dim " + std::to_string(d) + " != " +
                                                   std::to_string(cell.input_dim()));
  }
  std::vector<LstmStepCache> caches;
  caches.reserve(T);
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    caches.push_back(lstm_step_cached(cell, std::span<const double>(xs.data() + t * d, d), hs, cs));
    hs = caches.back().h;
    cs = caches.back().c;
  }
  return caches;
}

Tensor backprop_sequence(LstmCell& cell, const std::vector<LstmStepCache>& caches, std::span<const double> dh_last) {
  const std::size_t T = caches.size(), d = cell.input_dim(), h = cell.hidden_dim();
  Tensor dxs({T, d});
  std::vector<double> dh(dh_last.begin(), dh_last.end());
  std::vector<double> dc(h, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    auto g = lstm_step_backward(cell, caches[t], dh, dc);
    std::copy(g.dx.begin(), g.dx.end(), dxs.data() + t * d);
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
  return dxs;
}

}  // namespace

LstmCell::LstmCell(std::string name, std::size_t input_dim, std::size_t hidden_dim, Rng& rng)
    : LstmCell(zeros(std::move(name), input_dim, hidden_dim)) {
  for (Parameter* w : {&W_f, &W_i, &W_C, &W_o}) glorot_uniform(w->value, hidden_dim + input_dim, hidden_dim, rng);
}

LstmCell LstmCell::zeros(std::string name, std::size_t input_dim, std::size_t hidden_dim) {
  if (hidden_dim == 0 || input_dim == 0) throw Error(ErrorCode::kInvalidArgument, "LSTM dims must be positive");
  LstmCell c;
  const std::vector<std::size_t> wshape{hidden_dim, hidden_dim + input_dim}, bshape{hidden_dim};
  c.W_f = Parameter(name + ".W_f", Tensor(wshape));
  c.W_i = Parameter(name + ".W_i", Tensor(wshape));
  c.W_C = Parameter(name + ".W_C", Tensor(wshape));
  c.W_o = Parameter(name + ".W_o", Tensor(wshape));
  c.b_f = Parameter(name + ".b_f", Tensor(bshape));
  c.b_i = Parameter(name + ".b_i", Tensor(bshape));
  c.b_C = Parameter(name + ".b_C", Tensor(bshape));
  c.b_o = Parameter(name + ".b_o", Tensor(bshape));
  return c;
}

void LstmCell::validate() const {
  if (W_f.value.rank() != 2) throw Error(ErrorCode::kDimensionMismatch, "LSTM weights must be matrices");
  const auto wshape = W_f.value.shape();
  const std::vector<std::size_t> bshape{wshape[0]};
  if (wshape[1] <= wshape[0]) throw Error(ErrorCode::kDimensionMismatch, "LSTM weight must be [h, h+d] with d >= 1");
  for (const Parameter* w : {&W_i, &W_C, &W_o})
    if (w->value.shape() != wshape) throw Error(ErrorCode::kDimensionMismatch, "inconsistent LSTM weight " + w->name);
  for (const Parameter* b : {&b_f, &b_i, &b_C, &b_o})
    if (b->value.shape() != bshape) throw Error(ErrorCode::kDimensionMismatch, "inconsistent LSTM bias " + b->name);
}

LstmStepCache lstm_step_cached(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                               std::span<const double> c_prev) {
  cell.validate();
  const std::size_t h = cell.hidden_dim(), d = cell.input_dim();
  if (x.size() != d || h_prev.size() != h || c_prev.size() != h) {
    throw Error(ErrorCode::kDimensionMismatch, "lstm_step: expected x[" + std::to_string(d) + "], h/c[" +
                                                   std::to_string(h) + "]");
  }
  LstmStepCache k;
  k.z.reserve(h + d);
  k.z.insert(k.z.end(), h_prev.begin(), h_prev.end());
  k.z.insert(k.z.end(), x.begin(), x.end());
  k.c_prev.assign(c_prev.begin(), c_prev.end());
  gate_preactivation(cell.W_f, cell.b_f, k.z, k.f);
  gate_preactivation(cell.W_i, cell.b_i, k.z, k.i);
  gate_preactivation(cell.W_C, cell.b_C, k.z, k.g);
  gate_preactivation(cell.W_o, cell.b_o, k.z, k.o);
  k.c.resize(h);
  k.tanh_c.resize(h);
  k.h.resize(h);
  for (std::size_t r = 0; r < h; ++r) {
    k.f[r] = sigmoid(k.f[r]);
    k.i[r] = sigmoid(k.i[r]);
    k.g[r] = std::tanh(k.g[r]);
    k.o[r] = sigmoid(k.o[r]);
    k.c[r] = k.f[r] * c_prev[r] + k.i[r] * k.g[r];
    k.tanh_c[r] = std::tanh(k.c[r]);
    k.h[r] = k.o[r] * k.tanh_c[r];
  }
  return k;
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev) {
  auto k = lstm_step_cached(cell, x, h_prev, c_prev);
  return {std::move(k.h), std::move(k.c)};
}

LstmStepGrads lstm_step_backward(LstmCell& cell, const LstmStepCache& k, std::span<const double> dh,
                                 std::span<const double> dc_next) {
  const std::size_t h = cell.hidden_dim(), d = cell.input_dim(), cols = h + d;
  if (dh.size() != h || dc_next.size() != h) throw Error(ErrorCode::kDimensionMismatch, "lstm_step_backward dims");
  std::vector<double> da_f(h), da_i(h), da_g(h), da_o(h);
  LstmStepGrads out;
  out.dc_prev.resize(h);
  for (std::size_t r = 0; r < h; ++r) {
    const double dc = dc_next[r] + dh[r] * k.o[r] * (1.0 - k.tanh_c[r] * k.tanh_c[r]);
    const double d_o = dh[r] * k.tanh_c[r];
    const double d_f = dc * k.c_prev[r];
    const double d_i = dc * k.g[r];
    const double d_g = dc * k.i[r];
    out.dc_prev[r] = dc * k.f[r];
    da_f[r] = d_f * k.f[r] * (1.0 - k.f[r]);
    da_i[r] = d_i * k.i[r] * (1.0 - k.i[r]);
    da_g[r] = d_g * (1.0 - k.g[r] * k.g[r]);
    da_o[r] = d_o * k.o[r] * (1.0 - k.o[r]);
  }
  std::vector<double> dz(cols, 0.0);
  auto accumulate = [&](Parameter& w, Parameter& b, const std::vector<double>& da) {
    double* gw = w.grad.data();
    const double* wv = w.value.data();
    for (std::size_t r = 0; r < h; ++r) {
      b.grad[r] += da[r];
      double* grow = gw + r * cols;
      const double* wrow = wv + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        grow[c] += da[r] * k.z[c];
        dz[c] += da[r] * wrow[c];
      }
    }
  };
  accumulate(cell.W_f, cell.b_f, da_f);
  accumulate(cell.W_i, cell.b_i, da_i);
  accumulate(cell.W_C, cell.b_C, da_g);
  accumulate(cell.W_o, cell.b_o, da_o);
  out.dh_prev.assign(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(h));
  out.dx.assign(dz.begin() + static_cast<std::ptrdiff_t>(h), dz.end());
  return out;
}

std::vector<double> lstm_final_state(const LstmCell& cell, const Tensor& xs) {
  if (xs.rank() != 2 || xs.dim(0) == 0) throw Error(ErrorCode::kInvalidArgument, "LSTM needs a non-empty [T, d] sequence");
  const std::size_t T = xs.dim(0), d = xs.dim(1), h = cell.hidden_dim();
  if (d != cell.input_dim()) throw Error(ErrorCode::kDimensionMismatch, "LSTM input dim mismatch");
  LstmState s{std::vector<double>(h, 0.0), std::vector<double>(h, 0.0)};
  for (std::size_t t = 0; t < T; ++t) s = lstm_step(cell, std::span<const double>(xs.data() + t * d, d), s.h, s.c);
  return s.h;
}

Tensor LstmRunner::forward(const Tensor& xs) {
  caches_ = run_sequence(*cell_, xs);
  ready_ = true;
  return Tensor::vector(caches_.back().h);
}

Tensor LstmRunner::backward(const Tensor& dh_last) {
  if (!ready_) throw Error(ErrorCode::kState, "LstmRunner: backward called before forward");
  return backprop_sequence(*cell_, caches_, dh_last.values());
}

Tensor reverse_rows(const Tensor& xs) {
  const std::size_t T = xs.dim(0), d = xs.size() / std::max<std::size_t>(T, 1);
  Tensor out(xs.shape());
  for (std::size_t t = 0; t < T; ++t)
    std::copy(xs.data() + (T - 1 - t) * d, xs.data() + (T - t) * d, out.data() + t * d);
  return out;
}

Tensor bilstm_encode(const LstmCell& fwd, const LstmCell& bwd, const Tensor& xs) {
  std::vector<double> out = lstm_final_state(fwd, xs);
  auto b = lstm_final_state(bwd, reverse_rows(xs));
  out.insert(out.end(), b.begin(), b.end());
  return Tensor::vector(std::move(out));
}

BiLstm::BiLstm(std::string name, std::size_t input_dim, std::size_t hidden_dim, Rng& rng)
    : fwd(name + ".fwd", input_dim, hidden_dim, rng), bwd(name + ".bwd", input_dim, hidden_dim, rng) {}

std::vector<Parameter*> BiLstm::parameters() {
  auto p = fwd.parameters();
  auto q = bwd.parameters();
  p.insert(p.end(), q.begin(), q.end());
  return p;
}

Tensor BiLstm::forward(const Tensor& xs) {
  fwd_caches_ = run_sequence(fwd, xs);
  bwd_caches_ = run_sequence(bwd, reverse_rows(xs));
  ready_ = true;
  std::vector<double> out = fwd_caches_.back().h;
  out.insert(out.end(), bwd_caches_.back().h.begin(), bwd_caches_.back().h.end());
  return Tensor::vector(std::move(out));
}

Tensor BiLstm::backward(const Tensor& d_out) {
  if (!ready_) throw Error(ErrorCode::kState, "BiLstm: backward called before forward");
  const std::size_t h = hidden_dim();
  if (d_out.size() != 2 * h) throw Error(ErrorCode::kDimensionMismatch, "BiLstm gradient shape");
  Tensor dxf = backprop_sequence(fwd, fwd_caches_, d_out.values().subspan(0, h));
  Tensor dxb = reverse_rows(backprop_sequence(bwd, bwd_caches_, d_out.values().subspan(h, h)));
  for (std::size_t i = 0; i < dxf.size(); ++i) dxf[i] += dxb[i];
  return dxf;
}

}  // namespace incivil::nn
