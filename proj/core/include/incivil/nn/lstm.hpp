#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

/// LSTM cell over the concatenated input [h_prev; x_t]:
///   f = sigma(W_f z + b_f), i = sigma(W_i z + b_i), g = tanh(W_C z + b_C),
///   o = sigma(W_o z + b_o), c = f*c_prev + i*g, h = o*tanh(c).
struct LstmCell {
  LstmCell() = default;
  LstmCell(std::string name, std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
  /// All weights and biases zero.
  static LstmCell zeros(std::string name, std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return W_f.value.dim(1) - W_f.value.dim(0); }
  std::size_t hidden_dim() const { return W_f.value.dim(0); }
  std::vector<Parameter*> parameters() { return {&W_f, &W_i, &W_C, &W_o, &b_f, &b_i, &b_C, &b_o}; }
  std::vector<const Parameter*> parameters() const { return {&W_f, &W_i, &W_C, &W_o, &b_f, &b_i, &b_C, &b_o}; }
  /// Throws Error(kDimensionMismatch) when the eight tensors disagree on h or d.
  void validate() const;

  Parameter W_f, W_i, W_C, W_o;  // [h, h + d]
  Parameter b_f, b_i, b_C, b_o;  // [h]
};

/// Everything one step needs for backprop.
struct LstmStepCache {
  std::vector<double> z;  // [h_prev; x]
  std::vector<double> c_prev;
  std::vector<double> f, i, g, o, c, tanh_c, h;
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

LstmStepCache lstm_step_cached(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                               std::span<const double> c_prev);
LstmState lstm_step(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev);

struct LstmStepGrads {
  std::vector<double> dx, dh_prev, dc_prev;
};

/// Backprop through one step given dL/dh_t and dL/dc_t (the latter from the
/// next step); accumulates into the cell's parameter gradients.
LstmStepGrads lstm_step_backward(LstmCell& cell, const LstmStepCache& cache, std::span<const double> dh,
                                 std::span<const double> dc);

/// Final hidden state of a cell run over xs [T, d] from zero state.
std::vector<double> lstm_final_state(const LstmCell& cell, const Tensor& xs);

/// Runs a cell over a sequence from zero state, keeping caches for backprop.
class LstmRunner {
 public:
  explicit LstmRunner(LstmCell& cell) : cell_(&cell) {}

  /// xs: [T, d]; returns the final hidden state [h]. T must be >= 1.
  Tensor forward(const Tensor& xs);
  /// dh_last: [h]; returns dL/dxs [T, d].
  Tensor backward(const Tensor& dh_last);

  std::size_t steps() const { return caches_.size(); }

 private:
  LstmCell* cell_;
  std::vector<LstmStepCache> caches_;
  bool ready_ = false;
};

/// Row order reversed: out[t] = xs[T-1-t].
Tensor reverse_rows(const Tensor& xs);

/// [h_fwd_last ; h_bwd_last] with the backward cell run over reversed xs.
Tensor bilstm_encode(const LstmCell& fwd, const LstmCell& bwd, const Tensor& xs);

/// Bidirectional encoder with backprop support.
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(std::string name, std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  Tensor forward(const Tensor& xs);
  /// d_out: [2h]; returns dL/dxs [T, d].
  Tensor backward(const Tensor& d_out);

  std::size_t hidden_dim() const { return fwd.hidden_dim(); }
  std::vector<Parameter*> parameters();

  LstmCell fwd;
  LstmCell bwd;

 private:
  std::vector<LstmStepCache> fwd_caches_, bwd_caches_;
  bool ready_ = false;
};

}  // namespace incivil::nn
