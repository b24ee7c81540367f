#pragma once

// Finite-difference checks of every trainable component at desk scale.

#include <cstdint>
#include <vector>

#include "incivil/nn/gradcheck.hpp"

namespace incivil::gradsuite {

inline constexpr double kTolerance = 1e-4;

struct SuiteOptions {
  std::uint64_t seed = 11;
  /// Entries sampled per tensor for the end-to-end models.
  std::size_t end_to_end_samples = 24;
  nn::GradCheckOptions check;
};

nn::GradCheckResult check_embedding(const SuiteOptions& o = {});
nn::GradCheckResult check_dense(const SuiteOptions& o = {});
nn::GradCheckResult check_lstm_cell(const SuiteOptions& o = {});
nn::GradCheckResult check_bilstm(const SuiteOptions& o = {});
nn::GradCheckResult check_conv2d(const SuiteOptions& o = {});
nn::GradCheckResult check_batchnorm(const SuiteOptions& o = {});
nn::GradCheckResult check_charcnn(const SuiteOptions& o = {});
nn::GradCheckResult check_charbilstm(const SuiteOptions& o = {});
nn::GradCheckResult check_tdlstm(const SuiteOptions& o = {});
nn::GradCheckResult check_fusion(const SuiteOptions& o = {});
/// Every hidden-layer weight reading the conflict input, checked exhaustively.
nn::GradCheckResult check_fusion_conflict_weights(const SuiteOptions& o = {});

std::vector<nn::GradCheckResult> run_all(const SuiteOptions& o = {});

}  // namespace incivil::gradsuite
