#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

struct GradCheckOptions {
  double step = 1e-4;
  /// Entries checked per tensor, sampled without replacement; 0 checks all.
  std::size_t max_entries_per_tensor = 0;
  std::uint64_t seed = 7;
  /// Denominator floor for the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-5;
  /// When set, only entries it accepts are candidates for checking.
  std::function<bool(const Parameter&, std::size_t)> entry_filter;
};

struct GradCheckResult {
  std::string name;
  double max_rel_error = 0.0;
  std::string worst_entry;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  /// Entries whose +/- step crossed a non-differentiable point (ReLU or
  /// max-pool selection changed), so central differences are meaningless.
  std::size_t skipped = 0;

  bool passed(double tolerance) const { return checked > 0 && max_rel_error < tolerance; }
};

using Signature = std::vector<std::uint8_t>;

/// Compares analytic gradients with central finite differences.
///
/// `loss_fn` evaluates the scalar loss at the current parameter values.
/// `backward_fn` runs forward + backward and leaves dL/dparam in each
/// Parameter::grad (gradients are zeroed before it runs). `signature_fn`, when
/// given, reports the piecewise pattern of the last loss_fn call.
GradCheckResult gradient_check(const std::string& name, std::span<Parameter* const> params,
                               const std::function<double()>& loss_fn, const std::function<void()>& backward_fn,
                               const std::function<Signature()>& signature_fn = {},
                               const GradCheckOptions& options = {});

double relative_error(double analytic, double numeric, double floor);

}  // namespace incivil::nn
