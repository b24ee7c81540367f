#include "incivil/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "incivil/nn/train.hpp"

namespace incivil::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult gradient_check(const std::string& name, std::span<Parameter* const> params,
                               const std::function<double()>& loss_fn, const std::function<void()>& backward_fn,
                               const std::function<Signature()>& signature_fn, const GradCheckOptions& options) {
  GradCheckResult result;
  result.name = name;
  zero_grads(params);
  backward_fn();
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const Parameter* p : params) analytic.push_back(p->grad);

  Signature base;
  if (signature_fn) {
    loss_fn();
    base = signature_fn();
  }

  Rng rng(options.seed);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    if (!p.trainable) continue;
    std::vector<std::size_t> entries;
    for (std::size_t e = 0; e < p.value.size(); ++e)
      if (!options.entry_filter || options.entry_filter(p, e)) entries.push_back(e);
    if (options.max_entries_per_tensor > 0 && entries.size() > options.max_entries_per_tensor) {
      std::shuffle(entries.begin(), entries.end(), rng);
      entries.resize(options.max_entries_per_tensor);
      std::sort(entries.begin(), entries.end());
    }
    for (std::size_t e : entries) {
      const double saved = p.value[e];
      p.value[e] = saved + options.step;
      const double up = loss_fn();
      const bool up_kink = signature_fn && signature_fn() != base;
      p.value[e] = saved - options.step;
      const double down = loss_fn();
      const bool down_kink = signature_fn && signature_fn() != base;
      p.value[e] = saved;
      if (up_kink || down_kink) {
        ++result.skipped;
        continue;
      }
      const double numeric = (up - down) / (2.0 * options.step);
      const double err = relative_error(analytic[pi][e], numeric, options.floor);
      ++result.checked;
      if (err > result.max_rel_error || result.worst_entry.empty()) {
        result.max_rel_error = err;
        result.worst_entry = p.name + "[" + std::to_string(e) + "]";
        result.worst_analytic = analytic[pi][e];
        result.worst_numeric = numeric;
      }
    }
  }
  for (std::size_t pi = 0; pi < params.size(); ++pi) params[pi]->grad = analytic[pi];
  return result;
}

}  // namespace incivil::nn
