#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "incivil/nn/tensor.hpp"

namespace incivil::nn {

/// Versioned model container: config echo, vocabulary, named parameter
/// tensors (hex-float encoded, so round trips are exact), buffers such as
/// batch-norm running statistics, and the RNG seed.
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::string kind;
  std::uint64_t seed = 0;
  /// JSON object text echoing the configuration the model was built with.
  std::string config_json = "{}";
  std::vector<std::string> vocab;
  std::map<std::string, Tensor> params;
  std::map<std::string, Tensor> buffers;
  /// Free-form JSON object text for model-specific metadata.
  std::string extra_json = "{}";

  std::string serialize() const;
  static Checkpoint parse(std::string_view text);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  const Tensor& param(const std::string& name) const;
  const Tensor& buffer(const std::string& name) const;
};

void store_parameters(Checkpoint& ckpt, const std::vector<Parameter*>& params);
/// Copies tensors into matching parameters; throws on missing names or shape mismatch.
void restore_parameters(const Checkpoint& ckpt, const std::vector<Parameter*>& params);

}  // namespace incivil::nn
