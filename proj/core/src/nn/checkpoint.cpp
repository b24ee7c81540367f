#include "incivil/nn/checkpoint.hpp"

#include "json.hpp"

namespace incivil::nn {

using nlohmann::json;

namespace {

json tensor_to_json(const Tensor& t) {
  json j;
  j["shape"] = t.shape();
  json data = json::array();
  for (double v : t.values()) data.push_back(hexfloat(v));
  j["data"] = std::move(data);
  return j;
}

Tensor tensor_from_json(const json& j) {
  auto shape = j.at("shape").get<std::vector<std::size_t>>();
  std::vector<double> data;
  for (const auto& v : j.at("data")) data.push_back(parse_hexfloat(v.get<std::string>()));
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

std::string Checkpoint::serialize() const {
  json j;
  j["format"] = "incivil-checkpoint";
  j["version"] = kVersion;
  j["kind"] = kind;
  j["seed"] = seed;
  j["config"] = json::parse(config_json);
  j["vocab"] = vocab;
  json p = json::object();
  for (const auto& [name, t] : params) p[name] = tensor_to_json(t);
  j["params"] = std::move(p);
  json b = json::object();
  for (const auto& [name, t] : buffers) b[name] = tensor_to_json(t);
  j["buffers"] = std::move(b);
  j["extra"] = json::parse(extra_json);
  return j.dump(1) + "\n";
}

Checkpoint Checkpoint::parse(std::string_view text) {
  try {
    json j = json::parse(text);
    if (j.value("format", "") != "incivil-checkpoint") throw Error(ErrorCode::kParse, "not an incivil checkpoint");
    if (j.at("version").get<int>() != kVersion) {
      throw Error(ErrorCode::kParse, "unsupported checkpoint version " + j.at("version").dump());
    }
    Checkpoint c;
    c.kind = j.at("kind").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.config_json = j.at("config").dump();
    c.vocab = j.at("vocab").get<std::vector<std::string>>();
    for (const auto& [name, t] : j.at("params").items()) c.params.emplace(name, tensor_from_json(t));
    for (const auto& [name, t] : j.at("buffers").items()) c.buffers.emplace(name, tensor_from_json(t));
    c.extra_json = j.at("extra").dump();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed checkpoint: ") + e.what());
  }
}

void Checkpoint::save(const std::string& path) const { write_file(path, serialize()); }

Checkpoint Checkpoint::load(const std::string& path) {
  if (!file_exists(path)) throw Error(ErrorCode::kMissingInput, "checkpoint not found: " + path);
  return parse(read_file(path));
}

const Tensor& Checkpoint::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw Error(ErrorCode::kParse, "checkpoint lacks parameter '" + name + "'");
  return it->second;
}

const Tensor& Checkpoint::buffer(const std::string& name) const {
  auto it = buffers.find(name);
  if (it == buffers.end()) throw Error(ErrorCode::kParse, "checkpoint lacks buffer '" + name + "'");
  return it->second;
}

void store_parameters(Checkpoint& ckpt, const std::vector<Parameter*>& params) {
  for (const Parameter* p : params) ckpt.params[p->name] = p->value;
}

void restore_parameters(const Checkpoint& ckpt, const std::vector<Parameter*>& params) {
  for (Parameter* p : params) {
    const Tensor& t = ckpt.param(p->name);
    if (!t.same_shape(p->value)) {
      throw Error(ErrorCode::kDimensionMismatch, "checkpoint tensor '" + p->name + "' has shape " +
                                                     shape_string(t.shape()) + ", model expects " +
                                                     shape_string(p->value.shape()));
    }
    p->value = t;
  }
}

}  // namespace incivil::nn
