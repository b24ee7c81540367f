#include <algorithm>
#include <cmath>

#include "incivil/classifier.hpp"
#include "incivil/nn/loss.hpp"
#include "json.hpp"

namespace incivil::classifier {

using nlohmann::json;
using nn::Mode;
using nn::Tensor;

namespace {

constexpr std::size_t kPredictChunk = 64;

Distribution to_distribution(std::span<const double> logits) {
  auto p = nn::softmax(logits);
  return {p[0], p[1]};
}

std::vector<std::string> vocab_strings(const text::CharVocab& vocab) {
  std::vector<std::string> out;
  for (char32_t cp : vocab.chars()) out.push_back(utf8::encode(cp));
  return out;
}

text::CharVocab vocab_from_strings(const std::vector<std::string>& strings) {
  std::u32string chars;
  for (const auto& s : strings) {
    auto cps = utf8::decode(s);
    if (cps.size() != 1) throw Error(ErrorCode::kParse, "checkpoint vocabulary entry is not one character");
    chars += cps[0];
  }
  return text::CharVocab(std::move(chars));
}

void check_vocab(const nn::Checkpoint& ckpt, const std::string& table, std::size_t rows) {
  const Tensor& t = ckpt.param(table);
  if (t.rank() != 2 || t.dim(0) != rows) {
    throw Error(ErrorCode::kVocabMismatch, "checkpoint vocabulary has " + std::to_string(rows) + " entries but " + table +
                                               " has shape " + nn::shape_string(t.shape()));
  }
}

void expect_kind(const nn::Checkpoint& ckpt, const std::string& kind) {
  if (ckpt.kind != kind) throw Error(ErrorCode::kParse, "checkpoint kind '" + ckpt.kind + "' is not " + kind);
}

json cnn_config_json(const CharCnnConfig& c) {
  return {{"max_len", c.max_len}, {"embed_dim", c.embed_dim}, {"filters", c.filters}, {"kernel", c.kernel}};
}

CharCnnConfig cnn_config_from(const json& j) {
  CharCnnConfig c;
  c.max_len = j.at("max_len").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.filters = j.at("filters").get<std::size_t>();
  c.kernel = j.at("kernel").get<std::size_t>();
  return c;
}

void store_buffers(nn::Checkpoint& c, CharCnnTrunk& trunk) {
  c.buffers["charcnn.bn1.running_mean"] = trunk.bn1.running_mean;
  c.buffers["charcnn.bn1.running_var"] = trunk.bn1.running_var;
  c.buffers["charcnn.bn2.running_mean"] = trunk.bn2.running_mean;
  c.buffers["charcnn.bn2.running_var"] = trunk.bn2.running_var;
}

void restore_buffers(const nn::Checkpoint& c, CharCnnTrunk& trunk) {
  auto copy = [&](const std::string& name, Tensor& dst) {
    const Tensor& src = c.buffer(name);
    if (!src.same_shape(dst)) throw Error(ErrorCode::kDimensionMismatch, "buffer " + name + " has the wrong shape");
    dst = src;
  };
  copy("charcnn.bn1.running_mean", trunk.bn1.running_mean);
  copy("charcnn.bn1.running_var", trunk.bn1.running_var);
  copy("charcnn.bn2.running_mean", trunk.bn2.running_mean);
  copy("charcnn.bn2.running_var", trunk.bn2.running_var);
}

template <typename T>
std::vector<const T*> pointers(const std::vector<T>& v, std::size_t begin, std::size_t end) {
  std::vector<const T*> out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(&v[i]);
  return out;
}

double mean_log_loss(const std::vector<double>& p_incivil, const std::vector<CharExample>& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double p = data[i].label == 1 ? p_incivil[i] : 1.0 - p_incivil[i];
    total += -std::log(std::max(p, nn::kProbabilityFloor));
  }
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

}  // namespace

std::vector<double> IncivilityModel::predict(const std::vector<CharExample>& batch) const {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& ex : batch) out.push_back(classify(ex.seq, ex.conflict)[1]);
  return out;
}

CharCnnShapes charcnn_shapes(const CharCnnConfig& c) {
  CharCnnShapes s;
  const std::size_t h1 = nn::conv_output_size(c.max_len, c.kernel), w1 = nn::conv_output_size(c.embed_dim, c.kernel);
  s.conv1 = {c.filters, h1, w1};
  s.pool1 = {c.filters, h1 / 2, w1 / 2};
  const std::size_t h2 = nn::conv_output_size(h1 / 2, c.kernel), w2 = nn::conv_output_size(w1 / 2, c.kernel);
  s.conv2 = {c.filters, h2, w2};
  if (h2 < 2 || w2 < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "char-CNN input " + std::to_string(c.max_len) + "x" +
                                                   std::to_string(c.embed_dim) + " too small for two conv+pool stages");
  }
  s.pool2 = {c.filters, h2 / 2, w2 / 2};
  s.flatten = s.pool2[0] * s.pool2[1] * s.pool2[2];
  return s;
}

CharCnnTrunk::CharCnnTrunk(const CharCnnConfig& config, std::size_t vocab_size, Rng& rng)
    : embedding("charcnn.embedding", vocab_size, config.embed_dim, rng, text::CharVocab::kPad),
      conv1("charcnn.conv1", 1, config.filters, config.kernel, config.kernel, rng),
      conv2("charcnn.conv2", config.filters, config.filters, config.kernel, config.kernel, rng),
      bn1("charcnn.bn1", config.filters),
      bn2("charcnn.bn2", config.filters),
      max_len_(config.max_len) {
  auto shapes = charcnn_shapes(config);
  flatten_ = shapes.flatten;
}

std::vector<std::int32_t> CharCnnTrunk::gather(const std::vector<const text::CharSeq*>& batch) const {
  if (batch.empty()) throw Error(ErrorCode::kEmpty, "empty batch");
  std::vector<std::int32_t> ids;
  ids.reserve(batch.size() * max_len_);
  for (const auto* cs : batch) {
    if (cs->indices.size() != max_len_) {
      throw Error(ErrorCode::kVocabMismatch, "sequence encoded with max_len " + std::to_string(cs->indices.size()) +
                                                 ", model expects " + std::to_string(max_len_));
    }
    ids.insert(ids.end(), cs->indices.begin(), cs->indices.end());
  }
  return ids;
}

Tensor CharCnnTrunk::forward(const std::vector<const text::CharSeq*>& batch, Mode mode) {
  const std::size_t n = batch.size();
  Tensor x = embedding.forward(gather(batch), {n, 1, max_len_});
  x = pool1_.forward(relu1_.forward(bn1.forward(conv1.forward(x), mode)));
  x = pool2_.forward(relu2_.forward(bn2.forward(conv2.forward(x), mode)));
  pooled_shape_ = x.shape();
  x.reshape({n, flatten_});
  return x;
}

void CharCnnTrunk::backward(const Tensor& dflat) {
  if (pooled_shape_.empty()) throw Error(ErrorCode::kState, "CharCnnTrunk: backward called before forward");
  Tensor d = dflat.reshaped(pooled_shape_);
  d = conv2.backward(bn2.backward(relu2_.backward(pool2_.backward(d))));
  d = conv1.backward(bn1.backward(relu1_.backward(pool1_.backward(d))));
  embedding.backward(d);
}

Tensor CharCnnTrunk::apply(const std::vector<const text::CharSeq*>& batch) const {
  const std::size_t n = batch.size();
  Tensor x = embedding.lookup(gather(batch), {n, 1, max_len_});
  x = nn::maxpool2_batch(nn::relu(bn1.apply(conv1.apply(x))));
  x = nn::maxpool2_batch(nn::relu(bn2.apply(conv2.apply(x))));
  x.reshape({n, flatten_});
  return x;
}

std::vector<nn::Parameter*> CharCnnTrunk::parameters() {
  std::vector<nn::Parameter*> p = embedding.parameters();
  for (auto* layer : {&conv1, &conv2})
    for (auto* q : layer->parameters()) p.push_back(q);
  for (auto* layer : {&bn1, &bn2})
    for (auto* q : layer->parameters()) p.push_back(q);
  return p;
}

std::vector<Tensor*> CharCnnTrunk::buffers() {
  return {&bn1.running_mean, &bn1.running_var, &bn2.running_mean, &bn2.running_var};
}

nn::Signature CharCnnTrunk::signature() const {
  nn::Signature sig;
  for (const auto* relu : {&relu1_, &relu2_})
    for (bool b : relu->mask()) sig.push_back(b ? 1 : 0);
  for (const auto* pool : {&pool1_, &pool2_}) {
    for (std::size_t a : pool->argmax())
      for (int byte = 0; byte < 4; ++byte) sig.push_back(static_cast<std::uint8_t>(a >> (8 * byte)));
  }
  return sig;
}

CharCnnModel::CharCnnModel(text::CharVocab vocab, const CharCnnConfig& config, Rng& rng)
    : trunk(config, vocab.size(), rng), vocab_(std::move(vocab)), config_(config) {
  head = nn::Dense("charcnn.head", trunk.flatten_size(), 2, rng);
}

Tensor CharCnnModel::forward(const std::vector<const CharExample*>& batch, Mode mode, Rng& rng) {
  std::vector<const text::CharSeq*> seqs;
  for (const auto* ex : batch) seqs.push_back(&ex->seq);
  return head.forward(dropout.forward(trunk.forward(seqs, mode), mode, rng));
}

void CharCnnModel::backward(const Tensor& dlogits) { trunk.backward(dropout.backward(head.backward(dlogits))); }

Tensor CharCnnModel::logits_eval(const std::vector<const CharExample*>& batch) const {
  std::vector<const text::CharSeq*> seqs;
  for (const auto* ex : batch) seqs.push_back(&ex->seq);
  return head.apply(trunk.apply(seqs));
}

Distribution CharCnnModel::classify(const text::CharSeq& cs, std::int64_t conflict) const {
  CharExample ex{cs, 0, conflict};
  return to_distribution(logits_eval({&ex}).values());
}

std::vector<double> CharCnnModel::predict(const std::vector<CharExample>& batch) const {
  std::vector<double> out;
  for (std::size_t start = 0; start < batch.size(); start += kPredictChunk) {
    Tensor logits = logits_eval(pointers(batch, start, std::min(batch.size(), start + kPredictChunk)));
    for (std::size_t i = 0; i < logits.dim(0); ++i)
      out.push_back(to_distribution(std::span<const double>(logits.data() + 2 * i, 2))[1]);
  }
  return out;
}

std::vector<nn::Parameter*> CharCnnModel::parameters() {
  auto p = trunk.parameters();
  for (auto* q : head.parameters()) p.push_back(q);
  return p;
}

nn::Checkpoint CharCnnModel::to_checkpoint(std::uint64_t seed) const {
  auto* self = const_cast<CharCnnModel*>(this);
  nn::Checkpoint c;
  c.kind = "charcnn";
  c.seed = seed;
  c.config_json = cnn_config_json(config_).dump();
  c.vocab = vocab_strings(vocab_);
  nn::store_parameters(c, self->parameters());
  store_buffers(c, self->trunk);
  return c;
}

CharCnnModel CharCnnModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  expect_kind(ckpt, "charcnn");
  Rng rng(0);
  CharCnnModel m(vocab_from_strings(ckpt.vocab), cnn_config_from(json::parse(ckpt.config_json)), rng);
  check_vocab(ckpt, "charcnn.embedding.table", m.vocab().size());
  nn::restore_parameters(ckpt, m.parameters());
  restore_buffers(ckpt, m.trunk);
  return m;
}

void ScalarStandardizer::fit(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kEmpty, "cannot fit a standardizer on no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(values.size()));
  if (sd == 0.0) sd = 1.0;
  fitted = true;
}

double ScalarStandardizer::apply(double x) const {
  if (!fitted) throw Error(ErrorCode::kState, "conflict standardizer used before fitting");
  return (x - mean) / sd;
}

FusionModel::FusionModel(text::CharVocab vocab, const FusionConfig& config, Rng& rng)
    : trunk(config.trunk, vocab.size(), rng), vocab_(std::move(vocab)), config_(config) {
  hidden1 = nn::Dense("fusion.hidden", trunk.flatten_size() + 1, config.hidden, rng);
  output = nn::Dense("fusion.output", config.hidden, 2, rng);
}

Tensor FusionModel::concat(const Tensor& flat, const std::vector<const CharExample*>& batch) const {
  const std::size_t n = batch.size(), f = flat.dim(1);
  Tensor out({n, f + 1});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(flat.data() + i * f, flat.data() + (i + 1) * f, out.data() + i * (f + 1));
    out.at(i, f) = standardizer.apply(static_cast<double>(batch[i]->conflict));
  }
  return out;
}

Tensor FusionModel::forward(const std::vector<const CharExample*>& batch, Mode mode, Rng& rng) {
  std::vector<const text::CharSeq*> seqs;
  for (const auto* ex : batch) seqs.push_back(&ex->seq);
  Tensor flat = dropout.forward(trunk.forward(seqs, mode), mode, rng);
  return output.forward(relu_.forward(hidden1.forward(concat(flat, batch))));
}

void FusionModel::backward(const Tensor& dlogits) {
  Tensor dcat = hidden1.backward(relu_.backward(output.backward(dlogits)));
  const std::size_t n = dcat.dim(0), f = trunk.flatten_size();
  Tensor dflat({n, f});
  for (std::size_t i = 0; i < n; ++i)
    std::copy(dcat.data() + i * (f + 1), dcat.data() + i * (f + 1) + f, dflat.data() + i * f);
  trunk.backward(dropout.backward(dflat));
}

Tensor FusionModel::logits_eval(const std::vector<const CharExample*>& batch) const {
  std::vector<const text::CharSeq*> seqs;
  for (const auto* ex : batch) seqs.push_back(&ex->seq);
  return output.apply(nn::relu(hidden1.apply(concat(trunk.apply(seqs), batch))));
}

Distribution FusionModel::classify(const text::CharSeq& cs, std::int64_t conflict) const {
  if (conflict < 0) throw Error(ErrorCode::kInvalidArgument, "conflict count must be non-negative");
  CharExample ex{cs, 0, conflict};
  return to_distribution(logits_eval({&ex}).values());
}

std::vector<double> FusionModel::predict(const std::vector<CharExample>& batch) const {
  std::vector<double> out;
  for (std::size_t start = 0; start < batch.size(); start += kPredictChunk) {
    Tensor logits = logits_eval(pointers(batch, start, std::min(batch.size(), start + kPredictChunk)));
    for (std::size_t i = 0; i < logits.dim(0); ++i)
      out.push_back(to_distribution(std::span<const double>(logits.data() + 2 * i, 2))[1]);
  }
  return out;
}

std::vector<nn::Parameter*> FusionModel::parameters() {
  auto p = trunk.parameters();
  for (auto* layer : {&hidden1, &output})
    for (auto* q : layer->parameters()) p.push_back(q);
  return p;
}

nn::Signature FusionModel::signature() const {
  nn::Signature sig = trunk.signature();
  for (bool b : relu_.mask()) sig.push_back(b ? 1 : 0);
  return sig;
}

nn::Checkpoint FusionModel::to_checkpoint(std::uint64_t seed) const {
  auto* self = const_cast<FusionModel*>(this);
  nn::Checkpoint c;
  c.kind = "fusion";
  c.seed = seed;
  json cfg = cnn_config_json(config_.trunk);
  cfg["hidden"] = config_.hidden;
  c.config_json = cfg.dump();
  c.vocab = vocab_strings(vocab_);
  nn::store_parameters(c, self->parameters());
  store_buffers(c, self->trunk);
  c.buffers["fusion.standardizer"] = Tensor::vector({standardizer.mean, standardizer.sd, standardizer.fitted ? 1.0 : 0.0});
  return c;
}

FusionModel FusionModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  expect_kind(ckpt, "fusion");
  json cfg = json::parse(ckpt.config_json);
  FusionConfig config;
  config.trunk = cnn_config_from(cfg);
  config.hidden = cfg.at("hidden").get<std::size_t>();
  Rng rng(0);
  FusionModel m(vocab_from_strings(ckpt.vocab), config, rng);
  check_vocab(ckpt, "charcnn.embedding.table", m.vocab().size());
  nn::restore_parameters(ckpt, m.parameters());
  restore_buffers(ckpt, m.trunk);
  const Tensor& s = ckpt.buffer("fusion.standardizer");
  if (s.size() != 3) throw Error(ErrorCode::kParse, "fusion standardizer buffer must hold 3 values");
  m.standardizer = {s[0], s[1], s[2] != 0.0};
  return m;
}

CharBiLstmModel::CharBiLstmModel(text::CharVocab vocab, const CharBiLstmConfig& config, Rng& rng)
    : embedding("bilstm.embedding", vocab.size(), config.embed_dim, rng, text::CharVocab::kPad),
      encoder("bilstm.encoder", config.embed_dim, config.hidden_dim, rng),
      vocab_(std::move(vocab)),
      config_(config) {
  head = nn::Dense("bilstm.head", 2 * config.hidden_dim, 2, rng);
}

namespace {

std::vector<std::int32_t> sequence_ids(const text::CharSeq& cs) {
  if (cs.length == 0) throw Error(ErrorCode::kInvalidArgument, "cannot classify an empty character sequence");
  if (cs.length > cs.indices.size()) throw Error(ErrorCode::kInvalidArgument, "sequence length exceeds its indices");
  return std::vector<std::int32_t>(cs.indices.begin(), cs.indices.begin() + static_cast<std::ptrdiff_t>(cs.length));
}

}  // namespace

Tensor CharBiLstmModel::forward(const text::CharSeq& cs, Mode mode, Rng& rng) {
  auto ids = sequence_ids(cs);
  Tensor enc = encoder.forward(embedding.forward(ids, {ids.size()}));
  enc.reshape({1, enc.size()});
  return head.forward(dropout.forward(enc, mode, rng));
}

void CharBiLstmModel::backward(const Tensor& dlogits) {
  Tensor d = dropout.backward(head.backward(dlogits));
  d.reshape({d.size()});
  embedding.backward(encoder.backward(d));
}

Distribution CharBiLstmModel::classify(const text::CharSeq& cs, std::int64_t) const {
  auto ids = sequence_ids(cs);
  Tensor enc = nn::bilstm_encode(encoder.fwd, encoder.bwd, embedding.lookup(ids, {ids.size()}));
  enc.reshape({1, enc.size()});
  return to_distribution(head.apply(enc).values());
}

std::vector<nn::Parameter*> CharBiLstmModel::parameters() {
  auto p = embedding.parameters();
  for (auto* q : encoder.parameters()) p.push_back(q);
  for (auto* q : head.parameters()) p.push_back(q);
  return p;
}

nn::Checkpoint CharBiLstmModel::to_checkpoint(std::uint64_t seed) const {
  auto* self = const_cast<CharBiLstmModel*>(this);
  nn::Checkpoint c;
  c.kind = "char-bilstm";
  c.seed = seed;
  c.config_json = json{{"max_len", config_.max_len}, {"embed_dim", config_.embed_dim}, {"hidden_dim", config_.hidden_dim}}.dump();
  c.vocab = vocab_strings(vocab_);
  nn::store_parameters(c, self->parameters());
  return c;
}

CharBiLstmModel CharBiLstmModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  expect_kind(ckpt, "char-bilstm");
  json cfg = json::parse(ckpt.config_json);
  CharBiLstmConfig config;
  config.max_len = cfg.at("max_len").get<std::size_t>();
  config.embed_dim = cfg.at("embed_dim").get<std::size_t>();
  config.hidden_dim = cfg.at("hidden_dim").get<std::size_t>();
  Rng rng(0);
  CharBiLstmModel m(vocab_from_strings(ckpt.vocab), config, rng);
  check_vocab(ckpt, "bilstm.embedding.table", m.vocab().size());
  nn::restore_parameters(ckpt, m.parameters());
  return m;
}

namespace {

template <typename Model>
class BatchedTask final : public nn::TrainingTask {
 public:
  BatchedTask(Model& model, const std::vector<CharExample>& train, const std::vector<CharExample>& validation)
      : model_(model), train_(train), validation_(validation) {}

  std::vector<nn::Parameter*> parameters() override { return model_.parameters(); }
  std::vector<Tensor*> buffers() override { return model_.buffers(); }
  std::size_t train_size() const override { return train_.size(); }

  double train_batch(std::span<const std::size_t> batch, Rng& rng) override {
    std::vector<const CharExample*> ptrs;
    std::vector<std::size_t> gold;
    for (std::size_t idx : batch) {
      ptrs.push_back(&train_[idx]);
      gold.push_back(static_cast<std::size_t>(train_[idx].label));
    }
    auto loss = nn::softmax_cross_entropy(model_.forward(ptrs, Mode::kTrain, rng), gold);
    model_.backward(loss.dlogits);
    return loss.loss;
  }

  double validation_loss() override { return mean_log_loss(model_.predict(validation_), validation_); }

 private:
  Model& model_;
  const std::vector<CharExample>& train_;
  const std::vector<CharExample>& validation_;
};

class BiLstmTask final : public nn::TrainingTask {
 public:
  BiLstmTask(CharBiLstmModel& model, const std::vector<CharExample>& train, const std::vector<CharExample>& validation)
      : model_(model), train_(train), validation_(validation) {}

  std::vector<nn::Parameter*> parameters() override { return model_.parameters(); }
  std::size_t train_size() const override { return train_.size(); }

  double train_batch(std::span<const std::size_t> batch, Rng& rng) override {
    const double inv = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (std::size_t idx : batch) {
      const std::size_t gold = static_cast<std::size_t>(train_[idx].label);
      auto loss = nn::softmax_cross_entropy(model_.forward(train_[idx].seq, Mode::kTrain, rng),
                                            std::span<const std::size_t>(&gold, 1));
      for (auto& g : loss.dlogits.values()) g *= inv;
      model_.backward(loss.dlogits);
      total += loss.loss;
    }
    return total * inv;
  }

  double validation_loss() override { return mean_log_loss(model_.predict(validation_), validation_); }

 private:
  CharBiLstmModel& model_;
  const std::vector<CharExample>& train_;
  const std::vector<CharExample>& validation_;
};

void check_data(const std::vector<CharExample>& train, const std::vector<CharExample>& validation) {
  if (train.empty() || validation.empty()) throw Error(ErrorCode::kEmpty, "training needs train and validation data");
  bool seen[2] = {false, false};
  for (const auto& ex : train) {
    if (ex.label != 0 && ex.label != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    seen[ex.label] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorCode::kSingleClass, "training data contains a single class");
}

}  // namespace

nn::TrainingHistory train_charcnn(CharCnnModel& model, const std::vector<CharExample>& train,
                                  const std::vector<CharExample>& validation, const nn::TrainingConfig& config) {
  check_data(train, validation);
  model.dropout.set_p(config.dropout_p);
  BatchedTask<CharCnnModel> task(model, train, validation);
  return nn::train_loop(task, config);
}

nn::TrainingHistory train_fusion(FusionModel& model, const std::vector<CharExample>& train,
                                 const std::vector<CharExample>& validation, const nn::TrainingConfig& config) {
  check_data(train, validation);
  std::vector<double> conflicts;
  for (const auto& ex : train) {
    if (ex.conflict < 0) throw Error(ErrorCode::kInvalidArgument, "conflict count must be non-negative");
    conflicts.push_back(static_cast<double>(ex.conflict));
  }
  model.standardizer.fit(conflicts);
  model.dropout.set_p(config.dropout_p);
  BatchedTask<FusionModel> task(model, train, validation);
  return nn::train_loop(task, config);
}

nn::TrainingHistory train_bilstm(CharBiLstmModel& model, const std::vector<CharExample>& train,
                                 const std::vector<CharExample>& validation, const nn::TrainingConfig& config) {
  check_data(train, validation);
  model.dropout.set_p(config.dropout_p);
  BiLstmTask task(model, train, validation);
  return nn::train_loop(task, config);
}

std::unique_ptr<IncivilityModel> load_char_model(const nn::Checkpoint& ckpt) {
  if (ckpt.kind == "charcnn") return std::make_unique<CharCnnModel>(CharCnnModel::from_checkpoint(ckpt));
  if (ckpt.kind == "fusion") return std::make_unique<FusionModel>(FusionModel::from_checkpoint(ckpt));
  if (ckpt.kind == "char-bilstm") return std::make_unique<CharBiLstmModel>(CharBiLstmModel::from_checkpoint(ckpt));
  throw Error(ErrorCode::kParse, "checkpoint kind '" + ckpt.kind + "' is not a character model");
}

}  // namespace incivil::classifier
