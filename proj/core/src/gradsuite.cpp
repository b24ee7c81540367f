#include "incivil/gradsuite.hpp"

#include "incivil/classifier.hpp"
#include "incivil/nn/conv.hpp"
#include "incivil/nn/layers.hpp"
#include "incivil/nn/loss.hpp"
#include "incivil/nn/lstm.hpp"
#include "incivil/tdsa.hpp"

namespace incivil::gradsuite {

using nn::Mode;
using nn::Parameter;
using nn::Tensor;

namespace {

/// L = sum(w * y) + 0.5 * sum(y^2); dL/dy = w + y.
struct Projection {
  Tensor w;

  Projection(const std::vector<std::size_t>& shape, Rng& rng) : w(shape) { nn::uniform_fill(w, -1.0, 1.0, rng); }

  double loss(const Tensor& y) const {
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) l += w[i] * y[i] + 0.5 * y[i] * y[i];
    return l;
  }
  Tensor grad(const Tensor& y) const {
    Tensor d(y.shape());
    for (std::size_t i = 0; i < y.size(); ++i) d[i] = w[i] + y[i];
    return d;
  }
};

Parameter random_input(const std::string& name, const std::vector<std::size_t>& shape, Rng& rng) {
  Parameter p(name, Tensor(shape));
  nn::uniform_fill(p.value, -1.0, 1.0, rng);
  return p;
}

void add_into(Tensor& dst, const Tensor& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void jitter(const std::vector<Parameter*>& params, Rng& rng) {
  for (auto* p : params) {
    Tensor noise(p->value.shape());
    nn::uniform_fill(noise, -0.1, 0.1, rng);
    add_into(p->value, noise);
  }
}

nn::GradCheckOptions sampled(const SuiteOptions& o) {
  nn::GradCheckOptions c = o.check;
  c.max_entries_per_tensor = o.end_to_end_samples;
  return c;
}

text::CharVocab desk_vocab() {
  return text::CharVocab::build({"abcdefghijklmnopqrstuvwxyz @!?.,'#0123456789"});
}

std::vector<classifier::CharExample> desk_examples(const text::CharVocab& vocab, std::size_t max_len) {
  const std::vector<std::string> texts = {"@alice you are a total clown!!", "lovely weather in the park today",
                                          "@bob stop lying, nobody believes you", "what a game last night #win"};
  std::vector<classifier::CharExample> out;
  for (std::size_t i = 0; i < texts.size(); ++i)
    out.push_back({text::char_encode(texts[i], vocab, max_len), static_cast<int>(i % 2), static_cast<std::int64_t>(i % 3)});
  return out;
}

}  // namespace

nn::GradCheckResult check_embedding(const SuiteOptions& o) {
  Rng rng(o.seed);
  nn::Embedding emb("embedding", 7, 4, rng, 0);
  const std::vector<std::int32_t> ids = {1, 0, 3, 3, 6, 2};
  Projection proj({2, 3, 4}, rng);
  auto params = emb.parameters();
  return nn::gradient_check(
      "embedding", params, [&] { return proj.loss(emb.lookup(ids, {2, 3})); },
      [&] { emb.backward(proj.grad(emb.forward(ids, {2, 3}))); }, {}, o.check);
}

nn::GradCheckResult check_dense(const SuiteOptions& o) {
  Rng rng(o.seed);
  nn::Dense dense("dense", 5, 3, rng);
  jitter({&dense.bias}, rng);
  Parameter x = random_input("dense.input", {4, 5}, rng);
  Projection proj({4, 3}, rng);
  std::vector<Parameter*> params = {&dense.weight, &dense.bias, &x};
  return nn::gradient_check(
      "dense", params, [&] { return proj.loss(dense.apply(x.value)); },
      [&] { add_into(x.grad, dense.backward(proj.grad(dense.forward(x.value)))); }, {}, o.check);
}

nn::GradCheckResult check_lstm_cell(const SuiteOptions& o) {
  Rng rng(o.seed);
  nn::LstmCell cell("lstm", 3, 4, rng);
  jitter({&cell.b_f, &cell.b_i, &cell.b_C, &cell.b_o}, rng);
  Parameter xs = random_input("lstm.input", {5, 3}, rng);
  Projection proj({4}, rng);
  auto params = cell.parameters();
  params.push_back(&xs);
  return nn::gradient_check(
      "lstm_cell", params, [&] { return proj.loss(Tensor::vector(nn::lstm_final_state(cell, xs.value))); },
      [&] {
        nn::LstmRunner run(cell);
        Tensor h = run.forward(xs.value);
        add_into(xs.grad, run.backward(proj.grad(h)));
      },
      {}, o.check);
}

nn::GradCheckResult check_bilstm(const SuiteOptions& o) {
  Rng rng(o.seed);
  nn::BiLstm bi("bilstm", 3, 4, rng);
  auto params = bi.parameters();
  jitter({&bi.fwd.b_f, &bi.fwd.b_o, &bi.bwd.b_i, &bi.bwd.b_C}, rng);
  Parameter xs = random_input("bilstm.input", {4, 3}, rng);
  Projection proj({8}, rng);
  params.push_back(&xs);
  return nn::gradient_check(
      "bilstm", params, [&] { return proj.loss(nn::bilstm_encode(bi.fwd, bi.bwd, xs.value)); },
      [&] { add_into(xs.grad, bi.backward(proj.grad(bi.forward(xs.value)))); }, {}, o.check);
}

nn::GradCheckResult check_conv2d(const SuiteOptions& o) {
  Rng rng(o.seed);
  nn::Conv2d conv("conv", 2, 3, 3, 3, rng);
  jitter({&conv.bias}, rng);
  Parameter x = random_input("conv.input", {2, 2, 7, 6}, rng);
  Projection proj({2, 3, 5, 4}, rng);
  std::vector<Parameter*> params = {&conv.filters, &conv.bias, &x};
  return nn::gradient_check(
      "conv2d", params, [&] { return proj.loss(conv.apply(x.value)); },
      [&] { add_into(x.grad, conv.backward(proj.grad(conv.forward(x.value)))); }, {}, o.check);
}

nn::GradCheckResult check_batchnorm(const SuiteOptions& o) {
  Rng rng(o.seed);
  nn::BatchNorm bn("batchnorm", 3);
  jitter({&bn.gamma, &bn.beta}, rng);
  Parameter x = random_input("batchnorm.input", {4, 3, 3, 2}, rng);
  Projection proj({4, 3, 3, 2}, rng);
  std::vector<Parameter*> params = {&bn.gamma, &bn.beta, &x};
  return nn::gradient_check(
      "batchnorm", params, [&] { return proj.loss(bn.forward(x.value, Mode::kTrain)); },
      [&] { add_into(x.grad, bn.backward(proj.grad(bn.forward(x.value, Mode::kTrain)))); }, {}, o.check);
}

nn::GradCheckResult check_charcnn(const SuiteOptions& o) {
  Rng rng(o.seed);
  classifier::CharCnnConfig config;
  auto vocab = desk_vocab();
  classifier::CharCnnModel model(vocab, config, rng);
  jitter({&model.trunk.bn1.beta, &model.trunk.bn2.beta, &model.trunk.conv1.bias, &model.trunk.conv2.bias}, rng);
  auto data = desk_examples(vocab, config.max_len);
  std::vector<const classifier::CharExample*> batch;
  std::vector<std::size_t> gold;
  for (const auto& ex : data) {
    batch.push_back(&ex);
    gold.push_back(static_cast<std::size_t>(ex.label));
  }
  Rng drop_rng(o.seed + 1);
  model.forward(batch, Mode::kTrain, drop_rng);
  model.dropout.set_replay(true);
  auto params = model.parameters();
  auto loss = [&] { return nn::softmax_cross_entropy(model.forward(batch, Mode::kTrain, drop_rng), gold); };
  return nn::gradient_check(
      "charcnn", params, [&] { return loss().loss; }, [&] { model.backward(loss().dlogits); },
      [&] { return model.signature(); }, sampled(o));
}

nn::GradCheckResult check_charbilstm(const SuiteOptions& o) {
  Rng rng(o.seed);
  classifier::CharBiLstmConfig config;
  config.embed_dim = 8;
  config.hidden_dim = 8;
  config.max_len = 24;
  auto vocab = desk_vocab();
  classifier::CharBiLstmModel model(vocab, config, rng);
  auto data = desk_examples(vocab, config.max_len);
  Rng drop_rng(o.seed + 1);
  model.forward(data[0].seq, Mode::kTrain, drop_rng);
  model.dropout.set_replay(true);
  auto params = model.parameters();
  auto loss_of = [&](const classifier::CharExample& ex) {
    const std::size_t gold = static_cast<std::size_t>(ex.label);
    return nn::softmax_cross_entropy(model.forward(ex.seq, Mode::kTrain, drop_rng), std::span<const std::size_t>(&gold, 1));
  };
  return nn::gradient_check(
      "char_bilstm", params,
      [&] { return loss_of(data[0]).loss + loss_of(data[1]).loss; },
      [&] {
        model.backward(loss_of(data[0]).dlogits);
        model.backward(loss_of(data[1]).dlogits);
      },
      {}, sampled(o));
}

nn::GradCheckResult check_tdlstm(const SuiteOptions& o) {
  Rng rng(o.seed);
  tdsa::TdLstmConfig config;
  config.embed_dim = 6;
  config.hidden_dim = 5;
  std::vector<tdsa::TdExample> data;
  auto add = [&](const std::string& sentence, std::size_t b, std::size_t e, tdsa::Sentiment s) {
    data.push_back({text::tokenize(sentence), b, e, s});
  };
  add("Nike is great but Adidas is awful", 0, 1, tdsa::Sentiment::kPositive);
  add("Nike is great but Adidas is awful", 4, 5, tdsa::Sentiment::kNegative);
  add("the new York store opened", 2, 4, tdsa::Sentiment::kNeutral);
  std::set<std::string> words;
  for (const auto& ex : data)
    for (const auto& t : ex.tokens) words.insert(t.lower);
  words.erase("store");
  tdsa::TdLstmModel model(config, words, nullptr, rng);
  auto params = model.parameters();
  jitter({&model.left.b_f, &model.right.b_o, &model.output.bias}, rng);
  return nn::gradient_check(
      "td_lstm", params, [&] { return tdsa::mean_loss(model, data) * static_cast<double>(data.size()); },
      [&] {
        for (const auto& ex : data) model.accumulate_gradients(ex);
      },
      {}, o.check);
}

namespace {

nn::GradCheckResult fusion_check(const SuiteOptions& o, const std::string& name, const nn::GradCheckOptions& options) {
  Rng rng(o.seed);
  classifier::FusionConfig config;
  auto vocab = desk_vocab();
  classifier::FusionModel model(vocab, config, rng);
  jitter({&model.trunk.bn1.beta, &model.trunk.bn2.beta, &model.hidden1.bias}, rng);
  auto data = desk_examples(vocab, config.trunk.max_len);
  std::vector<double> conflicts;
  std::vector<const classifier::CharExample*> batch;
  std::vector<std::size_t> gold;
  for (const auto& ex : data) {
    conflicts.push_back(static_cast<double>(ex.conflict));
    batch.push_back(&ex);
    gold.push_back(static_cast<std::size_t>(ex.label));
  }
  model.standardizer.fit(conflicts);
  Rng drop_rng(o.seed + 1);
  model.forward(batch, Mode::kTrain, drop_rng);
  model.dropout.set_replay(true);
  auto params = model.parameters();
  auto loss = [&] { return nn::softmax_cross_entropy(model.forward(batch, Mode::kTrain, drop_rng), gold); };
  return nn::gradient_check(
      name, params, [&] { return loss().loss; }, [&] { model.backward(loss().dlogits); },
      [&] { return model.signature(); }, options);
}

}  // namespace

nn::GradCheckResult check_fusion(const SuiteOptions& o) { return fusion_check(o, "fusion", sampled(o)); }

nn::GradCheckResult check_fusion_conflict_weights(const SuiteOptions& o) {
  nn::GradCheckOptions options = o.check;
  options.entry_filter = [](const Parameter& p, std::size_t e) {
    return p.name == "fusion.hidden.weight" && e % p.value.dim(1) == p.value.dim(1) - 1;
  };
  return fusion_check(o, "fusion_conflict_weights", options);
}

std::vector<nn::GradCheckResult> run_all(const SuiteOptions& o) {
  return {check_embedding(o), check_dense(o),   check_lstm_cell(o),   check_bilstm(o),
          check_conv2d(o),    check_batchnorm(o), check_charcnn(o),   check_charbilstm(o),
          check_tdlstm(o),    check_fusion(o),  check_fusion_conflict_weights(o)};
}

}  // namespace incivil::gradsuite
