#include "incivil/tdsa.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "incivil/nn/loss.hpp"
#include "json.hpp"

namespace incivil::tdsa {

using nlohmann::json;

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::kNegative: return "negative";
    case Sentiment::kNeutral: return "neutral";
    case Sentiment::kPositive: return "positive";
  }
  return "neutral";
}

Sentiment parse_sentiment(std::string_view s) {
  std::string v = utf8::to_lower(trim(s));
  if (v == "negative" || v == "neg" || v == "-1") return Sentiment::kNegative;
  if (v == "neutral" || v == "neu" || v == "0") return Sentiment::kNeutral;
  if (v == "positive" || v == "pos" || v == "1" || v == "+1") return Sentiment::kPositive;
  throw Error(ErrorCode::kParse, "unknown sentiment label '" + std::string(s) + "'");
}

Sentiment argmax(const Distribution& d) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < d.size(); ++k)
    if (d[k] > d[best]) best = k;
  return static_cast<Sentiment>(best);
}

void validate_example(const TdExample& ex) {
  if (ex.tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "TD example has no tokens");
  if (ex.target_begin >= ex.target_end || ex.target_end > ex.tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument, "target span [" + std::to_string(ex.target_begin) + "," +
                                                 std::to_string(ex.target_end) + ") out of bounds for " +
                                                 std::to_string(ex.tokens.size()) + " tokens");
  }
}

std::vector<TdExample> parse_dataset(std::string_view tsv) {
  std::vector<TdExample> out;
  std::size_t line_no = 0;
  for (const auto& raw : split(tsv, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kParse, "TDSA dataset line " + std::to_string(line_no) + ": " + why);
    };
    if (cols.size() != 4) throw fail("expected 4 tab-separated columns");
    TdExample ex;
    ex.tokens = text::tokenize(cols[0]);
    try {
      ex.target_begin = std::stoul(cols[1]);
      ex.target_end = std::stoul(cols[2]);
      ex.label = parse_sentiment(cols[3]);
      validate_example(ex);
    } catch (const Error& e) {
      throw fail(e.what());
    } catch (const std::exception&) {
      throw fail("bad token index");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TdExample> load_dataset(const std::string& path) { return parse_dataset(read_file(path)); }

WordEmbeddingTable WordEmbeddingTable::parse(std::string_view text) {
  WordEmbeddingTable table;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    std::istringstream in(line);
    std::string word;
    if (!(in >> word)) continue;
    std::vector<double> vec;
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t used = 0;
        vec.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParse, "embedding line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
    }
    if (vec.empty()) throw Error(ErrorCode::kParse, "embedding line " + std::to_string(line_no) + ": no vector");
    if (table.dim_ == 0) table.dim_ = vec.size();
    if (vec.size() != table.dim_) {
      throw Error(ErrorCode::kParse, "embedding line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.dim_) + " values, got " + std::to_string(vec.size()));
    }
    table.add(word, std::move(vec));
  }
  return table;
}

WordEmbeddingTable WordEmbeddingTable::load(const std::string& path) { return parse(read_file(path)); }

void WordEmbeddingTable::add(const std::string& word, std::vector<double> vec) {
  if (dim_ == 0) dim_ = vec.size();
  if (vec.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "embedding for '" + word + "' has wrong size");
  vectors_[utf8::to_lower(word)] = std::move(vec);
}

const std::vector<double>* WordEmbeddingTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

Distribution ConstantClassifier::classify(const TdExample& example) const {
  validate_example(example);
  Distribution d{};
  d[static_cast<std::size_t>(sentiment_)] = 1.0;
  return d;
}

CueLexiconClassifier::CueLexiconClassifier(std::set<std::string> positive, std::set<std::string> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {}

Distribution CueLexiconClassifier::classify(const TdExample& ex) const {
  validate_example(ex);
  std::size_t best_pos = SIZE_MAX, best_neg = SIZE_MAX;
  for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
    if (t >= ex.target_begin && t < ex.target_end) continue;
    std::size_t dist = t < ex.target_begin ? ex.target_begin - t : t - ex.target_end + 1;
    if (positive_.count(ex.tokens[t].lower)) best_pos = std::min(best_pos, dist);
    if (negative_.count(ex.tokens[t].lower)) best_neg = std::min(best_neg, dist);
  }
  Sentiment s = Sentiment::kNeutral;
  if (best_pos < best_neg) s = Sentiment::kPositive;
  if (best_neg < best_pos) s = Sentiment::kNegative;
  Distribution d{0.01, 0.01, 0.01};
  d[static_cast<std::size_t>(s)] = 0.98;
  return d;
}

nn::Checkpoint CueLexiconClassifier::to_checkpoint() const {
  nn::Checkpoint c;
  c.kind = "tdsa-cue";
  json extra;
  extra["positive"] = positive_;
  extra["negative"] = negative_;
  c.extra_json = extra.dump();
  return c;
}

CueLexiconClassifier CueLexiconClassifier::from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "tdsa-cue") throw Error(ErrorCode::kParse, "checkpoint kind '" + ckpt.kind + "' is not tdsa-cue");
  json extra = json::parse(ckpt.extra_json);
  return CueLexiconClassifier(extra.at("positive").get<std::set<std::string>>(),
                              extra.at("negative").get<std::set<std::string>>());
}

TdLstmModel::TdLstmModel(const TdLstmConfig& config, const std::set<std::string>& vocabulary_words,
                         const WordEmbeddingTable* pretrained, Rng& rng)
    : config_(config) {
  if (pretrained != nullptr) {
    if (pretrained->dim() == 0) throw Error(ErrorCode::kInvalidArgument, "empty pretrained embedding table");
    config_.embed_dim = pretrained->dim();
    for (const auto& w : vocabulary_words)
      if (pretrained->find(w) != nullptr) words_.push_back(w);
  } else {
    words_.assign(vocabulary_words.begin(), vocabulary_words.end());
  }
  build_index();
  embedding = nn::Embedding("tdsa.embedding", words_.size() + 1, config_.embed_dim, rng);
  if (pretrained != nullptr) {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const auto* vec = pretrained->find(words_[i]);
      std::copy(vec->begin(), vec->end(), embedding.table.value.data() + (i + 1) * config_.embed_dim);
    }
  }
  left = nn::LstmCell("tdsa.left", config_.embed_dim, config_.hidden_dim, rng);
  right = nn::LstmCell("tdsa.right", config_.embed_dim, config_.hidden_dim, rng);
  output = nn::Dense("tdsa.output", 2 * config_.hidden_dim, kNumSentiments, rng);
}

void TdLstmModel::build_index() {
  index_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<std::int32_t>(i + 1);
}

std::vector<std::int32_t> TdLstmModel::encode(const text::TokenSeq& tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = index_.find(t.lower);
    ids.push_back(it == index_.end() ? kOov : it->second);
  }
  return ids;
}

namespace {

nn::Tensor slice_rows(const nn::Tensor& m, std::size_t begin, std::size_t end) {
  const std::size_t d = m.dim(1);
  std::vector<double> data(m.data() + begin * d, m.data() + end * d);
  return nn::Tensor({end - begin, d}, std::move(data));
}

Distribution to_distribution(const std::vector<double>& p) { return {p[0], p[1], p[2]}; }

}  // namespace

Distribution TdLstmModel::classify(const TdExample& ex) const {
  validate_example(ex);
  const std::size_t n = ex.tokens.size();
  nn::Tensor emb = embedding.lookup(encode(ex.tokens), {n});
  auto hl = nn::lstm_final_state(left, slice_rows(emb, 0, ex.target_end));
  auto hr = nn::lstm_final_state(right, nn::reverse_rows(slice_rows(emb, ex.target_begin, n)));
  hl.insert(hl.end(), hr.begin(), hr.end());
  const std::size_t width = hl.size();
  nn::Tensor logits = output.apply(nn::Tensor({1, width}, std::move(hl)));
  return to_distribution(nn::softmax(logits.values()));
}

double TdLstmModel::accumulate_gradients(const TdExample& ex) {
  validate_example(ex);
  if (!ex.label) throw Error(ErrorCode::kInvalidArgument, "training example without label");
  const std::size_t n = ex.tokens.size(), h = config_.hidden_dim;
  nn::Tensor emb = embedding.forward(encode(ex.tokens), {n});
  nn::LstmRunner lrun(left), rrun(right);
  nn::Tensor hl = lrun.forward(slice_rows(emb, 0, ex.target_end));
  nn::Tensor hr = rrun.forward(nn::reverse_rows(slice_rows(emb, ex.target_begin, n)));
  std::vector<double> cat(hl.values().begin(), hl.values().end());
  cat.insert(cat.end(), hr.values().begin(), hr.values().end());
  nn::Tensor logits = output.forward(nn::Tensor({1, 2 * h}, std::move(cat)));
  const std::size_t gold = static_cast<std::size_t>(*ex.label);
  auto loss = nn::softmax_cross_entropy(logits, std::span<const std::size_t>(&gold, 1));
  nn::Tensor dcat = output.backward(loss.dlogits);
  nn::Tensor dhl({h}, std::vector<double>(dcat.data(), dcat.data() + h));
  nn::Tensor dhr({h}, std::vector<double>(dcat.data() + h, dcat.data() + 2 * h));
  nn::Tensor dxl = lrun.backward(dhl);
  nn::Tensor dxr = nn::reverse_rows(rrun.backward(dhr));
  nn::Tensor demb(emb.shape());
  const std::size_t d = emb.dim(1);
  for (std::size_t i = 0; i < dxl.size(); ++i) demb[i] += dxl[i];
  for (std::size_t i = 0; i < dxr.size(); ++i) demb[ex.target_begin * d + i] += dxr[i];
  embedding.backward(demb);
  return loss.loss;
}

std::vector<nn::Parameter*> TdLstmModel::parameters() {
  std::vector<nn::Parameter*> p = embedding.parameters();
  for (auto* q : left.parameters()) p.push_back(q);
  for (auto* q : right.parameters()) p.push_back(q);
  for (auto* q : output.parameters()) p.push_back(q);
  return p;
}

void TdLstmModel::mask_frozen_gradients() {
  if (config_.fine_tune_embeddings) return;
  const std::size_t d = embedding.dim();
  auto& g = embedding.table.grad;
  std::fill(g.data() + d, g.data() + g.size(), 0.0);
}

nn::Checkpoint TdLstmModel::to_checkpoint(std::uint64_t seed) const {
  nn::Checkpoint c;
  c.kind = "tdsa-lstm";
  c.seed = seed;
  json cfg;
  cfg["embed_dim"] = config_.embed_dim;
  cfg["hidden_dim"] = config_.hidden_dim;
  cfg["fine_tune_embeddings"] = config_.fine_tune_embeddings;
  c.config_json = cfg.dump();
  c.vocab = words_;
  auto self = const_cast<TdLstmModel*>(this);
  nn::store_parameters(c, self->parameters());
  return c;
}

TdLstmModel TdLstmModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "tdsa-lstm") throw Error(ErrorCode::kParse, "checkpoint kind '" + ckpt.kind + "' is not tdsa-lstm");
  json cfg = json::parse(ckpt.config_json);
  TdLstmConfig config;
  config.embed_dim = cfg.at("embed_dim").get<std::size_t>();
  config.hidden_dim = cfg.at("hidden_dim").get<std::size_t>();
  config.fine_tune_embeddings = cfg.at("fine_tune_embeddings").get<bool>();
  Rng rng(0);
  TdLstmModel m(config, std::set<std::string>(ckpt.vocab.begin(), ckpt.vocab.end()), nullptr, rng);
  m.words_ = ckpt.vocab;
  m.build_index();
  const auto& table = ckpt.param("tdsa.embedding.table");
  if (table.rank() != 2 || table.dim(0) != m.vocabulary_size()) {
    throw Error(ErrorCode::kVocabMismatch, "checkpoint vocabulary has " + std::to_string(m.vocabulary_size()) +
                                               " rows but the embedding table has shape " + nn::shape_string(table.shape()));
  }
  nn::restore_parameters(ckpt, m.parameters());
  return m;
}

namespace {

class TdsaTask final : public nn::TrainingTask {
 public:
  TdsaTask(TdLstmModel& model, const std::vector<TdExample>& train, const std::vector<TdExample>& validation)
      : model_(model), train_(train), validation_(validation) {}

  std::vector<nn::Parameter*> parameters() override { return model_.parameters(); }
  std::size_t train_size() const override { return train_.size(); }

  double train_batch(std::span<const std::size_t> batch, Rng&) override {
    double total = 0.0;
    for (std::size_t idx : batch) total += model_.accumulate_gradients(train_[idx]);
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto* p : model_.parameters())
      for (auto& g : p->grad.values()) g *= inv;
    model_.mask_frozen_gradients();
    return total * inv;
  }

  double validation_loss() override { return mean_loss(model_, validation_); }

 private:
  TdLstmModel& model_;
  const std::vector<TdExample>& train_;
  const std::vector<TdExample>& validation_;
};

}  // namespace

TdsaTrainingResult train_tdsa(const std::vector<TdExample>& train, const std::vector<TdExample>& validation,
                              const WordEmbeddingTable* embeddings, const TdLstmConfig& arch,
                              const nn::TrainingConfig& config) {
  if (train.empty() || validation.empty()) throw Error(ErrorCode::kEmpty, "TDSA training needs train and validation data");
  std::set<Sentiment> classes;
  std::set<std::string> words;
  for (const auto& ex : train) {
    validate_example(ex);
    if (!ex.label) throw Error(ErrorCode::kInvalidArgument, "unlabeled TDSA training example");
    classes.insert(*ex.label);
    for (const auto& t : ex.tokens) words.insert(t.lower);
  }
  if (classes.size() < 2) throw Error(ErrorCode::kSingleClass, "TDSA training data contains a single class");
  Rng rng(config.seed);
  TdsaTrainingResult result{TdLstmModel(arch, words, embeddings, rng), {}};
  TdsaTask task(result.model, train, validation);
  result.history = nn::train_loop(task, config);
  return result;
}

double accuracy(const TargetSentimentClassifier& model, const std::vector<TdExample>& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : data)
    if (ex.label && argmax(model.classify(ex)) == *ex.label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double mean_loss(const TargetSentimentClassifier& model, const std::vector<TdExample>& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : data) {
    if (!ex.label) throw Error(ErrorCode::kInvalidArgument, "unlabeled example in loss evaluation");
    auto d = model.classify(ex);
    total += nn::cross_entropy(d, static_cast<std::size_t>(*ex.label));
  }
  return total / static_cast<double>(data.size());
}

std::int64_t EntitySentimentProfile::total() const {
  std::int64_t t = 0;
  for (const auto& [e, c] : counts) t += c.total();
  return t;
}

EntitySentimentProfile profile_user(const std::string& user_id, const std::vector<corpus::Tweet>& timeline_slice,
                                    const text::EntityRecognizer& recognizer,
                                    const TargetSentimentClassifier& classifier) {
  EntitySentimentProfile profile;
  profile.user_id = user_id;
  for (const auto& tweet : timeline_slice) {
    TdExample ex;
    ex.tokens = text::tokenize(tweet.text);
    for (const auto& m : recognizer.recognize(tweet.id, ex.tokens)) {
      ex.target_begin = m.begin;
      ex.target_end = m.end;
      auto& c = profile.counts[text::normalize_entity(m.entity)];
      switch (argmax(classifier.classify(ex))) {
        case Sentiment::kPositive: ++c.positive; break;
        case Sentiment::kNegative: ++c.negative; break;
        case Sentiment::kNeutral: ++c.neutral; break;
      }
    }
  }
  return profile;
}

std::unique_ptr<TargetSentimentClassifier> load_classifier(const nn::Checkpoint& ckpt) {
  if (ckpt.kind == "tdsa-lstm") return std::make_unique<TdLstmModel>(TdLstmModel::from_checkpoint(ckpt));
  if (ckpt.kind == "tdsa-cue") return std::make_unique<CueLexiconClassifier>(CueLexiconClassifier::from_checkpoint(ckpt));
  throw Error(ErrorCode::kParse, "checkpoint kind '" + ckpt.kind + "' is not a target-sentiment model");
}

}  // namespace incivil::tdsa
