#include "incivil/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace incivil::classifier {

using nlohmann::json;

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& X) {
  if (X.empty()) throw Error(ErrorCode::kEmpty, "cannot fit a standardizer on no rows");
  const std::size_t d = X[0].size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& row : X)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  for (auto& m : s.mean) m /= static_cast<double>(X.size());
  for (const auto& row : X)
    for (std::size_t j = 0; j < d; ++j) s.scale[j] += (row[j] - s.mean[j]) * (row[j] - s.mean[j]);
  for (auto& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(X.size()));
    if (v == 0.0) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature row has " + std::to_string(x.size()) + " values, expected " +
                                                   std::to_string(mean.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(const std::vector<double>& w, double b, const std::vector<double>& x) {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return z;
}

}  // namespace

double LogisticModel::predict(const std::vector<double>& x) const {
  if (x.size() != weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature row has " + std::to_string(x.size()) + " values, model expects " +
                                                   std::to_string(weights.size()));
  }
  return sigmoid(linear(weights, bias, standardizer ? standardizer->apply(x) : x));
}

double logistic_predict(const LogisticModel& model, const std::vector<double>& x) { return model.predict(x); }

LogisticModel logistic_train(const std::vector<std::vector<double>>& X, const std::vector<int>& y, double l2,
                             const LogisticConfig& config) {
  if (X.empty()) throw Error(ErrorCode::kEmpty, "logistic regression needs training rows");
  if (X.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "X and y differ in length");
  if (!(l2 >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "l2 must be non-negative");
  const std::size_t d = X[0].size();
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != d) throw Error(ErrorCode::kDimensionMismatch, "ragged feature rows");
    for (double v : X[i])
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite feature value");
    if (y[i] != 0 && y[i] != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    seen[y[i]] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorCode::kSingleClass, "logistic regression needs both classes");

  LogisticModel m;
  m.l2 = l2;
  m.weights.assign(d, 0.0);
  std::vector<std::vector<double>> Z;
  if (config.standardize) {
    m.standardizer = Standardizer::fit(X);
    for (const auto& row : X) Z.push_back(m.standardizer->apply(row));
  }
  const auto& data = config.standardize ? Z : X;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  const double lr = config.learning_rate;
  std::vector<double> gw(d);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double r = sigmoid(linear(m.weights, m.bias, data[i])) - static_cast<double>(y[i]);
      for (std::size_t j = 0; j < d; ++j) gw[j] += r * data[i][j];
      gb += r;
    }
    for (std::size_t j = 0; j < d; ++j) m.weights[j] = (m.weights[j] - lr * gw[j] * inv_n) / (1.0 + lr * l2);
    m.bias -= lr * gb * inv_n;
  }
  return m;
}

nn::Checkpoint logistic_to_checkpoint(const LogisticModel& model, const std::string& kind, std::uint64_t seed,
                                      const std::string& extra_json) {
  nn::Checkpoint c;
  c.kind = kind;
  c.seed = seed;
  c.config_json = json{{"l2", model.l2}, {"standardize", model.standardizer.has_value()}}.dump();
  c.params["logistic.weights"] = nn::Tensor::vector(model.weights);
  c.params["logistic.bias"] = nn::Tensor::vector({model.bias});
  if (model.standardizer) {
    c.buffers["standardizer.mean"] = nn::Tensor::vector(model.standardizer->mean);
    c.buffers["standardizer.scale"] = nn::Tensor::vector(model.standardizer->scale);
  }
  c.extra_json = extra_json;
  return c;
}

LogisticModel logistic_from_checkpoint(const nn::Checkpoint& ckpt) {
  LogisticModel m;
  json cfg = json::parse(ckpt.config_json);
  m.l2 = cfg.value("l2", 0.0);
  m.weights = ckpt.param("logistic.weights").storage();
  m.bias = ckpt.param("logistic.bias")[0];
  if (cfg.value("standardize", false)) {
    Standardizer s;
    s.mean = ckpt.buffer("standardizer.mean").storage();
    s.scale = ckpt.buffer("standardizer.scale").storage();
    if (s.mean.size() != m.weights.size() || s.scale.size() != m.weights.size())
      throw Error(ErrorCode::kDimensionMismatch, "standardizer does not match the weights");
    m.standardizer = std::move(s);
  }
  return m;
}

std::optional<double> roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kDimensionMismatch, "scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos), nn_ = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn_);
}

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.empty()) throw Error(ErrorCode::kEmpty, "cannot evaluate an empty test set");
  if (scores.size() != labels.size()) throw Error(ErrorCode::kDimensionMismatch, "scores and labels differ in length");
  EvalReport r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    const bool pred = scores[i] >= kDecisionThreshold;
    if (pred && labels[i] == 1) ++r.confusion.tp;
    if (pred && labels[i] == 0) ++r.confusion.fp;
    if (!pred && labels[i] == 0) ++r.confusion.tn;
    if (!pred && labels[i] == 1) ++r.confusion.fn;
  }
  const auto& c = r.confusion;
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
  r.f1_positive = denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
  r.roc_auc = roc_auc(scores, labels);
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["f1_positive"] = f1_positive;
  j["roc_auc"] = roc_auc ? json(*roc_auc) : json(nullptr);
  j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn}, {"fn", confusion.fn}};
  j["n"] = confusion.total();
  return j.dump(2) + "\n";
}

}  // namespace incivil::classifier
