#include "incivil/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

#include "incivil/conflict.hpp"
#include "incivil/features.hpp"
#include "incivil/gradsuite.hpp"
#include "incivil/posthoc.hpp"
#include "json.hpp"

namespace incivil::pipeline {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- config

std::string PipelineConfig::to_json() const {
  json j;
  j["corpus"] = corpus;
  j["profiles"] = profiles;
  j["timelines"] = timelines;
  j["lexicon"] = lexicon;
  j["labels"] = labels;
  j["embeddings"] = embeddings;
  j["category_lexicon"] = category_lexicon;
  j["entities"] = entities;
  j["tdsa_train"] = tdsa_train;
  j["tdsa_validation"] = tdsa_validation;
  j["tdsa_checkpoint"] = tdsa_checkpoint;
  j["conflicts"] = conflicts;
  j["checkpoint"] = checkpoint;
  j["predictions"] = predictions;
  j["split"] = split;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["context_k"] = context_k;
  j["train_fraction"] = train_fraction;
  j["validation_fraction"] = validation_fraction;
  j["utc_offset_hours"] = utc_offset_hours;
  j["training"] = {{"learning_rate", training.learning_rate}, {"dropout_p", training.dropout_p},
                   {"patience", training.patience},           {"batch_size", training.batch_size},
                   {"max_epochs", training.max_epochs},       {"clip_norm", training.clip_norm}};
  j["charcnn"] = {{"max_len", charcnn.max_len},
                  {"embed_dim", charcnn.embed_dim},
                  {"filters", charcnn.filters},
                  {"kernel", charcnn.kernel}};
  j["bilstm"] = {{"max_len", bilstm.max_len}, {"embed_dim", bilstm.embed_dim}, {"hidden_dim", bilstm.hidden_dim}};
  j["fusion_hidden"] = fusion_hidden;
  j["tdsa"] = {{"embed_dim", tdsa.embed_dim},
               {"hidden_dim", tdsa.hidden_dim},
               {"fine_tune_embeddings", tdsa.fine_tune_embeddings}};
  j["l2"] = l2;
  j["logistic"] = {{"learning_rate", logistic.learning_rate},
                   {"epochs", logistic.epochs},
                   {"standardize", logistic.standardize}};
  j["feature_set"] = feature_set;
  j["ngram_n"] = ngram_n;
  j["min_df"] = min_df;
  j["select_k"] = select_k;
  return j.dump();
}

namespace {

void check_known_keys(const json& given, const json& known, const std::string& prefix) {
  if (!given.is_object()) throw Error(ErrorCode::kParse, "config" + prefix + " must be a JSON object");
  for (const auto& [key, value] : given.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::kParse, "unknown config key '" + prefix + key + "'");
    if (known[key].is_object()) check_known_keys(value, known[key], prefix + key + ".");
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  json given;
  try {
    given = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  json merged = json::parse(PipelineConfig{}.to_json());
  check_known_keys(given, merged, "");
  merged.merge_patch(given);
  PipelineConfig c;
  try {
    c.corpus = merged["corpus"].get<std::string>();
    c.profiles = merged["profiles"].get<std::string>();
    c.timelines = merged["timelines"].get<std::string>();
    c.lexicon = merged["lexicon"].get<std::string>();
    c.labels = merged["labels"].get<std::string>();
    c.embeddings = merged["embeddings"].get<std::string>();
    c.category_lexicon = merged["category_lexicon"].get<std::string>();
    c.entities = merged["entities"].get<std::string>();
    c.tdsa_train = merged["tdsa_train"].get<std::string>();
    c.tdsa_validation = merged["tdsa_validation"].get<std::string>();
    c.tdsa_checkpoint = merged["tdsa_checkpoint"].get<std::string>();
    c.conflicts = merged["conflicts"].get<std::string>();
    c.checkpoint = merged["checkpoint"].get<std::string>();
    c.predictions = merged["predictions"].get<std::string>();
    c.split = merged["split"].get<std::string>();
    c.out_dir = merged["out_dir"].get<std::string>();
    c.seed = merged["seed"].get<std::uint64_t>();
    c.context_k = merged["context_k"].get<std::size_t>();
    c.train_fraction = merged["train_fraction"].get<double>();
    c.validation_fraction = merged["validation_fraction"].get<double>();
    c.utc_offset_hours = merged["utc_offset_hours"].get<int>();
    const auto& t = merged["training"];
    c.training.learning_rate = t["learning_rate"].get<double>();
    c.training.dropout_p = t["dropout_p"].get<double>();
    c.training.patience = t["patience"].get<std::size_t>();
    c.training.batch_size = t["batch_size"].get<std::size_t>();
    c.training.max_epochs = t["max_epochs"].get<std::size_t>();
    c.training.clip_norm = t["clip_norm"].get<double>();
    const auto& cnn = merged["charcnn"];
    c.charcnn.max_len = cnn["max_len"].get<std::size_t>();
    c.charcnn.embed_dim = cnn["embed_dim"].get<std::size_t>();
    c.charcnn.filters = cnn["filters"].get<std::size_t>();
    c.charcnn.kernel = cnn["kernel"].get<std::size_t>();
    const auto& bl = merged["bilstm"];
    c.bilstm.max_len = bl["max_len"].get<std::size_t>();
    c.bilstm.embed_dim = bl["embed_dim"].get<std::size_t>();
    c.bilstm.hidden_dim = bl["hidden_dim"].get<std::size_t>();
    c.fusion_hidden = merged["fusion_hidden"].get<std::size_t>();
    const auto& td = merged["tdsa"];
    c.tdsa.embed_dim = td["embed_dim"].get<std::size_t>();
    c.tdsa.hidden_dim = td["hidden_dim"].get<std::size_t>();
    c.tdsa.fine_tune_embeddings = td["fine_tune_embeddings"].get<bool>();
    c.l2 = merged["l2"].get<double>();
    const auto& lg = merged["logistic"];
    c.logistic.learning_rate = lg["learning_rate"].get<double>();
    c.logistic.epochs = lg["epochs"].get<std::size_t>();
    c.logistic.standardize = lg["standardize"].get<bool>();
    c.feature_set = merged["feature_set"].get<std::string>();
    c.ngram_n = merged["ngram_n"].get<std::set<int>>();
    c.min_df = merged["min_df"].get<std::size_t>();
    c.select_k = merged["select_k"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad config value: ") + e.what());
  }
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw Error(ErrorCode::kParse, "train_fraction must be in (0,1)");
  if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0))
    throw Error(ErrorCode::kParse, "validation_fraction must be in (0,1)");
  if (c.context_k == 0) throw Error(ErrorCode::kParse, "context_k must be positive");
  if (c.feature_set != "content" && c.feature_set != "textual")
    throw Error(ErrorCode::kParse, "feature_set must be 'content' or 'textual'");
  c.training.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  if (!file_exists(path)) throw Error(ErrorCode::kMissingInput, "config file not found: " + path);
  return from_json(read_file(path));
}

std::string PipelineConfig::digest() const {
  json j = json::parse(to_json());
  j.erase("out_dir");
  return hex64(fnv1a64(j.dump()));
}

// ---------------------------------------------------------------- splits

std::pair<std::size_t, std::size_t> split_sizes(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "train fraction must be in (0,1)");
  const auto train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  return {train, n - train};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const std::vector<int>& labels,
                                                                               double train_fraction,
                                                                               std::uint64_t seed) {
  const std::size_t total_train = split_sizes(labels.size(), train_fraction).first;
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<int> classes;
  std::vector<std::size_t> share;
  std::vector<double> remainder;
  std::size_t assigned = 0;
  for (const auto& [label, idx] : by_class) {
    const double ideal = static_cast<double>(idx.size()) * static_cast<double>(total_train) /
                         static_cast<double>(labels.size());
    classes.push_back(label);
    share.push_back(static_cast<std::size_t>(std::floor(ideal)));
    remainder.push_back(ideal - std::floor(ideal));
    assigned += share.back();
  }
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total_train && i < order.size(); ++i, ++assigned) ++share[order[i]];

  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto idx = by_class[classes[c]];
    std::shuffle(idx.begin(), idx.end(), rng);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(share[c]));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(share[c]), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

// ---------------------------------------------------------------- predictions

std::string predictions_to_jsonl(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    json j;
    j["tweet_id"] = p.tweet_id;
    j["p_incivil"] = p.p_incivil;
    j["label_pred"] = std::string(corpus::to_string(p.label_pred));
    j["conflict_feature"] = p.conflict_feature ? json(*p.conflict_feature) : json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      Prediction p;
      p.tweet_id = j.at("tweet_id").get<std::string>();
      p.p_incivil = j.at("p_incivil").get<double>();
      p.label_pred = corpus::parse_label(j.at("label_pred").get<std::string>());
      if (j.contains("conflict_feature") && !j["conflict_feature"].is_null())
        p.conflict_feature = j["conflict_feature"].get<std::int64_t>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, "predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> kNames = {"tdsa", "charcnn", "bilstm", "fusion", "logistic", "ngram-logistic"};
  return kNames;
}

// ---------------------------------------------------------------- helpers

namespace {

/// Artifacts collected in memory and written together once a command succeeds.
class Outputs {
 public:
  Outputs(const PipelineConfig& config, std::string command) : config_(config), command_(std::move(command)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit(std::ostream& log) {
    json manifest;
    manifest["command"] = command_;
    manifest["seed"] = config_.seed;
    manifest["config_digest"] = config_.digest();
    manifest["outputs"] = json::array();
    for (const auto& [name, content] : files_) manifest["outputs"].push_back(name);
    add(command_ + "_manifest.json", manifest.dump(2) + "\n");
    for (const auto& [name, content] : files_) {
      const std::string path = (std::filesystem::path(config_.out_dir) / name).string();
      write_file(path, content);
      log << "wrote " << path << '\n';
    }
  }

 private:
  const PipelineConfig& config_;
  std::string command_;
  std::vector<std::pair<std::string, std::string>> files_;
};

void require(const std::string& path, const std::string& what) {
  if (path.empty()) throw Error(ErrorCode::kMissingInput, "missing input: no " + what + " path configured");
  if (!file_exists(path)) throw Error(ErrorCode::kMissingInput, "missing input: " + what + " not found at '" + path + "'");
}

int run(std::ostream& log, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return (e.code() == ErrorCode::kMissingInput || e.code() == ErrorCode::kEmpty) ? kExitInput : kExitFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::vector<corpus::Tweet> read_tweets(const std::string& path, const std::string& what, std::ostream& log) {
  require(path, what);
  auto result = corpus::load_tweets(path);
  for (const auto& err : result.errors)
    log << "warning: " << what << " line " << err.line << ": " << err.message << '\n';
  return std::move(result.records);
}

std::string checkpoint_extra(const PipelineConfig& config, json extra = json::object()) {
  extra["config_digest"] = config.digest();
  return extra.dump();
}

std::string history_json(const nn::TrainingHistory& h, json& out) {
  json epochs = json::array();
  for (const auto& e : h.epochs)
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"validation_loss", e.validation_loss}});
  out["epochs"] = epochs;
  out["best_epoch"] = h.best_epoch;
  out["best_validation_loss"] = h.best_validation_loss;
  out["early_stopped"] = h.early_stopped;
  return {};
}

struct LabeledSet {
  std::vector<corpus::Tweet> tweets;
  std::vector<int> labels;
};

LabeledSet join_labels(const std::vector<corpus::Tweet>& tweets, const std::vector<corpus::LabeledTweet>& labels,
                       std::ostream& log) {
  std::map<std::string, corpus::Label> label_of;
  for (const auto& l : labels) label_of[l.tweet_id] = l.label;
  LabeledSet out;
  std::set<std::string> seen;
  for (const auto& t : tweets) {
    auto it = label_of.find(t.id);
    if (it == label_of.end() || !seen.insert(t.id).second) continue;
    out.tweets.push_back(t);
    out.labels.push_back(it->second == corpus::Label::kIncivil ? 1 : 0);
  }
  if (seen.size() < label_of.size())
    log << "warning: " << label_of.size() - seen.size() << " labeled tweet ids not found in the corpus\n";
  return out;
}

std::vector<double> feature_row(const std::string& set, const corpus::Tweet& t, const corpus::Lexicon& lexicon,
                                int utc_offset) {
  if (set == "content") return features::content_features(t, lexicon, utc_offset).values;
  return features::textual_features(t, lexicon).values;
}

std::map<std::string, std::int64_t> load_conflicts_for(const PipelineConfig& config, bool required) {
  if (config.conflicts.empty() && !required) return {};
  if (config.conflicts.empty())
    throw Error(ErrorCode::kMissingInput, "the fusion model requires the conflicts CSV (set 'conflicts')");
  return conflict::load_feature_csv(config.conflicts);
}

std::string csv_row(const std::string& id, const std::vector<double>& values) {
  std::string row = id;
  for (double v : values) row += "," + format_double(v);
  return row + "\n";
}

}  // namespace

// ---------------------------------------------------------------- commands

int cmd_filter(const PipelineConfig& config, std::ostream& log) {
  return run(log, [&] {
    require(config.lexicon, "lexicon");
    auto lexicon = corpus::load_lexicon(config.lexicon);
    auto tweets = read_tweets(config.corpus, "corpus", log);
    FilterStats s;
    s.input = tweets.size();
    auto offensive = corpus::offensive_filter(tweets, lexicon);
    s.offensive_kept = offensive.size();
    s.offensive_dropped = s.input - s.offensive_kept;
    auto kept = corpus::mention_filter(offensive);
    s.mention_kept = kept.size();
    s.mention_dropped = s.offensive_kept - s.mention_kept;
    json stats = {{"input", s.input},
                  {"offensive_kept", s.offensive_kept},
                  {"offensive_dropped", s.offensive_dropped},
                  {"mention_kept", s.mention_kept},
                  {"mention_dropped", s.mention_dropped}};
    log << "filter: " << stats.dump() << '\n';
    Outputs out(config, "filter");
    out.add("filtered.jsonl", corpus::serialize_tweets(kept));
    out.add("filter_stats.json", stats.dump(2) + "\n");
    out.commit(log);
  });
}

int cmd_featurize(const PipelineConfig& config, std::ostream& log) {
  return run(log, [&] {
    require(config.lexicon, "lexicon");
    auto lexicon = corpus::load_lexicon(config.lexicon);
    auto tweets = read_tweets(config.corpus, "corpus", log);
    std::string content = "tweet_id", textual = "tweet_id";
    for (const auto& n : features::content_feature_names()) content += "," + n;
    for (const auto& n : features::textual_feature_names()) textual += "," + n;
    content += "\n";
    textual += "\n";
    for (const auto& t : tweets) {
      content += csv_row(t.id, features::content_features(t, lexicon, config.utc_offset_hours).values);
      textual += csv_row(t.id, features::textual_features(t, lexicon).values);
    }
    Outputs out(config, "featurize");
    out.add("features_content.csv", content);
    out.add("features_textual.csv", textual);
    out.commit(log);
  });
}

int cmd_conflicts(const PipelineConfig& config, std::ostream& log) {
  return run(log, [&] {
    require(config.tdsa_checkpoint, "TDSA checkpoint");
    auto classifier = tdsa::load_classifier(nn::Checkpoint::load(config.tdsa_checkpoint));
    auto tweets = read_tweets(config.corpus, "corpus", log);
    auto timeline_tweets = config.timelines.empty() ? tweets : read_tweets(config.timelines, "timelines", log);
    auto timelines = corpus::build_timelines(timeline_tweets);

    text::RuleBasedRecognizer rules;
    std::optional<text::AnnotatedRecognizer> annotated;
    if (!config.entities.empty()) {
      require(config.entities, "entity annotations");
      annotated = text::AnnotatedRecognizer::load(config.entities, &rules);
    }
    const text::EntityRecognizer& recognizer =
        annotated ? static_cast<const text::EntityRecognizer&>(*annotated) : rules;

    conflict::ProfileMap profiles;
    auto ensure_profile = [&](const std::string& user, const std::vector<corpus::Tweet>& slice) {
      if (!profiles.count(user)) profiles[user] = tdsa::profile_user(user, slice, recognizer, *classifier);
    };

    std::vector<std::pair<std::string, std::int64_t>> feature_rows;
    std::vector<std::pair<std::string, conflict::ConflictReport>> report_rows;
    std::vector<corpus::IncivilityContext> contexts;
    for (const auto& tweet : tweets) {
      corpus::IncivilityContext ctx;
      try {
        ctx = corpus::build_context(tweet, timelines, config.context_k);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoTargets && e.code() != ErrorCode::kSelfMentionOnly) throw;
        log << "warning: skipping tweet " << tweet.id << ": " << e.what() << '\n';
        continue;
      }
      const auto missing = [&](const std::string& u) {
        return std::find(ctx.missing_timelines.begin(), ctx.missing_timelines.end(), u) != ctx.missing_timelines.end();
      };
      if (missing(ctx.account_holder_id)) {
        log << "warning: skipping tweet " << tweet.id << ": no timeline for account holder " << ctx.account_holder_id
            << '\n';
        continue;
      }
      ensure_profile(ctx.account_holder_id, ctx.account_context);
      for (const auto& target : ctx.target_ids)
        if (!missing(target)) ensure_profile(target, ctx.target_contexts.at(target));
      std::int64_t total = 0;
      for (const auto& r : conflict::context_reports(ctx, profiles)) {
        total += r.conflicts;
        report_rows.emplace_back(ctx.tweet_id, r);
      }
      feature_rows.emplace_back(ctx.tweet_id, total);
      contexts.push_back(std::move(ctx));
    }

    Outputs out(config, "conflicts");
    out.add("conflicts.csv", conflict::feature_csv(feature_rows));
    out.add("conflict_report.csv", conflict::reports_to_csv(report_rows));
    if (!config.labels.empty()) {
      require(config.labels, "labels");
      auto labels = corpus::load_labels(config.labels);
      std::set<std::string> labeled;
      for (const auto& l : labels) labeled.insert(l.tweet_id);
      std::vector<corpus::IncivilityContext> with_label;
      for (const auto& c : contexts)
        if (labeled.count(c.tweet_id)) with_label.push_back(c);
      auto stats = conflict::conflict_statistics(with_label, labels, profiles);
      out.add("conflict_stats.csv", stats.to_csv());
      out.add("conflict_stats_meta.json", stats.metadata_json());
    }
    out.commit(log);
  });
}

namespace {

void train_tdsa_command(const PipelineConfig& config, Outputs& out, std::ostream& log) {
  require(config.tdsa_train, "TDSA training set");
  auto train = tdsa::load_dataset(config.tdsa_train);
  std::vector<tdsa::TdExample> validation;
  if (!config.tdsa_validation.empty()) {
    require(config.tdsa_validation, "TDSA validation set");
    validation = tdsa::load_dataset(config.tdsa_validation);
  } else {
    std::vector<int> labels;
    for (const auto& ex : train) labels.push_back(ex.label ? static_cast<int>(*ex.label) : -1);
    auto [tr, va] = stratified_split(labels, 1.0 - config.validation_fraction, config.seed + 1);
    std::vector<tdsa::TdExample> t2;
    for (auto i : tr) t2.push_back(train[i]);
    for (auto i : va) validation.push_back(train[i]);
    train = std::move(t2);
  }
  std::optional<tdsa::WordEmbeddingTable> embeddings;
  if (!config.embeddings.empty()) {
    require(config.embeddings, "word embeddings");
    embeddings = tdsa::WordEmbeddingTable::load(config.embeddings);
  }
  nn::TrainingConfig tc = config.training;
  tc.seed = config.seed;
  auto result = tdsa::train_tdsa(train, validation, embeddings ? &*embeddings : nullptr, config.tdsa, tc);
  auto ckpt = result.model.to_checkpoint(config.seed);
  ckpt.extra_json = checkpoint_extra(config);
  json metrics;
  metrics["model"] = "tdsa";
  metrics["seed"] = config.seed;
  metrics["config_digest"] = config.digest();
  metrics["train_size"] = train.size();
  metrics["validation_size"] = validation.size();
  metrics["train_accuracy"] = tdsa::accuracy(result.model, train);
  metrics["validation_accuracy"] = tdsa::accuracy(result.model, validation);
  history_json(result.history, metrics);
  log << "tdsa: validation accuracy " << metrics["validation_accuracy"].get<double>() << '\n';
  out.add("tdsa.ckpt", ckpt.serialize());
  out.add("metrics_tdsa.json", metrics.dump(2) + "\n");
}

std::vector<classifier::CharExample> encode_all(const std::vector<corpus::Tweet>& tweets, const std::vector<int>& labels,
                                                const std::vector<std::size_t>& idx, const text::CharVocab& vocab,
                                                std::size_t max_len,
                                                const std::map<std::string, std::int64_t>& conflicts,
                                                std::size_t* missing_conflicts) {
  std::vector<classifier::CharExample> out;
  for (auto i : idx) {
    classifier::CharExample ex{text::char_encode(tweets[i].text, vocab, max_len), labels[i], 0};
    auto it = conflicts.find(tweets[i].id);
    if (it != conflicts.end()) {
      ex.conflict = it->second;
    } else if (missing_conflicts != nullptr) {
      ++*missing_conflicts;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

void train_classifier_command(const PipelineConfig& config, const std::string& model, Outputs& out,
                              std::ostream& log) {
  require(config.labels, "labels");
  const bool is_fusion = model == "fusion";
  auto conflicts = load_conflicts_for(config, is_fusion);
  std::optional<corpus::Lexicon> lexicon;
  if (model == "logistic") {
    require(config.lexicon, "lexicon");
    lexicon = corpus::load_lexicon(config.lexicon);
  }
  auto tweets = read_tweets(config.corpus, "corpus", log);
  auto data = join_labels(tweets, corpus::load_labels(config.labels), log);
  if (data.tweets.empty()) throw Error(ErrorCode::kEmpty, "no labeled tweets found in the corpus");
  auto [train_idx, test_idx] = stratified_split(data.labels, config.train_fraction, config.seed);

  std::vector<std::string> split_of(data.tweets.size(), "test");
  for (auto i : train_idx) split_of[i] = "train";

  nn::TrainingConfig tc = config.training;
  tc.seed = config.seed;
  json metrics;
  metrics["model"] = model;
  metrics["seed"] = config.seed;
  metrics["config_digest"] = config.digest();

  std::vector<double> test_scores;
  std::vector<int> test_labels;
  for (auto i : test_idx) test_labels.push_back(data.labels[i]);
  nn::Checkpoint ckpt;

  if (model == "logistic" || model == "ngram-logistic") {
    std::vector<std::vector<double>> X_train, X_test;
    std::vector<int> y_train;
    json extra;
    if (model == "logistic") {
      extra["feature_set"] = config.feature_set;
      for (auto i : train_idx) X_train.push_back(feature_row(config.feature_set, data.tweets[i], *lexicon, config.utc_offset_hours));
      for (auto i : test_idx) X_test.push_back(feature_row(config.feature_set, data.tweets[i], *lexicon, config.utc_offset_hours));
    } else {
      std::vector<text::TokenSeq> docs;
      for (auto i : train_idx) docs.push_back(text::tokenize(data.tweets[i].text));
      auto vec = features::fit_vectorizer(docs, config.ngram_n, config.min_df);
      std::vector<features::SparseRow> rows;
      std::vector<int> y;
      for (std::size_t k = 0; k < docs.size(); ++k) {
        rows.push_back(vec.counts(docs[k]));
        y.push_back(data.labels[train_idx[k]]);
      }
      vec = features::chi2_select(vec, rows, y, std::min(config.select_k, vec.features.size()));
      for (const auto& d : docs) X_train.push_back(vec.transform(d));
      for (auto i : test_idx) X_test.push_back(vec.transform(text::tokenize(data.tweets[i].text)));
      extra["vectorizer"] = json::parse(vec.to_json());
    }
    for (auto i : train_idx) y_train.push_back(data.labels[i]);
    auto lm = classifier::logistic_train(X_train, y_train, config.l2, config.logistic);
    for (const auto& x : X_test) test_scores.push_back(lm.predict(x));
    ckpt = classifier::logistic_to_checkpoint(lm, model, config.seed, checkpoint_extra(config, extra));
    metrics["train_size"] = train_idx.size();
  } else {
    std::vector<int> train_labels;
    for (auto i : train_idx) train_labels.push_back(data.labels[i]);
    auto [fit_pos, val_pos] = stratified_split(train_labels, 1.0 - config.validation_fraction, config.seed + 1);
    std::vector<std::size_t> fit_idx, val_idx;
    for (auto p : fit_pos) fit_idx.push_back(train_idx[p]);
    for (auto p : val_pos) {
      val_idx.push_back(train_idx[p]);
      split_of[train_idx[p]] = "validation";
    }
    std::vector<std::string> texts;
    for (auto i : fit_idx) texts.push_back(data.tweets[i].text);
    auto vocab = text::CharVocab::build(texts);
    const std::size_t max_len = model == "bilstm" ? config.bilstm.max_len : config.charcnn.max_len;
    std::size_t missing = 0;
    std::size_t* miss = is_fusion ? &missing : nullptr;
    auto fit = encode_all(data.tweets, data.labels, fit_idx, vocab, max_len, conflicts, miss);
    auto val = encode_all(data.tweets, data.labels, val_idx, vocab, max_len, conflicts, miss);
    auto test = encode_all(data.tweets, data.labels, test_idx, vocab, max_len, conflicts, miss);
    if (missing > 0) log << "warning: " << missing << " tweets have no conflict count; using 0\n";
    Rng rng(config.seed);
    nn::TrainingHistory history;
    std::unique_ptr<classifier::IncivilityModel> trained;
    if (model == "charcnn") {
      auto m = std::make_unique<classifier::CharCnnModel>(vocab, config.charcnn, rng);
      history = classifier::train_charcnn(*m, fit, val, tc);
      trained = std::move(m);
    } else if (model == "fusion") {
      classifier::FusionConfig fc{config.charcnn, config.fusion_hidden};
      auto m = std::make_unique<classifier::FusionModel>(vocab, fc, rng);
      history = classifier::train_fusion(*m, fit, val, tc);
      trained = std::move(m);
    } else {
      auto m = std::make_unique<classifier::CharBiLstmModel>(vocab, config.bilstm, rng);
      history = classifier::train_bilstm(*m, fit, val, tc);
      trained = std::move(m);
    }
    test_scores = trained->predict(test);
    ckpt = trained->to_checkpoint(config.seed);
    ckpt.extra_json = checkpoint_extra(config);
    metrics["train_size"] = fit_idx.size();
    metrics["validation_size"] = val_idx.size();
    history_json(history, metrics);
  }
  metrics["test_size"] = test_idx.size();
  if (!test_idx.empty()) {
    auto report = classifier::evaluate(test_scores, test_labels);
    metrics["test"] = json::parse(report.to_json());
    log << model << ": test accuracy " << report.accuracy << '\n';
  }
  std::string split_csv = "tweet_id,split\n";
  for (std::size_t i = 0; i < data.tweets.size(); ++i) split_csv += data.tweets[i].id + "," + split_of[i] + "\n";
  out.add(model + ".ckpt", ckpt.serialize());
  out.add("metrics_" + model + ".json", metrics.dump(2) + "\n");
  out.add("split.csv", split_csv);
}

}  // namespace

int cmd_train(const PipelineConfig& config, const std::string& model, std::ostream& log) {
  const auto& names = model_names();
  if (std::find(names.begin(), names.end(), model) == names.end()) {
    log << "error: unknown model '" << model << "'\n";
    return kExitInput;
  }
  return run(log, [&] {
    Outputs out(config, "train_" + model);
    if (model == "tdsa") {
      train_tdsa_command(config, out, log);
    } else {
      train_classifier_command(config, model, out, log);
    }
    out.commit(log);
  });
}

namespace {

std::set<std::string> test_ids(const PipelineConfig& config) {
  require(config.split, "split file");
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (const auto& line : split(read_file(config.split), '\n')) {
    if (++line_no == 1 || trim(line).empty()) continue;
    auto cols = split(trim(line), ',');
    if (cols.size() != 2) throw Error(ErrorCode::kParse, "split file line " + std::to_string(line_no) + ": 2 columns expected");
    if (cols[1] == "test") ids.insert(cols[0]);
  }
  return ids;
}

}  // namespace

int cmd_predict(const PipelineConfig& config, std::ostream& log) {
  return run(log, [&] {
    require(config.checkpoint, "checkpoint");
    auto ckpt = nn::Checkpoint::load(config.checkpoint);
    auto tweets = read_tweets(config.corpus, "corpus", log);
    if (!config.split.empty()) {
      auto ids = test_ids(config);
      std::erase_if(tweets, [&](const corpus::Tweet& t) { return !ids.count(t.id); });
    }
    const bool is_fusion = ckpt.kind == "fusion";
    auto conflicts = load_conflicts_for(config, is_fusion);
    std::vector<Prediction> preds;
    auto conflict_of = [&](const std::string& id) -> std::optional<std::int64_t> {
      auto it = conflicts.find(id);
      if (it != conflicts.end()) return it->second;
      if (is_fusion) return std::int64_t{0};
      return std::nullopt;
    };
    std::vector<double> scores;
    if (ckpt.kind == "logistic" || ckpt.kind == "ngram-logistic") {
      auto lm = classifier::logistic_from_checkpoint(ckpt);
      json extra = json::parse(ckpt.extra_json);
      if (ckpt.kind == "logistic") {
        require(config.lexicon, "lexicon");
        auto lexicon = corpus::load_lexicon(config.lexicon);
        const std::string set = extra.at("feature_set").get<std::string>();
        for (const auto& t : tweets) scores.push_back(lm.predict(feature_row(set, t, lexicon, config.utc_offset_hours)));
      } else {
        auto vec = features::VectorizerModel::from_json(extra.at("vectorizer").dump());
        if (vec.output_dim() != lm.weights.size())
          throw Error(ErrorCode::kVocabMismatch, "vectorizer and logistic weights disagree in size");
        for (const auto& t : tweets) scores.push_back(lm.predict(vec.transform(text::tokenize(t.text))));
      }
    } else if (ckpt.kind == "tdsa-lstm" || ckpt.kind == "tdsa-cue") {
      throw Error(ErrorCode::kInvalidArgument, "checkpoint is a target-sentiment model, not an incivility classifier");
    } else {
      auto model = classifier::load_char_model(ckpt);
      std::vector<classifier::CharExample> batch;
      for (const auto& t : tweets)
        batch.push_back({text::char_encode(t.text, model->vocab(), model->max_len()), 0, conflict_of(t.id).value_or(0)});
      scores = model->predict(batch);
    }
    for (std::size_t i = 0; i < tweets.size(); ++i) {
      Prediction p;
      p.tweet_id = tweets[i].id;
      p.p_incivil = scores[i];
      p.label_pred = scores[i] >= classifier::kDecisionThreshold ? corpus::Label::kIncivil : corpus::Label::kCivil;
      p.conflict_feature = conflict_of(tweets[i].id);
      preds.push_back(std::move(p));
    }
    Outputs out(config, "predict");
    out.add("predictions.jsonl", predictions_to_jsonl(preds));
    out.commit(log);
  });
}

int cmd_eval(const PipelineConfig& config, std::ostream& log) {
  return run(log, [&] {
    require(config.predictions, "predictions");
    require(config.labels, "labels");
    auto preds = parse_predictions(read_file(config.predictions));
    std::map<std::string, corpus::Label> label_of;
    for (const auto& l : corpus::load_labels(config.labels)) label_of[l.tweet_id] = l.label;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& p : preds) {
      auto it = label_of.find(p.tweet_id);
      if (it == label_of.end()) continue;
      scores.push_back(p.p_incivil);
      labels.push_back(it->second == corpus::Label::kIncivil ? 1 : 0);
    }
    if (scores.empty()) throw Error(ErrorCode::kEmpty, "empty test set: no prediction has a label");
    auto report = classifier::evaluate(scores, labels);
    log << "eval: accuracy " << report.accuracy << " f1 " << report.f1_positive << '\n';
    Outputs out(config, "eval");
    out.add("eval.json", report.to_json());
    out.commit(log);
  });
}

int cmd_posthoc(const PipelineConfig& config, std::ostream& log) {
  return run(log, [&] {
    require(config.predictions, "predictions");
    auto preds = parse_predictions(read_file(config.predictions));
    auto tweets = read_tweets(config.corpus, "corpus", log);
    std::map<std::string, const corpus::Tweet*> by_id;
    for (const auto& t : tweets) by_id.emplace(t.id, &t);

    std::vector<posthoc::Incident> incidents;
    for (const auto& p : preds) {
      if (p.label_pred != corpus::Label::kIncivil) continue;
      auto it = by_id.find(p.tweet_id);
      if (it == by_id.end()) {
        log << "warning: predicted tweet " << p.tweet_id << " not in corpus\n";
        continue;
      }
      try {
        auto pairs = corpus::extract_pairs(*it->second);
        incidents.push_back({p.tweet_id, pairs.account_holder_id, pairs.target_ids});
      } catch (const Error& e) {
        log << "warning: skipping tweet " << p.tweet_id << ": " << e.what() << '\n';
      }
    }
    auto rep = posthoc::repetition_histogram(incidents);
    Outputs out(config, "posthoc");
    out.add("repetition_account.csv", posthoc::histogram_csv(rep.account_holders, "incivil_tweets"));
    out.add("repetition_target.csv", posthoc::histogram_csv(rep.targets, "times_attacked"));
    std::string swaps = "user_id\n";
    for (const auto& u : posthoc::role_swaps(rep)) swaps += u + "\n";
    out.add("role_swaps.csv", swaps);

    if (!config.profiles.empty()) {
      require(config.profiles, "profiles");
      auto loaded = corpus::load_profiles(config.profiles);
      for (const auto& err : loaded.errors) log << "warning: profiles line " << err.line << ": " << err.message << '\n';
      std::map<std::string, corpus::UserProfile> profiles;
      for (const auto& p : loaded.records) profiles[p.user_id] = p;
      std::vector<double> holder_followers, target_followers;
      for (const auto& [user, n] : rep.per_account_holder)
        if (profiles.count(user)) holder_followers.push_back(static_cast<double>(profiles[user].followers_count));
      for (const auto& [user, n] : rep.per_target)
        if (profiles.count(user)) target_followers.push_back(static_cast<double>(profiles[user].followers_count));
      posthoc::BucketSpec spec;
      out.add("followers_buckets.csv",
              posthoc::bucket_csv({{"account_holder", posthoc::bucket_distribution(holder_followers, spec)},
                                   {"target", posthoc::bucket_distribution(target_followers, spec)}}));
      std::vector<posthoc::RatioRow> rows;
      for (const auto& inc : incidents) {
        for (const auto& target : inc.targets) {
          auto a = profiles.find(inc.account_holder), t = profiles.find(target);
          if (a == profiles.end() || t == profiles.end()) continue;
          try {
            posthoc::RatioRow row{inc.tweet_id, inc.account_holder, target, posthoc::reputation(a->second),
                                  posthoc::reputation(t->second), posthoc::reputation_ratio(a->second, t->second)};
            rows.push_back(row);
          } catch (const Error& e) {
            log << "warning: tweet " << inc.tweet_id << " target " << target << ": " << e.what() << '\n';
          }
        }
      }
      out.add("reputation_ratio.csv", posthoc::ratio_csv(rows));
    }

    if (!config.category_lexicon.empty()) {
      auto lexicon = posthoc::CategoryLexicon::load(config.category_lexicon);
      auto timeline_tweets = config.timelines.empty() ? tweets : read_tweets(config.timelines, "timelines", log);
      auto timelines = corpus::build_timelines(timeline_tweets);
      auto texts_of = [&](const std::map<std::string, std::int64_t>& users) {
        std::map<std::string, std::vector<text::TokenSeq>> out_map;
        for (const auto& [user, n] : users) {
          auto it = timelines.find(user);
          if (it == timelines.end()) continue;
          const auto& tw = it->second.tweets();
          for (std::size_t i = 0; i < std::min(config.context_k, tw.size()); ++i)
            out_map[user].push_back(text::tokenize(tw[i].text));
        }
        return out_map;
      };
      out.add("categories.csv",
              posthoc::category_csv({{"account_holder", posthoc::user_category_summary(texts_of(rep.per_account_holder), lexicon)},
                                     {"target", posthoc::user_category_summary(texts_of(rep.per_target), lexicon)}}));
    }
    out.commit(log);
  });
}

int cmd_gradcheck(const PipelineConfig& config, std::ostream& log) {
  bool all_passed = true;
  int code = run(log, [&] {
    gradsuite::SuiteOptions options;
    options.seed = config.seed + 11;
    std::string csv = "component,checked,skipped,max_rel_error,worst_entry,passed\n";
    for (const auto& r : gradsuite::run_all(options)) {
      const bool ok = r.passed(gradsuite::kTolerance);
      all_passed = all_passed && ok;
      csv += r.name + "," + std::to_string(r.checked) + "," + std::to_string(r.skipped) + "," +
             format_double(r.max_rel_error) + "," + r.worst_entry + "," + (ok ? "true" : "false") + "\n";
      log << (ok ? "PASS " : "FAIL ") << r.name << " max_rel_error=" << r.max_rel_error << " checked=" << r.checked
          << " skipped=" << r.skipped << '\n';
    }
    Outputs out(config, "gradcheck");
    out.add("gradcheck.csv", csv);
    out.commit(log);
  });
  if (code != kExitOk) return code;
  return all_passed ? kExitOk : kExitFailure;
}

}  // namespace incivil::pipeline
