#include <gtest/gtest.h>

#include <sstream>

#include <sys/wait.h>

#include "incivil/conflict.hpp"
#include "incivil/pipeline.hpp"
#include "json.hpp"
#include "support/pipeline_fixture.hpp"

using namespace incivil;
using namespace incivil::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

/// Labeled corpus where the label is the presence of "idiot".
void write_labeled_corpus(const fs::path& dir, std::size_t n) {
  std::string corpus, labels = "tweet_id,label\n";
  const std::vector<std::string> civil = {"nice day", "thanks a lot", "good game", "see you soon"};
  for (std::size_t i = 0; i < n; ++i) {
    const bool bad = i % 2 == 0;
    const std::string id = "L" + std::to_string(i);
    const std::string text = "@x" + std::to_string(i % 5) + " " + (bad ? "you idiot " : "") + civil[i % civil.size()];
    corpus += json{{"id", id}, {"author_id", "a" + std::to_string(i % 7)}, {"text", text},
                   {"created_at", "2017-08-01T10:00:00Z"}}
                  .dump() +
              "\n";
    labels += id + (bad ? ",incivil\n" : ",civil\n");
  }
  fixture::write_text(dir / "labeled.jsonl", corpus);
  fixture::write_text(dir / "labels.csv", labels);
  fixture::write_text(dir / "lexicon.tsv", fixture::kLexicon);
}

PipelineConfig small_config(const fs::path& dir) {
  PipelineConfig c;
  c.corpus = (dir / "labeled.jsonl").string();
  c.labels = (dir / "labels.csv").string();
  c.lexicon = (dir / "lexicon.tsv").string();
  c.out_dir = (dir / "out").string();
  c.seed = 3;
  c.train_fraction = 0.7;
  c.validation_fraction = 0.2;
  c.training.max_epochs = 2;
  c.training.batch_size = 8;
  c.charcnn = {20, 12, 3, 3};
  c.bilstm = {20, 6, 5};
  c.fusion_hidden = 6;
  c.min_df = 1;
  c.logistic.epochs = 50;
  return c;
}

#ifdef INCIVIL_CLI
int run_cli(const std::string& args) {
  const int status = std::system((std::string(INCIVIL_CLI) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(Config, DefaultsRoundTripAndDigest) {
  PipelineConfig c;
  auto back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.digest(), c.digest());
  EXPECT_EQ(c.digest().size(), 16u);
  PipelineConfig moved = c;
  moved.out_dir = "elsewhere";
  EXPECT_EQ(moved.digest(), c.digest());
  moved.seed = 99;
  EXPECT_NE(moved.digest(), c.digest());
}

TEST(Config, PartialOverridesAndErrors) {
  auto c = PipelineConfig::from_json(R"({"seed": 7, "training": {"max_epochs": 3}, "context_k": 10})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.training.max_epochs, 3u);
  EXPECT_EQ(c.training.patience, 3u);
  EXPECT_EQ(c.context_k, 10u);
  EXPECT_THROW(PipelineConfig::from_json(R"({"sede": 7})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"training": {"lr": 1}})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"seed": "x"})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"train_fraction": 1.5})"), Error);
  EXPECT_THROW(PipelineConfig::from_json(R"({"feature_set": "other"})"), Error);
  EXPECT_THROW(PipelineConfig::from_json("{"), Error);
}

TEST(Split, DefaultSizes) {
  EXPECT_EQ(split_sizes(24271, kDefaultTrainFraction), (std::pair<std::size_t, std::size_t>{21000, 3271}));
  EXPECT_EQ(split_sizes(0, 0.5), (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(Split, StratifiedProperties) {
  std::vector<int> labels;
  for (int i = 0; i < 103; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
  auto [train, test] = stratified_split(labels, 0.8, 5);
  EXPECT_EQ(train.size() + test.size(), labels.size());
  EXPECT_EQ(train.size(), split_sizes(labels.size(), 0.8).first);
  EXPECT_TRUE(std::is_sorted(train.begin(), train.end()));
  std::vector<bool> seen(labels.size(), false);
  for (auto i : train) seen[i] = true;
  for (auto i : test) {
    EXPECT_FALSE(seen[i]);
    seen[i] = true;
  }
  std::size_t pos_train = 0;
  for (auto i : train) pos_train += labels[i];
  EXPECT_NEAR(static_cast<double>(pos_train) / train.size(), 35.0 / 103.0, 0.02);
  EXPECT_EQ(stratified_split(labels, 0.8, 5), stratified_split(labels, 0.8, 5));
  EXPECT_NE(stratified_split(labels, 0.8, 5).first, stratified_split(labels, 0.8, 6).first);
}

TEST(Predictions, JsonlRoundTripIsExact) {
  std::vector<Prediction> preds = {{"a", 1.0 / 3.0, corpus::Label::kCivil, std::nullopt},
                                   {"b", 0.7000000000000001, corpus::Label::kIncivil, 4}};
  auto back = parse_predictions(predictions_to_jsonl(preds));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].p_incivil, preds[0].p_incivil);
  EXPECT_EQ(back[1].p_incivil, preds[1].p_incivil);
  EXPECT_EQ(back[1].conflict_feature, 4);
  EXPECT_FALSE(back[0].conflict_feature);
  EXPECT_EQ(back[1].label_pred, corpus::Label::kIncivil);
}

TEST(Filter, TenTweetHandCount) {
  auto dir = fixture::scratch("filter10");
  fixture::write_text(dir / "corpus.jsonl", fixture::kFilterCorpus);
  fixture::write_text(dir / "lexicon.tsv", fixture::kLexicon);
  PipelineConfig c;
  c.corpus = (dir / "corpus.jsonl").string();
  c.lexicon = (dir / "lexicon.tsv").string();
  c.out_dir = (dir / "out").string();
  c.seed = 12;
  std::ostringstream log;
  ASSERT_EQ(cmd_filter(c, log), kExitOk) << log.str();
  auto stats = json::parse(fixture::read_text(dir / "out" / "filter_stats.json"));
  EXPECT_EQ(stats["input"], fixture::kFilterCounts.input);
  EXPECT_EQ(stats["offensive_kept"], fixture::kFilterCounts.offensive_kept);
  EXPECT_EQ(stats["offensive_dropped"], fixture::kFilterCounts.offensive_dropped);
  EXPECT_EQ(stats["mention_kept"], fixture::kFilterCounts.mention_kept);
  EXPECT_EQ(stats["mention_dropped"], fixture::kFilterCounts.mention_dropped);
  auto kept = lines(fixture::read_text(dir / "out" / "filtered.jsonl"));
  ASSERT_EQ(kept.size(), 4u);
  EXPECT_EQ(json::parse(kept[3])["id"], "p09");
  auto manifest = json::parse(fixture::read_text(dir / "out" / "filter_manifest.json"));
  EXPECT_EQ(manifest["seed"], 12);
  EXPECT_EQ(manifest["config_digest"], c.digest());
}

TEST(Filter, EmptyCorpusSucceeds) {
  auto dir = fixture::scratch("filter_empty");
  fixture::write_text(dir / "corpus.jsonl", "");
  fixture::write_text(dir / "lexicon.tsv", fixture::kLexicon);
  PipelineConfig c;
  c.corpus = (dir / "corpus.jsonl").string();
  c.lexicon = (dir / "lexicon.tsv").string();
  c.out_dir = (dir / "out").string();
  std::ostringstream log;
  ASSERT_EQ(cmd_filter(c, log), kExitOk) << log.str();
  EXPECT_EQ(fixture::read_text(dir / "out" / "filtered.jsonl"), "");
  auto stats = json::parse(fixture::read_text(dir / "out" / "filter_stats.json"));
  EXPECT_EQ(stats["input"], 0);
  EXPECT_EQ(stats["mention_kept"], 0);
}

TEST(Filter, MissingLexiconExitsTwoWithoutOutput) {
  auto dir = fixture::scratch("filter_missing");
  fixture::write_text(dir / "corpus.jsonl", fixture::kFilterCorpus);
  PipelineConfig c;
  c.corpus = (dir / "corpus.jsonl").string();
  c.lexicon = (dir / "nope.tsv").string();
  c.out_dir = (dir / "out").string();
  std::ostringstream log;
  EXPECT_EQ(cmd_filter(c, log), kExitInput);
  EXPECT_NE(log.str().find("lexicon"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "filtered.jsonl"));
}

TEST(Featurize, WritesBothTables) {
  auto dir = fixture::scratch("featurize");
  fixture::write_text(dir / "corpus.jsonl", fixture::kFilterCorpus);
  fixture::write_text(dir / "lexicon.tsv", fixture::kLexicon);
  PipelineConfig c;
  c.corpus = (dir / "corpus.jsonl").string();
  c.lexicon = (dir / "lexicon.tsv").string();
  c.out_dir = (dir / "out").string();
  std::ostringstream log;
  ASSERT_EQ(cmd_featurize(c, log), kExitOk) << log.str();
  EXPECT_EQ(lines(fixture::read_text(dir / "out" / "features_content.csv")).size(), 11u);
  EXPECT_EQ(lines(fixture::read_text(dir / "out" / "features_textual.csv")).size(), 11u);
}

class ConflictsCommand : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fixture::scratch("conflicts");
    fixture::write_text(dir_ / "corpus.jsonl", fixture::kConflictCorpus);
    fixture::write_text(dir_ / "timelines.jsonl", fixture::kConflictTimelines);
    fixture::write_text(dir_ / "cue.ckpt", tdsa::CueLexiconClassifier({"love"}, {"hate"}).to_checkpoint().serialize());
    config_.corpus = (dir_ / "corpus.jsonl").string();
    config_.timelines = (dir_ / "timelines.jsonl").string();
    config_.tdsa_checkpoint = (dir_ / "cue.ckpt").string();
    config_.out_dir = (dir_ / "out").string();
  }
  std::map<std::string, long> run(std::ostringstream& log) {
    EXPECT_EQ(cmd_conflicts(config_, log), kExitOk) << log.str();
    std::map<std::string, long> out;
    for (const auto& [k, v] : conflict::load_feature_csv((dir_ / "out" / "conflicts.csv").string())) out[k] = v;
    return out;
  }
  fs::path dir_;
  PipelineConfig config_;
};

TEST_F(ConflictsCommand, MatchesHandTally) {
  std::ostringstream log;
  EXPECT_EQ(run(log), fixture::kConflictsFull);
  EXPECT_NE(log.str().find("warning: skipping tweet c2"), std::string::npos);
  auto report = lines(fixture::read_text(dir_ / "out" / "conflict_report.csv"));
  EXPECT_EQ(report.size(), 4u);
  EXPECT_EQ(report[3], "c3,bob,dave,2,0");
}

TEST_F(ConflictsCommand, ContextSizeOverrideHonored) {
  config_.context_k = 1;
  std::ostringstream log;
  EXPECT_EQ(run(log), fixture::kConflictsK1);
}

TEST_F(ConflictsCommand, MissingCheckpoint) {
  config_.tdsa_checkpoint = (dir_ / "absent.ckpt").string();
  std::ostringstream log;
  EXPECT_EQ(cmd_conflicts(config_, log), kExitInput);
  EXPECT_NE(log.str().find("TDSA checkpoint"), std::string::npos);
}

TEST(Train, SameSeedSameCheckpoint) {
  auto dir = fixture::scratch("train_det");
  write_labeled_corpus(dir, 40);
  auto c = small_config(dir);
  for (const std::string model : {"charcnn", "bilstm", "logistic", "ngram-logistic"}) {
    std::ostringstream log;
    c.out_dir = (dir / "a").string();
    ASSERT_EQ(cmd_train(c, model, log), kExitOk) << log.str();
    c.out_dir = (dir / "b").string();
    ASSERT_EQ(cmd_train(c, model, log), kExitOk) << log.str();
    EXPECT_EQ(fixture::read_text(dir / "a" / (model + ".ckpt")), fixture::read_text(dir / "b" / (model + ".ckpt")))
        << model;
    EXPECT_EQ(fixture::read_text(dir / "a" / "split.csv"), fixture::read_text(dir / "b" / "split.csv"));
    auto metrics = json::parse(fixture::read_text(dir / "a" / ("metrics_" + model + ".json")));
    EXPECT_EQ(metrics["seed"], 3);
    EXPECT_EQ(metrics["test_size"], 12);
  }
}

TEST(Train, FusionNeedsConflicts) {
  auto dir = fixture::scratch("train_fusion");
  write_labeled_corpus(dir, 20);
  auto c = small_config(dir);
  std::ostringstream log;
  EXPECT_EQ(cmd_train(c, "fusion", log), kExitInput);
  EXPECT_NE(log.str().find("conflict"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "fusion.ckpt"));

  std::string csv = "tweet_id,conflict_count\n";
  for (int i = 0; i < 20; ++i) csv += "L" + std::to_string(i) + "," + std::to_string(i % 3) + "\n";
  fixture::write_text(dir / "conflicts.csv", csv);
  c.conflicts = (dir / "conflicts.csv").string();
  std::ostringstream log2;
  EXPECT_EQ(cmd_train(c, "fusion", log2), kExitOk) << log2.str();
}

TEST(Train, UnknownModelAndSingleClass) {
  auto dir = fixture::scratch("train_bad");
  write_labeled_corpus(dir, 10);
  auto c = small_config(dir);
  std::ostringstream log;
  EXPECT_EQ(cmd_train(c, "svm", log), kExitInput);
  fixture::write_text(dir / "labels.csv", "tweet_id,label\nL0,civil\nL1,civil\nL2,civil\n");
  EXPECT_EQ(cmd_train(c, "logistic", log), kExitFailure);
}

TEST(PredictEval, RoundTripReproducesMetrics) {
  auto dir = fixture::scratch("predict_eval");
  write_labeled_corpus(dir, 40);
  auto c = small_config(dir);
  for (const std::string model : {"charcnn", "ngram-logistic"}) {
    std::ostringstream log;
    c.out_dir = (dir / "train").string();
    ASSERT_EQ(cmd_train(c, model, log), kExitOk) << log.str();
    auto p = c;
    p.checkpoint = (dir / "train" / (model + ".ckpt")).string();
    p.split = (dir / "train" / "split.csv").string();
    p.out_dir = (dir / "pred").string();
    ASSERT_EQ(cmd_predict(p, log), kExitOk) << log.str();
    auto e = c;
    e.predictions = (dir / "pred" / "predictions.jsonl").string();
    e.out_dir = (dir / "eval").string();
    ASSERT_EQ(cmd_eval(e, log), kExitOk) << log.str();
    auto stored = json::parse(fixture::read_text(dir / "train" / ("metrics_" + model + ".json")))["test"];
    auto eval = json::parse(fixture::read_text(dir / "eval" / "eval.json"));
    EXPECT_EQ(eval["accuracy"].get<double>(), stored["accuracy"].get<double>()) << model;
    EXPECT_EQ(eval["f1_positive"].get<double>(), stored["f1_positive"].get<double>()) << model;
    EXPECT_EQ(eval["roc_auc"], stored["roc_auc"]) << model;
    EXPECT_EQ(eval["confusion"], stored["confusion"]) << model;
  }
}

TEST(PredictEval, FixtureMetrics) {
  auto dir = fixture::scratch("eval_fixture");
  fixture::write_text(dir / "pred.jsonl", fixture::kPredictions);
  fixture::write_text(dir / "labels.csv", fixture::kLabels);
  PipelineConfig c;
  c.predictions = (dir / "pred.jsonl").string();
  c.labels = (dir / "labels.csv").string();
  c.out_dir = (dir / "out").string();
  std::ostringstream log;
  ASSERT_EQ(cmd_eval(c, log), kExitOk) << log.str();
  auto eval = json::parse(fixture::read_text(dir / "out" / "eval.json"));
  EXPECT_EQ(eval["accuracy"].get<double>(), 4.0 / 6.0);
  EXPECT_EQ(eval["f1_positive"].get<double>(), 0.75);
  EXPECT_EQ(eval["roc_auc"].get<double>(), 0.75);
  EXPECT_EQ(eval["confusion"]["tp"], 3);
}

TEST(PredictEval, EmptyTestSetExitsTwo) {
  auto dir = fixture::scratch("eval_empty");
  fixture::write_text(dir / "pred.jsonl", fixture::kPredictions);
  fixture::write_text(dir / "labels.csv", "tweet_id,label\nzzz,civil\n");
  PipelineConfig c;
  c.predictions = (dir / "pred.jsonl").string();
  c.labels = (dir / "labels.csv").string();
  c.out_dir = (dir / "out").string();
  std::ostringstream log;
  EXPECT_EQ(cmd_eval(c, log), kExitInput);
  EXPECT_FALSE(fs::exists(dir / "out" / "eval.json"));
}

TEST(Posthoc, FixtureOracles) {
  auto dir = fixture::scratch("posthoc");
  fixture::write_text(dir / "corpus.jsonl", fixture::kFilterCorpus);
  fixture::write_text(dir / "pred.jsonl", fixture::kPredictions);
  fixture::write_text(dir / "profiles.jsonl", fixture::kProfiles);
  PipelineConfig c;
  c.corpus = (dir / "corpus.jsonl").string();
  c.predictions = (dir / "pred.jsonl").string();
  c.profiles = (dir / "profiles.jsonl").string();
  c.out_dir = (dir / "out").string();
  std::ostringstream log;
  ASSERT_EQ(cmd_posthoc(c, log), kExitOk) << log.str();
  EXPECT_EQ(fixture::read_text(dir / "out" / "repetition_account.csv"), "incivil_tweets,users\n2,1\n");
  EXPECT_EQ(fixture::read_text(dir / "out" / "repetition_target.csv"), "times_attacked,users\n2,1\n");
  EXPECT_EQ(fixture::read_text(dir / "out" / "role_swaps.csv"), "user_id\nalice\nbob\ndave\n");

  auto rows = lines(fixture::read_text(dir / "out" / "reputation_ratio.csv"));
  ASSERT_EQ(rows.size(), 6u);
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"alice", "bob"}, {"bob", "carol"}, {"bob", "alice"}, {"bob", "dave"}, {"dave", "carol"}};
  auto rep = [](const std::string& u) {
    auto [f, r] = fixture::kFollowersFriends.at(u);
    return f / (f + r);
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::string> cols;
    std::stringstream ss(rows[i + 1]);
    for (std::string col; std::getline(ss, col, ',');) cols.push_back(col);
    ASSERT_EQ(cols.size(), 6u);
    EXPECT_EQ(cols[1], pairs[i].first);
    EXPECT_EQ(cols[2], pairs[i].second);
    EXPECT_EQ(std::stod(cols[5]), rep(pairs[i].second) / rep(pairs[i].first)) << rows[i + 1];
  }

  // holders alice 300, bob 45, dave 1; targets bob 45, carol 90, alice 300, dave 1.
  std::map<std::string, std::vector<long>> counts;
  for (const auto& row : lines(fixture::read_text(dir / "out" / "followers_buckets.csv"))) {
    if (row.rfind("group", 0) == 0) continue;
    const auto close = row.rfind('"');
    counts[row.substr(0, row.find(','))].push_back(std::stol(row.substr(close + 2)));
  }
  EXPECT_EQ(counts["account_holder"], (std::vector<long>{0, 2, 1, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(counts["target"], (std::vector<long>{0, 3, 1, 0, 0, 0, 0, 0, 0}));
}

TEST(Gradcheck, CommandWritesTable) {
  auto dir = fixture::scratch("gradcheck");
  PipelineConfig c;
  c.out_dir = dir.string();
  std::ostringstream log;
  ASSERT_EQ(cmd_gradcheck(c, log), kExitOk) << log.str();
  auto rows = lines(fixture::read_text(dir / "gradcheck.csv"));
  EXPECT_EQ(rows[0], "component,checked,skipped,max_rel_error,worst_entry,passed");
  EXPECT_GE(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].substr(rows[i].rfind(',') + 1), "true") << rows[i];
}

TEST(Idempotence, RerunIsByteIdentical) {
  auto dir = fixture::scratch("idempotent");
  fixture::write_text(dir / "corpus.jsonl", fixture::kFilterCorpus);
  fixture::write_text(dir / "lexicon.tsv", fixture::kLexicon);
  PipelineConfig c;
  c.corpus = (dir / "corpus.jsonl").string();
  c.lexicon = (dir / "lexicon.tsv").string();
  std::ostringstream log;
  c.out_dir = (dir / "a").string();
  cmd_featurize(c, log);
  c.out_dir = (dir / "b").string();
  cmd_featurize(c, log);
  for (const auto* name : {"features_content.csv", "features_textual.csv", "featurize_manifest.json"})
    EXPECT_EQ(fixture::read_text(dir / "a" / name), fixture::read_text(dir / "b" / name)) << name;
}

#ifdef INCIVIL_CLI
TEST(Cli, ExitCodesAndFlagOverrides) {
  auto dir = fixture::scratch("cli");
  fixture::write_text(dir / "corpus.jsonl", fixture::kConflictCorpus);
  fixture::write_text(dir / "timelines.jsonl", fixture::kConflictTimelines);
  fixture::write_text(dir / "cue.ckpt", tdsa::CueLexiconClassifier({"love"}, {"hate"}).to_checkpoint().serialize());
  fixture::write_text(dir / "config.json", json{{"seed", 4}, {"out_dir", (dir / "cfg_out").string()}}.dump());
  const std::string d = dir.string();
  EXPECT_EQ(run_cli("filter --corpus " + d + "/corpus.jsonl --lexicon " + d + "/none.tsv --out-dir " + d + "/o"), 2);
  EXPECT_FALSE(fs::exists(dir / "o" / "filtered.jsonl"));
  EXPECT_EQ(run_cli("bogus"), 2);
  EXPECT_EQ(run_cli("train svm"), 2);
  EXPECT_EQ(run_cli("conflicts --config " + d + "/config.json --corpus " + d + "/corpus.jsonl --timelines " + d +
                    "/timelines.jsonl --tdsa-checkpoint " + d + "/cue.ckpt --context-k 1"),
            0);
  auto got = conflict::load_feature_csv((dir / "cfg_out" / "conflicts.csv").string());
  EXPECT_EQ(got.at("c3"), fixture::kConflictsK1.at("c3"));
  auto manifest = json::parse(fixture::read_text(dir / "cfg_out" / "conflicts_manifest.json"));
  EXPECT_EQ(manifest["seed"], 4);
  EXPECT_EQ(run_cli("conflicts --seed 9 --out-dir " + d + "/seeded --corpus " + d + "/corpus.jsonl --timelines " + d +
                    "/timelines.jsonl --tdsa-checkpoint " + d + "/cue.ckpt"),
            0);
  EXPECT_EQ(json::parse(fixture::read_text(dir / "seeded" / "conflicts_manifest.json"))["seed"], 9);
}
#endif
