// incivil: command-line driver for the incivility pipeline.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "incivil/pipeline.hpp"
#include "incivil/util.hpp"

namespace {

using incivil::pipeline::PipelineConfig;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> context_k;
  std::optional<std::string> corpus, profiles, timelines, lexicon, labels, embeddings, category_lexicon, entities;
  std::optional<std::string> tdsa_train, tdsa_validation, tdsa_checkpoint, conflicts, checkpoint, predictions, split;
};

void apply(const Overrides& o, PipelineConfig& c) {
  auto set = [](const std::optional<std::string>& v, std::string& dst) {
    if (v) dst = *v;
  };
  if (o.seed) c.seed = *o.seed;
  if (o.context_k) c.context_k = *o.context_k;
  set(o.out_dir, c.out_dir);
  set(o.corpus, c.corpus);
  set(o.profiles, c.profiles);
  set(o.timelines, c.timelines);
  set(o.lexicon, c.lexicon);
  set(o.labels, c.labels);
  set(o.embeddings, c.embeddings);
  set(o.category_lexicon, c.category_lexicon);
  set(o.entities, c.entities);
  set(o.tdsa_train, c.tdsa_train);
  set(o.tdsa_validation, c.tdsa_validation);
  set(o.tdsa_checkpoint, c.tdsa_checkpoint);
  set(o.conflicts, c.conflicts);
  set(o.checkpoint, c.checkpoint);
  set(o.predictions, c.predictions);
  set(o.split, c.split);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incivility detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON config file");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--out-dir", o.out_dir, "Directory for artifacts");
  app.add_option("--context-k", o.context_k, "Timeline tweets per user")->check(CLI::PositiveNumber);
  app.add_option("--corpus", o.corpus, "Tweet JSONL");
  app.add_option("--profiles", o.profiles, "User profile JSONL");
  app.add_option("--timelines", o.timelines, "Timeline tweet JSONL");
  app.add_option("--lexicon", o.lexicon, "Offensive lexicon");
  app.add_option("--labels", o.labels, "Label CSV");
  app.add_option("--embeddings", o.embeddings, "Pretrained word vectors");
  app.add_option("--category-lexicon", o.category_lexicon, "Category lexicon");
  app.add_option("--entities", o.entities, "Entity annotations");
  app.add_option("--tdsa-train", o.tdsa_train, "Target sentiment training TSV");
  app.add_option("--tdsa-validation", o.tdsa_validation, "Target sentiment validation TSV");
  app.add_option("--tdsa-checkpoint", o.tdsa_checkpoint, "Target sentiment checkpoint");
  app.add_option("--conflicts", o.conflicts, "Conflict feature CSV");
  app.add_option("--checkpoint", o.checkpoint, "Classifier checkpoint");
  app.add_option("--predictions", o.predictions, "Predictions JSONL");
  app.add_option("--split", o.split, "Split CSV from train");

  std::string model;
  auto* filter = app.add_subcommand("filter", "Offensive-lexicon and mention filtering");
  auto* featurize = app.add_subcommand("featurize", "Hand-crafted feature tables");
  auto* conflicts = app.add_subcommand("conflicts", "Opinion-conflict features");
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("model", model, "Model name")
      ->required()
      ->check(CLI::IsMember(incivil::pipeline::model_names()));
  auto* predict = app.add_subcommand("predict", "Score tweets with a checkpoint");
  auto* eval = app.add_subcommand("eval", "Evaluate predictions against labels");
  auto* posthoc = app.add_subcommand("posthoc", "Repetition, reputation and category analyses");
  auto* gradcheck = app.add_subcommand("gradcheck", "Gradient check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : incivil::pipeline::kExitInput;
  }

  PipelineConfig config;
  try {
    if (!o.config_path.empty()) config = PipelineConfig::load(o.config_path);
    apply(o, config);
  } catch (const incivil::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == incivil::ErrorCode::kMissingInput ? incivil::pipeline::kExitInput
                                                          : incivil::pipeline::kExitFailure;
  }

  namespace p = incivil::pipeline;
  if (*filter) return p::cmd_filter(config, std::cerr);
  if (*featurize) return p::cmd_featurize(config, std::cerr);
  if (*conflicts) return p::cmd_conflicts(config, std::cerr);
  if (*train) return p::cmd_train(config, model, std::cerr);
  if (*predict) return p::cmd_predict(config, std::cerr);
  if (*eval) return p::cmd_eval(config, std::cerr);
  if (*posthoc) return p::cmd_posthoc(config, std::cerr);
  if (*gradcheck) return p::cmd_gradcheck(config, std::cerr);
  return p::kExitFailure;
}
