#include <doctest.h>

#include <cmath>

#include "acci/experiment.hpp"
#include "acci/synth.hpp"

using namespace acci;

namespace {

PipelineConfig tiny_config() {
  PipelineConfig c;
  c.encoder_dim = 8;
  c.heads_hidden = 8;
  c.encoder_layers = 1;
  c.oov_buckets = 8;
  c.train.lr_encoder = 1e-2;
  c.train.lr_heads = 3e-2;
  c.train.batch_size = 8;
  c.train.epochs = 2;
  c.seed = 4;
  c.train.seed = 4;
  return c;
}

struct World {
  SyntheticCorpora corpora;
  PipelineConfig config = tiny_config();
  World() {
    ConfoundSpec s;
    s.n_train = 40;
    s.n_dev = 10;
    s.n_test = 12;
    corpora = generate_confounded_corpus(s, 9);
  }
};

World& world() {
  static World w;
  return w;
}

const TrainedPair& trained() {
  static const TrainedPair t =
      train_ablation_models(world().corpora.train, world().corpora.dev, world().corpora.test, world().config);
  return t;
}

const AblationRow& row_of(const std::vector<AblationRow>& rows, AblationMode m) {
  for (const auto& r : rows)
    if (r.mode == m) return r;
  FAIL("missing mode");
  return rows.front();
}

}  // namespace

TEST_CASE("datasets carry one example per pair and the gold partition") {
  const PairDataset d = build_dataset(world().corpora.test, world().config, false);
  CHECK(d.pairs.size() == 12);
  CHECK(d.examples.size() == d.pairs.size());
  CHECK(d.mentions.size() == 24);
  CHECK(d.gold.mention_count() == 24);
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    CHECK(d.examples[i].pair_id == d.pairs[i].pair_id);
    CHECK(d.examples[i].label == d.pairs[i].gold_label);
    CHECK(d.examples[i].inputs.factual.variant == Variant::factual);
  }
}

TEST_CASE("ablation modes") {
  const PipelineConfig& c = world().config;
  CHECK(parse_ablation_mode("no_tbm") == AblationMode::no_tbm);
  const ModeSettings none = mode_settings(AblationMode::no_both, c);
  CHECK(none.alpha_infer == 0.0);
  CHECK(none.beta == 0.0);
  const ModeSettings full = mode_settings(AblationMode::full, c);
  CHECK(full.alpha_infer == c.effective_alpha_infer());
  CHECK(full.beta == c.beta);
  CHECK(mode_settings(AblationMode::no_cae, c).alpha_train == 0.0);
}

TEST_CASE("both ablation models see the same batches") {
  const TrainedPair& t = trained();
  REQUIRE(t.with_history.has_value());
  REQUIRE(t.without_history.has_value());
  CHECK(t.with_history->batch_hash == t.without_history->batch_hash);
  CHECK(t.with_history->epochs.size() == 2);
}

TEST_CASE("no_both equals plain factual clustering") {
  const PairDataset test = build_dataset(world().corpora.test, world().config, false);
  const auto rows = run_ablation(trained(), test, world().config);
  REQUIRE(rows.size() == 4);
  const auto comps = score_dataset(trained().without_arguments, test);
  const EvalResult base = evaluate_scores(test, combine_scores(test, comps, 0.0, 0.0), world().config.cluster);
  const AblationRow& nb = row_of(rows, AblationMode::no_both);
  CHECK(nb.report.conll_f1 == base.report.conll_f1);
  CHECK(nb.pairwise_accuracy == base.pairwise_accuracy);
  CHECK(row_of(rows, AblationMode::full).delta_conll == 0.0);
}

TEST_CASE("beta sweep") {
  const PairDataset test = build_dataset(world().corpora.test, world().config, false);
  const auto grid = default_beta_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(1.0));
  const auto rows = sweep_beta(trained().with_arguments, test, world().config);
  REQUIRE(rows.size() == 21);
  const auto ablation = run_ablation(trained(), test, world().config, {AblationMode::no_tbm});
  CHECK(rows.front().conll_f1 == ablation.front().report.conll_f1);
  CHECK(rows.front().pairwise_accuracy == ablation.front().pairwise_accuracy);
  CHECK(sweep_csv(rows).find("beta") == 0);
}

TEST_CASE("loss comparison shares batches and starts equal") {
  const Corpus* cs[] = {&world().corpora.train};
  const Model init = make_model(world().config, cs);
  const PairDataset train = build_dataset(world().corpora.train, world().config, true);
  const LossComparison c = compare_losses(init, train, world().config);
  CHECK(c.probabilities.batch_hash == c.logits.batch_hash);
  REQUIRE_FALSE(c.probabilities.steps.empty());
  CHECK(std::abs(c.probabilities.steps[0].loss_f - c.logits.steps[0].loss_f) < 1e-6);
  CHECK(std::abs(c.probabilities.steps[0].joint - c.logits.steps[0].joint) < 1e-6);
  CHECK(loss_csv(c).find('\n') != std::string::npos);
}

TEST_CASE("manifest JSON") {
  ExperimentManifest m;
  m.command = "train";
  m.seed = 7;
  m.inputs = {{"a.jsonl", "0123456789abcdef"}};
  m.metrics_json = "{}";
  const std::string j = manifest_json(m);
  CHECK(j.find("\"train\"") != std::string::npos);
  CHECK(j.find("0123456789abcdef") != std::string::npos);
}
