#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "acci/checkpoint.hpp"
#include "acci/config.hpp"
#include "acci/error.hpp"
#include "acci/pipeline.hpp"
#include "acci/synth.hpp"

using namespace acci;

namespace {

PipelineConfig small_config() {
  PipelineConfig c;
  c.encoder_dim = 8;
  c.heads_hidden = 8;
  c.encoder_layers = 1;
  c.oov_buckets = 8;
  c.train.lr_encoder = 1e-2;
  c.train.lr_heads = 3e-2;
  c.train.batch_size = 8;
  c.train.epochs = 3;
  c.seed = 3;
  c.train.seed = 3;
  return c;
}

struct Fixture {
  SyntheticCorpora corpora;
  PipelineConfig config = small_config();
  PairDataset train;
  Model model;

  Fixture(std::size_t n, double p_confounder)
      : corpora(make(n, p_confounder)), train(build_dataset(corpora.train, config, true)), model(init()) {}

  static SyntheticCorpora make(std::size_t n, double p) {
    ConfoundSpec s;
    s.p_confounder = p;
    s.flip_rate_test = 0.0;
    s.n_train = n;
    s.n_dev = 0;
    s.n_test = 0;
    return generate_confounded_corpus(s, 21);
  }
  Model init() const {
    const Corpus* cs[] = {&corpora.train};
    return make_model(config, cs);
  }
};

double accuracy(const Model& m, const PairDataset& d) {
  const auto scored = combine_scores(d, score_dataset(m, d), 0.0, 0.0);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) ok += scored[i].score.decision == (d.pairs[i].gold_label == 1);
  return static_cast<double>(ok) / static_cast<double>(scored.size());
}

}  // namespace

TEST_CASE("binary cross-entropy values") {
  const double y1[] = {1.0}, p1[] = {0.5};
  CHECK(bce(y1, p1) == doctest::Approx(0.693147).epsilon(1e-6));
  const double y2[] = {1.0, 0.0}, p2[] = {0.9, 0.2};
  CHECK(bce(y2, p2) == doctest::Approx(0.1642520).epsilon(1e-6));
  const double p3[] = {0.0};
  CHECK(bce(y1, p3) == doctest::Approx(-std::log(kProbabilityClamp)));
  const double y4[] = {1.0, 0.0};
  CHECK_THROWS_AS(bce(y4, p1), ContractError);
  const double logits[] = {0.0};
  CHECK(bce_with_logits(y1, logits) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("pointwise loss gradients") {
  const LossPoint a = pointwise_loss(LossKind::bce_probabilities, 1.0, 0.3);
  CHECK(a.d_logit == doctest::Approx(sigmoid(0.3) - 1.0));
  const LossPoint clamped = pointwise_loss(LossKind::bce_probabilities, 1.0, -40.0);
  CHECK(clamped.d_logit == 0.0);
  const LossPoint logit = pointwise_loss(LossKind::bce_logits, 1.0, -40.0);
  CHECK(logit.d_logit == doctest::Approx(-1.0));
  CHECK(logit.loss == doctest::Approx(40.0));
}

TEST_CASE("joint loss") {
  CHECK(joint_loss(0.4, 1.0, 0.3) == doctest::Approx(0.7));
  CHECK(joint_loss(0.4, 1.0, 0.0) == 0.4);
  const double y[] = {1.0}, pf[] = {0.5}, pc[] = {0.5};
  CHECK(joint_loss(y, pf, pc, 1.0) == doctest::Approx(2 * std::log(2.0)));
}

TEST_CASE("train config validation") {
  TrainConfig c;
  c.batch_size = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.lr_heads = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.alpha_train = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("zero epochs returns the initial model") {
  Fixture f(12, 0.9);
  TrainConfig c = f.config.train;
  c.epochs = 0;
  const FitResult r = fit(f.model, f.train.examples, c);
  CHECK(r.model.heads == f.model.heads);
  CHECK(r.history.epochs.empty());
}

TEST_CASE("training is deterministic") {
  Fixture f(24, 0.9);
  const FitResult a = fit(f.model, f.train.examples, f.config.train);
  const FitResult b = fit(f.model, f.train.examples, f.config.train);
  CHECK(a.model.heads == b.model.heads);
  CHECK(a.history.batch_hash == b.history.batch_hash);
  REQUIRE(a.history.epochs.size() == 3);
  CHECK(a.history.epochs[2].loss_f == b.history.epochs[2].loss_f);
}

TEST_CASE("alpha 0 leaves the argument head untouched") {
  Fixture f(16, 0.9);
  TrainConfig c = f.config.train;
  c.alpha_train = 0.0;
  c.train_bias_head = false;
  const FitResult r = fit(f.model, f.train.examples, c);
  CHECK(r.model.heads.w_arg == f.model.heads.w_arg);
  CHECK(r.model.heads.phi_e == f.model.heads.phi_e);
  CHECK(r.model.heads.w_e == f.model.heads.w_e);
  CHECK(r.model.heads.w != f.model.heads.w);
}

TEST_CASE("bias step only touches the bias head") {
  Fixture f(16, 0.9);
  Model m = f.model;
  Trainer t(m, f.config.train);
  t.bias_step(std::span<const TrainExample>(f.train.examples).subspan(0, 8));
  CHECK(m.heads.w == f.model.heads.w);
  CHECK(m.heads.w_f == f.model.heads.w_f);
  CHECK(m.heads.w_arg == f.model.heads.w_arg);
  CHECK(m.toy()->embeddings() == f.model.toy()->embeddings());
  CHECK(m.heads.w_e != f.model.heads.w_e);
}

TEST_CASE("a separable toy problem is learned") {
  Fixture f(64, 1.0);
  TrainConfig c = f.config.train;
  c.epochs = 50;
  const FitResult r = fit(f.model, f.train.examples, c);
  CHECK(accuracy(r.model, f.train) >= 0.95);
}

TEST_CASE("training lowers the loss on a small set") {
  Fixture f(16, 0.9);
  TrainConfig c = f.config.train;
  c.epochs = 10;
  const FitResult r = fit(f.model, f.train.examples, c);
  CHECK(r.history.epochs.back().loss_f < r.history.epochs.front().loss_f);
}

TEST_CASE("non-finite losses abort training") {
  Fixture f(8, 0.9);
  Model broken = f.model;
  broken.heads.w_p[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit(broken, f.train.examples, f.config.train), TrainingError);
}

TEST_CASE("dev selection keeps the best epoch") {
  Fixture f(16, 0.9);
  int calls = 0;
  const std::vector<double> scores = {0.2, 0.9, 0.5};
  const FitResult r = fit(f.model, f.train.examples, f.config.train, [&](const Model&) { return scores[calls++]; });
  CHECK(calls == 3);
  REQUIRE(r.history.best_epoch.has_value());
  CHECK(*r.history.best_epoch == 2);
}

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nencoder.dim = 16\ntrain.alpha = 0.5\n\ninfer.alpha = auto\n");
  const PipelineConfig c = parse_config(in);
  CHECK(c.encoder_dim == 16);
  CHECK(c.effective_alpha_infer() == 0.5);
  std::istringstream bad("nope = 1\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  std::istringstream bad_value("train.epochs = -3\n");
  CHECK_THROWS_AS(parse_config(bad_value), ConfigError);
  std::istringstream text(config_text(synthetic_experiment_config()));
  CHECK(config_text(parse_config(text)) == config_text(synthetic_experiment_config()));
  std::size_t lines = 0;
  for (char ch : config_text(c)) lines += ch == '\n';
  CHECK(lines == config_keys().size());
}

TEST_CASE("checkpoint round trip") {
  Fixture f(8, 0.9);
  const FitResult r = fit(f.model, f.train.examples, f.config.train);
  const Checkpoint ck = parse_checkpoint(checkpoint_json(r.model, f.config));
  CHECK(ck.model.heads == r.model.heads);
  CHECK(config_text(ck.config) == config_text(f.config));
  const auto a = score_dataset(r.model, f.train), b = score_dataset(ck.model, f.train);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p_f == b[i].p_f);
    CHECK(a[i].s_bias == b[i].s_bias);
  }
  CHECK_THROWS_AS(parse_checkpoint("{\"format\":\"other\"}"), ValidationError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ck.json"), ValidationError);
}
