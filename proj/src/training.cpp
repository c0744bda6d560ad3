#include "acci/training.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "acci/error.hpp"
#include "acci/rng.hpp"

namespace acci {

Model::Model(std::unique_ptr<EncoderBackend> encoder, PairHeads h, ContextWindow w)
    : heads(std::move(h)), window(w), encoder_(std::move(encoder)) {
  if (!encoder_) throw ConfigError("model needs an encoder");
  if (encoder_->dim() != heads.dim) throw ConfigError("encoder and head dimensions differ");
}

Model::Model(const Model& other) : heads(other.heads), window(other.window), encoder_(other.encoder_->clone()) {}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    heads = other.heads;
    window = other.window;
    encoder_ = other.encoder_->clone();
  }
  return *this;
}

ToyEncoder* Model::toy() { return dynamic_cast<ToyEncoder*>(encoder_.get()); }
const ToyEncoder* Model::toy() const { return dynamic_cast<const ToyEncoder*>(encoder_.get()); }

PairComponents score_components(const Model& model, const PairInputs& inputs) {
  PairComponents c;
  c.p_f = factual_score(model.heads, encode(model.encoder(), inputs.factual));
  c.p_c = argument_score(model.heads, encode(model.encoder(), inputs.argument_only));
  c.s_bias = bias_score(model.heads, encode(model.encoder(), inputs.trigger_only));
  return c;
}

LossKind parse_loss_kind(std::string_view s) {
  if (s == "bce-on-probabilities" || s == "bce") return LossKind::bce_probabilities;
  if (s == "bce-on-logits" || s == "bce-logits") return LossKind::bce_logits;
  throw ConfigError("unknown loss kind '" + std::string(s) + "'");
}

std::string_view to_string(LossKind k) {
  return k == LossKind::bce_probabilities ? "bce-on-probabilities" : "bce-on-logits";
}

namespace {

double clamp_probability(double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

double bce(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw ContractError("bce: label and prediction counts differ");
  if (y_true.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double p = clamp_probability(y_pred[i]);
    sum += -(y_true[i] * std::log(p) + (1.0 - y_true[i]) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(y_true.size());
}

double bce_with_logits(std::span<const double> y_true, std::span<const double> logits) {
  if (y_true.size() != logits.size()) throw ContractError("bce: label and logit counts differ");
  if (y_true.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) sum += softplus(logits[i]) - y_true[i] * logits[i];
  return sum / static_cast<double>(y_true.size());
}

LossPoint pointwise_loss(LossKind kind, double label, double logit) {
  const double p = sigmoid(logit);
  if (kind == LossKind::bce_logits) return {softplus(logit) - label * logit, p - label};
  const double pc = clamp_probability(p);
  LossPoint out;
  out.loss = -(label * std::log(pc) + (1.0 - label) * std::log(1.0 - pc));
  out.d_logit = (pc == p) ? p - label : 0.0;
  return out;
}

double joint_loss(std::span<const double> labels, std::span<const double> p_f, std::span<const double> p_c,
                  double alpha_train) {
  return joint_loss(bce(labels, p_f), bce(labels, p_c), alpha_train);
}

void validate(const TrainConfig& c) {
  if (!(c.lr_encoder > 0.0) || !(c.lr_heads > 0.0)) throw ConfigError("learning rates must be > 0");
  if (!(c.alpha_train >= 0.0) || !std::isfinite(c.alpha_train)) throw ConfigError("alpha_train must be >= 0");
  if (!(c.weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (c.batch_size == 0) throw ConfigError("batch size must be positive");
}

namespace {

struct Encoded {
  EncodedPair pair;
  ToyEncoderCache cache;
};

Encoded run_encoder(const Model& model, const EncoderInput& input) {
  Encoded e;
  if (const ToyEncoder* toy = model.toy()) {
    if (input.tokens.empty()) throw ContractError("cannot encode an empty input");
    e.pair = pool(toy->forward(input.tokens, e.cache), input);
  } else {
    e.pair = encode(model.encoder(), input);
  }
  return e;
}

}  // namespace

JointGradients joint_gradients(const Model& model, std::span<const TrainExample> batch, double alpha_train,
                               LossKind kind) {
  JointGradients g{0.0, 0.0, 0.0, std::nullopt, HeadGrads(model.heads)};
  const ToyEncoder* toy = model.toy();
  if (toy) g.encoder = toy->make_grads();
  if (batch.empty()) return g;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t d = model.heads.dim;

  for (const auto& ex : batch) {
    const double label = ex.label;
    const Encoded f = run_encoder(model, ex.inputs.factual);
    const HeadTrace tf = factual_forward(model.heads, f.pair);
    const LossPoint lf = pointwise_loss(kind, label, tf.logit);
    g.loss_f += lf.loss * scale;
    const PooledGrads pf = factual_backward(model.heads, tf, lf.d_logit * scale, g.heads);
    if (toy) toy->backward(f.cache, unpool(pf, ex.inputs.factual, d), *g.encoder);

    const Encoded a = run_encoder(model, ex.inputs.argument_only);
    const HeadTrace ta = argument_forward(model.heads, a.pair);
    const LossPoint lc = pointwise_loss(kind, label, ta.logit);
    g.loss_c += lc.loss * scale;
    if (alpha_train > 0.0) {
      const PooledGrads pa = argument_backward(model.heads, ta, alpha_train * lc.d_logit * scale, g.heads);
      if (toy) toy->backward(a.cache, unpool(pa, ex.inputs.argument_only, d), *g.encoder);
    }
  }
  g.joint = joint_loss(g.loss_f, g.loss_c, alpha_train);
  return g;
}

BiasGradients bias_gradients(const Model& model, std::span<const TrainExample> batch, LossKind kind) {
  BiasGradients g{0.0, HeadGrads(model.heads)};
  if (batch.empty()) return g;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const EncodedPair t = encode(model.encoder(), ex.inputs.trigger_only);
    const HeadTrace tb = bias_forward(model.heads, t);
    const LossPoint lb = pointwise_loss(kind, ex.label, tb.logit);
    g.loss += lb.loss * scale;
    bias_backward(model.heads, tb, lb.d_logit * scale, g.heads);
  }
  return g;
}

namespace {

ParamRef ref(Matrix& v, const Matrix& g, std::size_t group, bool decay = true) { return {v.flat(), g.flat(), group, decay}; }
ParamRef ref(Vector& v, const Vector& g, std::size_t group, bool decay = true) { return {v, g, group, decay}; }
ParamRef ref(double& v, const double& g, std::size_t group) {
  return {std::span<double>(&v, 1), std::span<const double>(&g, 1), group, false};
}

}  // namespace

Trainer::Trainer(Model& model, const TrainConfig& config)
    : model_(model),
      config_(config),
      joint_opt_({{config.lr_encoder, config.weight_decay}, {config.lr_heads, config.weight_decay}}),
      bias_opt_({{config.lr_heads, config.weight_decay}}) {
  validate(config_);
}

JointGradients Trainer::joint_step(std::span<const TrainExample> batch) {
  JointGradients g = joint_gradients(model_, batch, config_.alpha_train, config_.loss_kind);
  if (!std::isfinite(g.joint)) {
    std::ostringstream msg;
    msg << "non-finite training loss (Loss_F=" << g.loss_f << ", Loss_C=" << g.loss_c
        << "); lower the learning rates or check the inputs";
    throw TrainingError(msg.str());
  }
  PairHeads& h = model_.heads;
  std::vector<ParamRef> params;
  if (ToyEncoder* toy = model_.toy()) {
    params.push_back(ref(toy->embeddings(), g.encoder->embeddings, 0));
    for (std::size_t l = 0; l < toy->layers().size(); ++l) {
      ToyLayer& w = toy->layers()[l];
      ToyLayer& d = g.encoder->layers[l];
      params.push_back(ref(w.wq, d.wq, 0));
      params.push_back(ref(w.wk, d.wk, 0));
      params.push_back(ref(w.wv, d.wv, 0));
    }
  }
  params.push_back(ref(h.w, g.heads.w, 1));
  params.push_back(ref(h.w_p, g.heads.w_p, 1));
  params.push_back(ref(h.b_p, g.heads.b_p, 1));
  if (config_.alpha_train > 0.0) {
    params.push_back(ref(h.w_f, g.heads.w_f, 1));
    params.push_back(ref(h.w_arg, g.heads.w_arg, 1));
    params.push_back(ref(h.b_arg, g.heads.b_arg, 1));
    params.push_back(ref(h.phi_e, g.heads.phi_e, 1, false));
  }
  joint_opt_.step(params);
  return g;
}

double Trainer::bias_step(std::span<const TrainExample> batch) {
  BiasGradients g = bias_gradients(model_, batch, config_.loss_kind);
  if (!std::isfinite(g.loss)) throw TrainingError("non-finite bias-head loss");
  PairHeads& h = model_.heads;
  const std::vector<ParamRef> params = {ref(h.w_e, g.heads.w_e, 0), ref(h.b_e, g.heads.b_e, 0),
                                        ref(h.phi_c, g.heads.phi_c, 0, false)};
  bias_opt_.step(params);
  return g.loss;
}

FitResult fit(const Model& init, const std::vector<TrainExample>& train, const TrainConfig& config,
              const DevEvaluator& dev) {
  validate(config);
  FitResult result{init, {}};
  Model model = init;
  Trainer trainer(model, config);
  Rng rng(stable_hash("fit", config.seed));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::optional<double> best_dev;
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.batch_hash = stable_hash("epoch", epoch);
    std::size_t seen = 0;
    std::vector<TrainExample> batch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(train[order[k]]);
        rec.batch_hash = stable_hash(train[order[k]].pair_id, rec.batch_hash);
      }
      const JointGradients g = trainer.joint_step(batch);
      const double n = static_cast<double>(batch.size());
      rec.loss_f += g.loss_f * n;
      rec.loss_c += g.loss_c * n;
      result.history.steps.push_back({step++, g.loss_f, g.loss_c, g.joint});
      if (config.train_bias_head) rec.loss_bias += trainer.bias_step(batch) * n;
      seen += batch.size();
    }
    if (seen > 0) {
      rec.loss_f /= static_cast<double>(seen);
      rec.loss_c /= static_cast<double>(seen);
      rec.loss_bias /= static_cast<double>(seen);
    }
    result.history.batch_hash = stable_hash(std::to_string(rec.batch_hash), result.history.batch_hash);
    if (dev) {
      rec.dev_b_cubed_f1 = dev(model);
      if (!best_dev || *rec.dev_b_cubed_f1 > *best_dev) {
        best_dev = rec.dev_b_cubed_f1;
        result.history.best_epoch = epoch;
        result.model = model;
      }
    } else {
      result.history.best_epoch = epoch;
    }
    result.history.epochs.push_back(rec);
  }
  if (!dev && config.epochs > 0) result.model = std::move(model);
  return result;
}

std::string history_jsonl(const TrainHistory& h) {
  std::ostringstream out;
  for (const auto& e : h.epochs) {
    nlohmann::json j;
    j["epoch"] = e.epoch;
    j["loss_f"] = e.loss_f;
    j["loss_c"] = e.loss_c;
    j["loss_bias"] = e.loss_bias;
    j["dev_b_cubed_f1"] = e.dev_b_cubed_f1 ? nlohmann::json(*e.dev_b_cubed_f1) : nlohmann::json(nullptr);
    j["batch_hash"] = e.batch_hash;
    j["best"] = h.best_epoch && *h.best_epoch == e.epoch;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace acci
