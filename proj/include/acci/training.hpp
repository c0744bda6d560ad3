#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acci/encoding.hpp"
#include "acci/optim.hpp"
#include "acci/scoring.hpp"

namespace acci {

// Encoder plus heads. Copies are deep, so a copy is a frozen snapshot.
class Model {
 public:
  Model(std::unique_ptr<EncoderBackend> encoder, PairHeads heads, ContextWindow window = ContextWindow::sentence);
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const EncoderBackend& encoder() const { return *encoder_; }
  EncoderBackend& encoder() { return *encoder_; }
  // nullptr unless the backend is the trainable toy encoder.
  ToyEncoder* toy();
  const ToyEncoder* toy() const;

  PairHeads heads;
  ContextWindow window = ContextWindow::sentence;

 private:
  std::unique_ptr<EncoderBackend> encoder_;
};

PairComponents score_components(const Model& model, const PairInputs& inputs);

enum class LossKind { bce_probabilities, bce_logits };
LossKind parse_loss_kind(std::string_view s);
std::string_view to_string(LossKind k);

inline constexpr double kProbabilityClamp = 1e-7;

// Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7].
double bce(std::span<const double> y_true, std::span<const double> y_pred);
// The same objective evaluated from logits with the stable softplus form.
double bce_with_logits(std::span<const double> y_true, std::span<const double> logits);

// Loss of one example and its derivative with respect to the logit.
struct LossPoint {
  double loss = 0.0;
  double d_logit = 0.0;
};
LossPoint pointwise_loss(LossKind kind, double label, double logit);

inline double joint_loss(double loss_f, double loss_c, double alpha_train) { return loss_f + alpha_train * loss_c; }
double joint_loss(std::span<const double> labels, std::span<const double> p_f, std::span<const double> p_c,
                  double alpha_train);

struct TrainConfig {
  double lr_encoder = 1e-5;
  double lr_heads = 1e-4;
  double weight_decay = 0.01;
  double alpha_train = 0.3;
  std::size_t batch_size = 16;
  std::size_t epochs = 3;
  std::uint64_t seed = 13;
  LossKind loss_kind = LossKind::bce_probabilities;
  bool train_bias_head = true;
};

void validate(const TrainConfig& c);

struct TrainExample {
  std::string pair_id;
  PairInputs inputs;
  int label = 0;
};

struct JointGradients {
  double loss_f = 0.0;  // batch means
  double loss_c = 0.0;
  double joint = 0.0;
  std::optional<ToyEncoderGrads> encoder;
  HeadGrads heads;
};

// Loss_F + alpha * Loss_C over a batch and its gradient. The bias head is
// not touched.
JointGradients joint_gradients(const Model& model, std::span<const TrainExample> batch, double alpha_train,
                               LossKind kind);

// Gradient of the bias objective: only w_e, b_e and phi_c are filled in.
struct BiasGradients {
  double loss = 0.0;
  HeadGrads heads;
};
BiasGradients bias_gradients(const Model& model, std::span<const TrainExample> batch, LossKind kind);

// Stateful optimisation of one model: a joint optimizer over the encoder and
// the factual/argument heads, and a separate one over the bias head.
class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& config);

  // One joint update; returns the batch gradients' losses.
  JointGradients joint_step(std::span<const TrainExample> batch);
  // One update of w_e, b_e, phi_c with the encoder used forward-only.
  double bias_step(std::span<const TrainExample> batch);

 private:
  Model& model_;
  TrainConfig config_;
  AdamW joint_opt_;
  AdamW bias_opt_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss_f = 0.0;
  double loss_c = 0.0;
  double loss_bias = 0.0;
  std::optional<double> dev_b_cubed_f1;
  std::uint64_t batch_hash = 0;
};

struct StepRecord {
  std::size_t step = 0;
  double loss_f = 0.0;
  double loss_c = 0.0;
  double joint = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<StepRecord> steps;
  std::optional<std::size_t> best_epoch;
  std::uint64_t batch_hash = 0;  // over the whole batch sequence
};

// Returns the dev B3 F1 of a model snapshot.
using DevEvaluator = std::function<double(const Model&)>;

struct FitResult {
  Model model;
  TrainHistory history;
};

// Trains a copy of `init`. With a dev evaluator the returned model is the
// epoch snapshot with the best dev B3 F1 (earliest on ties); otherwise the
// last epoch.
FitResult fit(const Model& init, const std::vector<TrainExample>& train, const TrainConfig& config,
              const DevEvaluator& dev = {});

// JSONL, one record per epoch.
std::string history_jsonl(const TrainHistory& h);

}  // namespace acci
