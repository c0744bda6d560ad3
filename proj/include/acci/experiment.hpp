#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acci/pipeline.hpp"

namespace acci {

enum class AblationMode { full, no_tbm, no_cae, no_both };
AblationMode parse_ablation_mode(std::string_view s);
std::string_view to_string(AblationMode m);
const std::vector<AblationMode>& all_ablation_modes();

// Inference weights a mode uses: no_tbm drops beta, no_cae drops alpha.
struct ModeSettings {
  double alpha_train = 0.0;
  double alpha_infer = 0.0;
  double beta = 0.0;
};
ModeSettings mode_settings(AblationMode m, const PipelineConfig& config);

// Modes whose training objective is identical share one trained model:
// {full, no_tbm} train with alpha, {no_cae, no_both} without.
bool trains_with_argument_path(AblationMode m);

struct TrainedPair {
  Model with_arguments;     // full, no_tbm
  Model without_arguments;  // no_cae, no_both
  std::optional<TrainHistory> with_history, without_history;
};

// Trains both models from the same initialisation and batch order. Model
// selection uses dev B3 under each model's own inference settings.
TrainedPair train_ablation_models(const Corpus& train, const Corpus& dev, const Corpus& test,
                                  const PipelineConfig& config);

struct AblationRow {
  AblationMode mode = AblationMode::full;
  ModeSettings settings;
  MetricReport report;
  double pairwise_accuracy = 0.0;
  double delta_conll = 0.0;  // versus full
  double delta_accuracy = 0.0;
};

std::vector<AblationRow> run_ablation(const TrainedPair& models, const PairDataset& test, const PipelineConfig& config,
                                      const std::vector<AblationMode>& modes = all_ablation_modes());

struct SweepRow {
  double beta = 0.0;
  double conll_f1 = 0.0;
  double b_cubed_f1 = 0.0;
  double pairwise_accuracy = 0.0;
};

// 0.0, 0.05, ..., 1.0
std::vector<double> default_beta_grid();

// Scores the dataset once, then re-combines and re-clusters per grid point.
std::vector<SweepRow> sweep_beta(const Model& model, const PairDataset& test, const PipelineConfig& config,
                                 const std::vector<double>& grid = default_beta_grid());

struct LossComparison {
  TrainHistory probabilities;
  TrainHistory logits;
};

// Two runs differing only in train.loss.
LossComparison compare_losses(const Model& init, const PairDataset& train, const PipelineConfig& config);

std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_table(const std::vector<AblationRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string loss_csv(const LossComparison& c);

// Content hash of a file, as 16 hex digits.
std::string file_fingerprint(const std::string& path);

struct ExperimentManifest {
  std::string command;
  std::string config;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, fingerprint
  std::vector<std::string> outputs;
  std::string metrics_json;  // "{}" when the command produced none
};

std::string manifest_json(const ExperimentManifest& m);

}  // namespace acci
