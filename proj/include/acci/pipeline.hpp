#pragma once

#include <span>
#include <string>
#include <vector>

#include "acci/config.hpp"
#include "acci/metrics.hpp"
#include "acci/partition.hpp"
#include "acci/training.hpp"

namespace acci {

// Candidate pairs of one corpus with their prepared encoder inputs.
struct PairDataset {
  std::vector<MentionPair> pairs;
  std::vector<TrainExample> examples;  // parallel to pairs
  std::vector<std::string> mentions;   // every mention id of the corpus, sorted
  Partition gold;
  FilterResult filter;  // what the heuristic filter dropped, if it ran
};

// `training` selects pairs.filter_train over pairs.filter_eval.
PairDataset build_dataset(const Corpus& corpus, const PipelineConfig& config, bool training,
                          const Lemmatizer& lemmatize = default_lemma);

// Fresh model: toy encoder over the vocabulary of `corpora`, or the external
// backend from the config, and heads seeded from config.seed.
Model make_model(const PipelineConfig& config, std::span<const Corpus* const> corpora);

std::vector<PairComponents> score_dataset(const Model& model, const PairDataset& data);

std::vector<ScoredPair> combine_scores(const PairDataset& data, const std::vector<PairComponents>& components,
                                       double alpha_infer, double beta);

struct EvalResult {
  MetricReport report;
  double pairwise_accuracy = 0.0;
  Partition predicted;
};

EvalResult evaluate_scores(const PairDataset& data, const std::vector<ScoredPair>& scored,
                           const ClusterOptions& cluster, double gate = kLikelyPairGate);

// Dev B3 F1 under the given inference settings; used for model selection.
DevEvaluator make_dev_evaluator(const PairDataset& dev, double alpha_infer, double beta,
                                const ClusterOptions& cluster, double gate = kLikelyPairGate);

}  // namespace acci
