#include "acci/pipeline.hpp"

#include <algorithm>

#include "acci/error.hpp"
#include "acci/rng.hpp"

namespace acci {

PairDataset build_dataset(const Corpus& corpus, const PipelineConfig& config, bool training,
                          const Lemmatizer& lemmatize) {
  PairDataset data;
  data.pairs = generate_pairs(corpus, config.scope, lemmatize);
  if (training ? config.filter_train : config.filter_eval) {
    FilterOptions opts;
    opts.mode = config.filter_mode;
    opts.keep_nonmatch_rate = config.keep_nonmatch_rate;
    opts.seed = config.seed;
    opts.oracle = config.oracle_filter;
    data.filter = heuristic_filter(data.pairs, corpus, opts, lemmatize);
    data.pairs = data.filter.pairs;
  }

  const CorpusIndex index(corpus);
  data.examples.reserve(data.pairs.size());
  for (const auto& p : data.pairs) {
    const MentionContext a = mention_context(index, *index.find_mention(p.m1), config.context);
    const MentionContext b = mention_context(index, *index.find_mention(p.m2), config.context);
    data.examples.push_back({p.pair_id, build_pair_inputs(a, b), p.gold_label});
  }
  for (const auto& m : corpus.mentions) data.mentions.push_back(m.mention_id);
  std::sort(data.mentions.begin(), data.mentions.end());
  data.gold = gold_partition(corpus);
  return data;
}

Model make_model(const PipelineConfig& config, std::span<const Corpus* const> corpora) {
  validate(config);
  std::unique_ptr<EncoderBackend> encoder;
  if (config.encoder_backend == "toy") {
    encoder = std::make_unique<ToyEncoder>(ToyEncoder::build_vocabulary(corpora), config.encoder_dim,
                                           stable_hash("encoder", config.seed), config.oov_buckets,
                                           config.encoder_layers);
  } else {
    encoder = std::make_unique<ExternalEncoder>(
        config.encoder_dim, http_transport(config.external_host, config.external_port, config.external_path));
  }
  return Model(std::move(encoder), PairHeads::init(config.encoder_dim, config.heads_hidden, stable_hash("heads", config.seed)),
               config.context);
}

std::vector<PairComponents> score_dataset(const Model& model, const PairDataset& data) {
  std::vector<PairComponents> out;
  out.reserve(data.examples.size());
  for (const auto& ex : data.examples) out.push_back(score_components(model, ex.inputs));
  return out;
}

std::vector<ScoredPair> combine_scores(const PairDataset& data, const std::vector<PairComponents>& components,
                                       double alpha_infer, double beta) {
  if (components.size() != data.pairs.size()) throw ContractError("one score per pair is required");
  std::vector<ScoredPair> out;
  out.reserve(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& p = data.pairs[i];
    out.push_back({p.pair_id, p.m1, p.m2, debiased_combine(components[i], alpha_infer, beta)});
  }
  return out;
}

EvalResult evaluate_scores(const PairDataset& data, const std::vector<ScoredPair>& scored,
                           const ClusterOptions& cluster, double gate) {
  if (scored.size() != data.pairs.size()) throw ContractError("one score per pair is required");
  EvalResult r;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scored.size(); ++i)
    if (scored[i].score.decision == (data.pairs[i].gold_label == 1)) ++correct;
  r.pairwise_accuracy = scored.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(scored.size());
  r.predicted = cluster_scores(data.mentions, scored, cluster, gate);
  r.report = evaluate(data.gold, r.predicted);
  return r;
}

DevEvaluator make_dev_evaluator(const PairDataset& dev, double alpha_infer, double beta,
                                const ClusterOptions& cluster, double gate) {
  return [&dev, alpha_infer, beta, cluster, gate](const Model& model) {
    const auto scored = combine_scores(dev, score_dataset(model, dev), alpha_infer, beta);
    return evaluate_scores(dev, scored, cluster, gate).report.b_cubed.f1;
  };
}

}  // namespace acci
