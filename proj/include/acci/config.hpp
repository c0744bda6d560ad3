#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "acci/clustering.hpp"
#include "acci/encoding.hpp"
#include "acci/pairgen.hpp"
#include "acci/training.hpp"

namespace acci {

struct PipelineConfig {
  std::string encoder_backend = "toy";  // toy | external
  std::size_t encoder_dim = ToyEncoder::kDefaultDim;
  std::size_t oov_buckets = ToyEncoder::kDefaultOovBuckets;
  std::size_t encoder_layers = ToyEncoder::kDefaultLayers;
  ContextWindow context = ContextWindow::sentence;
  std::string external_host = "127.0.0.1";
  int external_port = 8080;
  std::string external_path = "/encode";

  std::size_t heads_hidden = 64;

  TrainConfig train;

  // Unset means "same as train.alpha".
  std::optional<double> alpha_infer;
  double beta = 0.25;

  ClusterOptions cluster;
  double gate = kLikelyPairGate;

  PairScope scope = PairScope::gold_topic;
  FilterMode filter_mode = FilterMode::lemma_overlap;
  double keep_nonmatch_rate = 1.0;
  bool oracle_filter = false;
  bool filter_train = true;
  bool filter_eval = false;

  std::uint64_t seed = 13;

  double effective_alpha_infer() const { return alpha_infer.value_or(train.alpha_train); }
};

// Applies one `key = value` setting; throws ConfigError on unknown keys or
// bad values.
void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value);

// Flat `key = value` lines; blank lines and `#` comments are skipped.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path, PipelineConfig base = {});
std::string config_text(const PipelineConfig& c);
void validate(const PipelineConfig& c);

// Documented keys, in the order config_text writes them.
const std::vector<std::string>& config_keys();

// Settings of the shared synthetic experiment (learning rates and sizes
// scaled for the toy encoder).
PipelineConfig synthetic_experiment_config();

}  // namespace acci
