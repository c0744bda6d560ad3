#include "acci/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "acci/error.hpp"
#include "acci/rng.hpp"

namespace acci {

AblationMode parse_ablation_mode(std::string_view s) {
  if (s == "full") return AblationMode::full;
  if (s == "no_tbm") return AblationMode::no_tbm;
  if (s == "no_cae") return AblationMode::no_cae;
  if (s == "no_both") return AblationMode::no_both;
  throw ConfigError("unknown ablation mode '" + std::string(s) + "'");
}

std::string_view to_string(AblationMode m) {
  switch (m) {
    case AblationMode::full: return "full";
    case AblationMode::no_tbm: return "no_tbm";
    case AblationMode::no_cae: return "no_cae";
    case AblationMode::no_both: return "no_both";
  }
  return "full";
}

const std::vector<AblationMode>& all_ablation_modes() {
  static const std::vector<AblationMode> modes = {AblationMode::full, AblationMode::no_tbm, AblationMode::no_cae,
                                                  AblationMode::no_both};
  return modes;
}

bool trains_with_argument_path(AblationMode m) { return m == AblationMode::full || m == AblationMode::no_tbm; }

ModeSettings mode_settings(AblationMode m, const PipelineConfig& config) {
  ModeSettings s;
  const bool cae = trains_with_argument_path(m);
  const bool tbm = m == AblationMode::full || m == AblationMode::no_cae;
  s.alpha_train = cae ? config.train.alpha_train : 0.0;
  s.alpha_infer = cae ? config.effective_alpha_infer() : 0.0;
  s.beta = tbm ? config.beta : 0.0;
  return s;
}

TrainedPair train_ablation_models(const Corpus& train, const Corpus& dev, const Corpus& test,
                                  const PipelineConfig& config) {
  const Corpus* corpora[] = {&train, &dev, &test};
  const Model init = make_model(config, corpora);
  const PairDataset train_data = build_dataset(train, config, true);
  const PairDataset dev_data = build_dataset(dev, config, false);

  auto run = [&](AblationMode m) {
    const ModeSettings s = mode_settings(m, config);
    TrainConfig tc = config.train;
    tc.alpha_train = s.alpha_train;
    return fit(init, train_data.examples, tc, make_dev_evaluator(dev_data, s.alpha_infer, s.beta, config.cluster, config.gate));
  };
  FitResult with = run(AblationMode::full);
  FitResult without = run(AblationMode::no_both);
  return {std::move(with.model), std::move(without.model), std::move(with.history), std::move(without.history)};
}

std::vector<AblationRow> run_ablation(const TrainedPair& models, const PairDataset& test, const PipelineConfig& config,
                                      const std::vector<AblationMode>& modes) {
  const std::vector<PairComponents> with = score_dataset(models.with_arguments, test);
  const std::vector<PairComponents> without = score_dataset(models.without_arguments, test);
  std::vector<AblationRow> rows;
  for (AblationMode m : modes) {
    AblationRow row;
    row.mode = m;
    row.settings = mode_settings(m, config);
    const auto& comps = trains_with_argument_path(m) ? with : without;
    const EvalResult e = evaluate_scores(test, combine_scores(test, comps, row.settings.alpha_infer, row.settings.beta),
                                         config.cluster, config.gate);
    row.report = e.report;
    row.pairwise_accuracy = e.pairwise_accuracy;
    rows.push_back(row);
  }
  for (auto& r : rows) {
    for (const auto& f : rows) {
      if (f.mode != AblationMode::full) continue;
      r.delta_conll = r.report.conll_f1 - f.report.conll_f1;
      r.delta_accuracy = r.pairwise_accuracy - f.pairwise_accuracy;
    }
  }
  return rows;
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
  return grid;
}

std::vector<SweepRow> sweep_beta(const Model& model, const PairDataset& test, const PipelineConfig& config,
                                 const std::vector<double>& grid) {
  const std::vector<PairComponents> comps = score_dataset(model, test);
  std::vector<SweepRow> rows;
  for (double beta : grid) {
    const EvalResult e =
        evaluate_scores(test, combine_scores(test, comps, config.effective_alpha_infer(), beta), config.cluster, config.gate);
    rows.push_back({beta, e.report.conll_f1, e.report.b_cubed.f1, e.pairwise_accuracy});
  }
  return rows;
}

LossComparison compare_losses(const Model& init, const PairDataset& train, const PipelineConfig& config) {
  TrainConfig tc = config.train;
  tc.loss_kind = LossKind::bce_probabilities;
  LossComparison c;
  c.probabilities = fit(init, train.examples, tc).history;
  tc.loss_kind = LossKind::bce_logits;
  c.logits = fit(init, train.examples, tc).history;
  return c;
}

namespace {

std::string num(double x, int precision = 6) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << x;
  return out.str();
}

}  // namespace

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "mode,alpha,beta,muc_f1,b_cubed_f1,ceaf_e_f1,lea_f1,conll_f1,pairwise_accuracy,delta_conll,delta_accuracy\n";
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << num(r.settings.alpha_infer, 4) << ',' << num(r.settings.beta, 4) << ','
        << num(r.report.muc.f1) << ',' << num(r.report.b_cubed.f1) << ',' << num(r.report.ceaf_e.f1) << ','
        << num(r.report.lea.f1) << ',' << num(r.report.conll_f1) << ',' << num(r.pairwise_accuracy) << ','
        << num(r.delta_conll) << ',' << num(r.delta_accuracy) << '\n';
  }
  return out.str();
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(9) << "mode" << std::right << std::setw(8) << "MUC" << std::setw(8) << "B3"
      << std::setw(8) << "CEAFe" << std::setw(8) << "LEA" << std::setw(8) << "CoNLL" << std::setw(8) << "dCoNLL"
      << std::setw(8) << "Acc" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(9) << to_string(r.mode) << std::right << std::fixed << std::setprecision(1)
        << std::setw(8) << 100 * r.report.muc.f1 << std::setw(8) << 100 * r.report.b_cubed.f1 << std::setw(8)
        << 100 * r.report.ceaf_e.f1 << std::setw(8) << 100 * r.report.lea.f1 << std::setw(8)
        << 100 * r.report.conll_f1 << std::setw(8) << 100 * r.delta_conll << std::setw(8)
        << 100 * r.pairwise_accuracy << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "beta,conll_f1,b_cubed_f1,pairwise_accuracy\n";
  for (const auto& r : rows)
    out << num(r.beta, 2) << ',' << num(r.conll_f1) << ',' << num(r.b_cubed_f1) << ',' << num(r.pairwise_accuracy) << '\n';
  return out.str();
}

std::string loss_csv(const LossComparison& c) {
  std::ostringstream out;
  out << "step,bce_on_probabilities,bce_on_logits\n";
  const std::size_t n = std::max(c.probabilities.steps.size(), c.logits.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',';
    if (i < c.probabilities.steps.size()) out << num(c.probabilities.steps[i].joint, 8);
    out << ',';
    if (i < c.logits.steps.size()) out << num(c.logits.steps[i].joint, 8);
    out << '\n';
  }
  return out.str();
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(stable_hash(buf.str())));
  return hex;
}

std::string manifest_json(const ExperimentManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [path, hash] : m.inputs) j["inputs"].push_back({{"path", path}, {"fingerprint", hash}});
  j["outputs"] = m.outputs;
  j["metrics"] = nlohmann::json::parse(m.metrics_json.empty() ? "{}" : m.metrics_json);
  return j.dump(2);
}

}  // namespace acci
