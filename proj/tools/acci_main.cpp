// acci: command-line front end for the event coreference pipeline.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "acci/checkpoint.hpp"
#include "acci/clustering.hpp"
#include "acci/config.hpp"
#include "acci/corpus.hpp"
#include "acci/error.hpp"
#include "acci/experiment.hpp"
#include "acci/metrics.hpp"
#include "acci/pairgen.hpp"
#include "acci/partition.hpp"
#include "acci/pipeline.hpp"
#include "acci/plot.hpp"
#include "acci/scm.hpp"
#include "acci/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace acci;

namespace {

struct Globals {
  std::string config_path;
  std::string preset = "default";
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

class Run {
 public:
  Run(const Globals& g, std::string command) : globals_(g), out_(g.out_dir) {
    if (g.preset != "synthetic" && g.preset != "default")
      throw ConfigError("unknown preset '" + g.preset + "' (expected default or synthetic)");
    if (!g.config_path.empty()) add_input(g.config_path);
    rebase(g.preset == "synthetic" ? synthetic_experiment_config() : PipelineConfig{});
    fs::create_directories(out_);
    manifest_.command = std::move(command);
  }

  // Replaces the base settings (e.g. with a checkpoint's) and re-applies the
  // config file, --set overrides and --seed on top.
  void rebase(PipelineConfig base) {
    config_ = std::move(base);
    if (!globals_.config_path.empty()) config_ = load_config(globals_.config_path, config_);
    for (const auto& s : globals_.settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(config_, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    if (globals_.seed) apply_setting(config_, "seed", std::to_string(*globals_.seed));
    validate(config_);
  }

  PipelineConfig& config() { return config_; }

  void add_input(const std::string& path) {
    if (!fs::exists(path)) throw ValidationError("input file not found: " + path);
    manifest_.inputs.emplace_back(path, file_fingerprint(path));
  }

  std::string output(const std::string& name) {
    const std::string p = (out_ / name).string();
    manifest_.outputs.push_back(p);
    return p;
  }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(output(name), std::ios::binary);
    if (!f) throw Error("cannot write " + (out_ / name).string());
    f << text;
  }

  void finish(std::string metrics_json = "{}") {
    manifest_.config = config_text(config_);
    manifest_.seed = config_.seed;
    manifest_.metrics_json = std::move(metrics_json);
    std::ofstream f(out_ / "manifest.json");
    f << manifest_json(manifest_) << '\n';
  }

 private:
  static std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  }

  Globals globals_;
  fs::path out_;
  PipelineConfig config_;
  ExperimentManifest manifest_;
};

Corpus read_corpus_file(Run& run, const std::string& path, Split split) {
  run.add_input(path);
  Corpus c = parse_corpus(fs::path(path), split);
  const auto violations = validate_corpus(c);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << path << ": " << violations.size() << " validation error(s); first: " << violations.front().entity << " ["
        << violations.front().rule << "] " << violations.front().message;
    throw ValidationError(msg.str());
  }
  return c;
}

json stats_json(const CorpusStats& s) {
  return {{"topics", s.topics},   {"documents", s.documents},   {"mentions", s.mentions},
          {"clusters", s.clusters}, {"singletons", s.singletons}};
}

json contingency_json(const ContingencyTable& t) {
  json j = {{"coref_sim", t.coref_sim},
            {"coref_div", t.coref_div},
            {"noncoref_sim", t.noncoref_sim},
            {"noncoref_div", t.noncoref_div}};
  j["phi"] = t.phi ? json(*t.phi) : json(nullptr);
  if (!t.phi) j["phi_note"] = t.phi_note;
  return j;
}

Assignment parse_assignment(const std::vector<std::string>& items) {
  Assignment a;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("expected VAR=value, got '" + s + "'");
    a[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return a;
}

json distribution_json(const Distribution& d) {
  json probs = json::object();
  for (std::size_t i = 0; i < d.labels.size(); ++i) probs[d.labels[i]] = d.probs[i];
  return {{"variable", d.variable}, {"probs", probs}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acci: cross-document event coreference with causal debiasing"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Flat key=value config file");
  app.add_option("--preset", g.preset, "Base settings: default or synthetic");
  app.add_option("--set", g.settings, "Override one config key (key=value); repeatable");
  app.add_option("--seed", g.seed, "Seed for every stochastic step");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and manifest.json");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and write its normalized form");
  std::string ingest_in, ingest_split = "train";
  bool ecb_split = false;
  ingest->add_option("--input", ingest_in, "Corpus JSONL")->required();
  ingest->add_option("--split", ingest_split, "Split label of the corpus");
  ingest->add_flag("--ecb-split", ecb_split, "Also split by the conventional ECB+ topic assignment");

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate the confounded synthetic corpus");
  ConfoundSpec spec = standard_synthetic_preset().spec;
  gen->add_option("--p-confounder", spec.p_confounder);
  gen->add_option("--flip-rate-test", spec.flip_rate_test);
  gen->add_option("--n-train", spec.n_train);
  gen->add_option("--n-dev", spec.n_dev);
  gen->add_option("--n-test", spec.n_test);
  gen->add_option("--argument-noise", spec.argument_noise);
  gen->add_option("--argument-overlap", spec.argument_overlap);

  // pairs
  auto* pairs = app.add_subcommand("pairs", "Generate (and optionally filter) candidate mention pairs");
  std::string pairs_corpus, scope, filter_mode;
  std::optional<double> keep_rate;
  bool do_filter = false, oracle = false;
  pairs->add_option("--corpus", pairs_corpus)->required();
  pairs->add_option("--scope", scope, "topic | subtopic | gold-topic");
  pairs->add_option("--filter-mode", filter_mode, "lemma-overlap | synonym-set");
  pairs->add_option("--keep-nonmatch-rate", keep_rate);
  pairs->add_flag("--filter", do_filter, "Apply the trigger-match heuristic filter");
  pairs->add_flag("--oracle", oracle, "Keep every gold-coreferent pair when filtering");

  // train
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  std::string train_path, dev_path;
  std::vector<std::string> vocab_paths;
  train->add_option("--train", train_path)->required();
  train->add_option("--dev", dev_path, "Dev corpus for best-epoch selection");
  train->add_option("--vocab-corpus", vocab_paths, "Extra corpora whose tokens join the toy vocabulary");

  // predict
  auto* predict = app.add_subcommand("predict", "Score candidate pairs with a checkpoint");
  std::string ckpt_path, predict_corpus;
  std::optional<double> alpha_opt, beta_opt;
  predict->add_option("--checkpoint", ckpt_path)->required();
  predict->add_option("--corpus", predict_corpus)->required();
  predict->add_option("--alpha", alpha_opt, "Inference alpha (defaults to the checkpoint's)");
  predict->add_option("--beta", beta_opt, "Inference beta (defaults to the checkpoint's)");

  // cluster
  auto* clus = app.add_subcommand("cluster", "Cluster scored pairs into a partition");
  std::string scores_path, cluster_corpus;
  clus->add_option("--scores", scores_path)->required();
  clus->add_option("--corpus", cluster_corpus, "Mention universe; defaults to mentions seen in the scores");

  // score
  auto* score = app.add_subcommand("score", "Score a predicted partition against gold");
  std::string gold_path, pred_path;
  score->add_option("--gold", gold_path, "Gold partition (JSON or key file) or corpus JSONL")->required();
  score->add_option("--pred", pred_path, "Predicted partition (JSON or key file)")->required();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Run the four-way ablation");
  std::string ab_train, ab_dev, ab_test, ck_with, ck_without;
  std::vector<std::string> mode_names;
  ablate->add_option("--test", ab_test)->required();
  ablate->add_option("--train", ab_train, "Train corpus (train-in-place)");
  ablate->add_option("--dev", ab_dev, "Dev corpus (train-in-place)");
  ablate->add_option("--with-args", ck_with, "Checkpoint trained with the argument path (full, no_tbm)");
  ablate->add_option("--without-args", ck_without, "Checkpoint trained without it (no_cae, no_both)");
  ablate->add_option("--modes", mode_names, "Subset of full no_tbm no_cae no_both");

  // sweep-beta
  auto* sweep = app.add_subcommand("sweep-beta", "CoNLL and B3 F1 over the beta grid");
  std::string sw_ckpt, sw_corpus;
  sweep->add_option("--checkpoint", sw_ckpt)->required();
  sweep->add_option("--corpus", sw_corpus)->required();

  // compare-losses
  auto* losses = app.add_subcommand("compare-losses", "Train with both loss kinds and record the curves");
  std::string cl_train;
  losses->add_option("--train", cl_train)->required();

  // scm
  auto* scm = app.add_subcommand("scm", "Exact queries on a discrete SCM");
  std::string scm_file, query = "observational", target;
  std::vector<std::string> evidence, do_items, factual, twiddle, adjust;
  bool use_fork = false;
  scm->add_option("--model", scm_file, "SCM definition JSON");
  scm->add_flag("--fork-fixture", use_fork, "Use the built-in fork T -> X, T -> Y");
  scm->add_option("--query", query, "observational | do | counterfactual");
  scm->add_option("--target", target)->required();
  scm->add_option("--given", evidence, "Evidence VAR=value");
  scm->add_option("--do", do_items, "Intervention VAR=value");
  scm->add_option("--adjust", adjust, "Backdoor adjustment set for do queries");
  scm->add_option("--factual", factual, "Factual assignment VAR=value");
  scm->add_option("--twiddle", twiddle, "Counterfactual intervention VAR=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      Run run(g, "ingest");
      run.add_input(ingest_in);
      const Corpus c = parse_corpus(fs::path(ingest_in), parse_split(ingest_split));
      const auto violations = validate_corpus(c);
      json report = {{"stats", stats_json(corpus_stats(c))}, {"violations", json::array()}};
      for (const auto& v : violations)
        report["violations"].push_back({{"entity", v.entity}, {"rule", v.rule}, {"message", v.message}});
      if (violations.empty()) {
        write_corpus(fs::path(run.output("corpus.jsonl")), c);
        if (ecb_split) {
          const SplitCorpora s = split_by_topics(c, ecb_plus_topic_assignment(c));
          for (const Corpus* part : {&s.train, &s.dev, &s.test}) {
            const std::string name(to_string(part->split));
            report["splits"][name] = stats_json(corpus_stats(*part));
            write_corpus(fs::path(run.output(name + ".jsonl")), *part);
          }
        }
      }
      run.write("ingest_report.json", report.dump(2) + "\n");
      std::cout << report.dump(2) << '\n';
      run.finish(report.dump());
      return violations.empty() ? 0 : 2;
    }

    if (*gen) {
      Run run(g, "gen-synth");
      const std::uint64_t seed = g.seed ? *g.seed : standard_synthetic_preset().seed;
      const SyntheticCorpora s = generate_confounded_corpus(spec, seed);
      json report;
      for (const Corpus* part : {&s.train, &s.dev, &s.test}) {
        const std::string name(to_string(part->split));
        write_corpus(fs::path(run.output(name + ".jsonl")), *part);
        report[name] = contingency_json(trigger_match_stats(generate_pairs(*part, PairScope::gold_topic)));
      }
      std::cout << report.dump(2) << '\n';
      run.finish(report.dump());
      return 0;
    }

    if (*pairs) {
      Run run(g, "pairs");
      PipelineConfig& cfg = run.config();
      if (!scope.empty()) cfg.scope = parse_pair_scope(scope);
      if (!filter_mode.empty()) cfg.filter_mode = parse_filter_mode(filter_mode);
      if (keep_rate) apply_setting(cfg, "pairs.keep_nonmatch_rate", std::to_string(*keep_rate));
      const Corpus c = read_corpus_file(run, pairs_corpus, Split::train);
      std::vector<MentionPair> out = generate_pairs(c, cfg.scope);
      json report = {{"generated", out.size()}};
      if (do_filter) {
        const FilterResult f =
            heuristic_filter(out, c, {cfg.filter_mode, cfg.keep_nonmatch_rate, cfg.seed, oracle || cfg.oracle_filter});
        report["dropped"] = f.dropped;
        report["dropped_positives"] = f.dropped_positives;
        out = f.pairs;
      }
      report["kept"] = out.size();
      report["contingency"] = contingency_json(trigger_match_stats(out));
      std::ofstream f(run.output("pairs.jsonl"));
      write_pairs(f, out);
      std::cout << report.dump(2) << '\n';
      run.finish(report.dump());
      return 0;
    }

    if (*train) {
      Run run(g, "train");
      const PipelineConfig& cfg = run.config();
      const Corpus tr = read_corpus_file(run, train_path, Split::train);
      std::optional<Corpus> dv;
      if (!dev_path.empty()) dv = read_corpus_file(run, dev_path, Split::dev);
      std::vector<Corpus> extra;
      for (const auto& p : vocab_paths) extra.push_back(read_corpus_file(run, p, Split::test));
      std::vector<const Corpus*> vocab{&tr};
      if (dv) vocab.push_back(&*dv);
      for (const auto& c : extra) vocab.push_back(&c);

      const Model init = make_model(cfg, vocab);
      const PairDataset data = build_dataset(tr, cfg, true);
      DevEvaluator dev_eval;
      std::optional<PairDataset> dev_data;
      if (dv) {
        dev_data = build_dataset(*dv, cfg, false);
        dev_eval = make_dev_evaluator(*dev_data, cfg.effective_alpha_infer(), cfg.beta, cfg.cluster, cfg.gate);
      }
      const FitResult r = fit(init, data.examples, cfg.train, dev_eval);
      save_checkpoint(run.output("checkpoint.json"), r.model, cfg);
      run.write("train_log.jsonl", history_jsonl(r.history));
      json summary = {{"train_pairs", data.examples.size()}, {"epochs", r.history.epochs.size()}};
      summary["best_epoch"] = r.history.best_epoch ? json(*r.history.best_epoch) : json(nullptr);
      std::cout << summary.dump() << '\n';
      run.finish(summary.dump());
      return 0;
    }

    if (*predict) {
      Run run(g, "predict");
      run.add_input(ckpt_path);
      Checkpoint ck = load_checkpoint(ckpt_path);
      run.rebase(ck.config);
      const PipelineConfig& cfg = run.config();
      const Corpus c = read_corpus_file(run, predict_corpus, Split::test);
      const double alpha = alpha_opt ? *alpha_opt : cfg.effective_alpha_infer();
      const double beta = beta_opt ? *beta_opt : cfg.beta;
      const PairDataset data = build_dataset(c, cfg, false);
      const auto scored = combine_scores(data, score_dataset(ck.model, data), alpha, beta);
      std::ofstream f(run.output("scores.jsonl"));
      write_scores(f, scored);
      const json summary = {{"pairs", scored.size()}, {"alpha", alpha}, {"beta", beta}};
      std::cout << summary.dump() << '\n';
      run.finish(summary.dump());
      return 0;
    }

    if (*clus) {
      Run run(g, "cluster");
      const PipelineConfig& cfg = run.config();
      run.add_input(scores_path);
      std::ifstream sf(scores_path);
      const auto scored = read_scores(sf);
      std::vector<std::string> mentions;
      std::optional<Corpus> c;
      if (!cluster_corpus.empty()) {
        c = read_corpus_file(run, cluster_corpus, Split::test);
        for (const auto& m : c->mentions) mentions.push_back(m.mention_id);
      } else {
        for (const auto& s : scored) {
          mentions.push_back(s.m1);
          mentions.push_back(s.m2);
        }
      }
      std::sort(mentions.begin(), mentions.end());
      mentions.erase(std::unique(mentions.begin(), mentions.end()), mentions.end());
      const Partition p = cluster_scores(mentions, scored, cfg.cluster, cfg.gate);
      {
        std::ofstream f(run.output("partition.json"));
        write_partition_json(f, p);
        std::ofstream k(run.output("partition.key"));
        write_key_file(k, p, c ? &*c : nullptr);
      }
      const json summary = {{"mentions", mentions.size()}, {"clusters", p.clusters.size()}};
      std::cout << summary.dump() << '\n';
      run.finish(summary.dump());
      return 0;
    }

    if (*score) {
      Run run(g, "score");
      run.add_input(gold_path);
      run.add_input(pred_path);
      // A corpus JSONL contributes its gold clusters; anything else is a partition file.
      auto read_any = [](const std::string& path) {
        std::ifstream f(path);
        std::string first;
        while (f && first.find_first_not_of(" \t\r") == std::string::npos) std::getline(f, first);
        const json head = json::parse(first, nullptr, false);
        if (head.is_object() && head.contains("kind")) return gold_partition(parse_corpus(fs::path(path)));
        std::ifstream again(path);
        return read_partition(again);
      };
      const Partition gold = read_any(gold_path);
      const Partition pred = read_any(pred_path);
      const MetricReport r = evaluate(gold, pred);
      run.write("report.json", report_json(r) + "\n");
      run.write("report.txt", report_table(r));
      std::cout << report_table(r);
      run.finish(report_json(r));
      return 0;
    }

    if (*ablate) {
      Run run(g, "ablate");
      const PipelineConfig& cfg = run.config();
      std::vector<AblationMode> modes;
      for (const auto& m : mode_names) modes.push_back(parse_ablation_mode(m));
      if (modes.empty()) modes = all_ablation_modes();
      const Corpus te = read_corpus_file(run, ab_test, Split::test);

      std::optional<TrainedPair> models;
      if (!ck_with.empty() || !ck_without.empty()) {
        if (ck_with.empty() || ck_without.empty())
          throw ValidationError("ablate needs both --with-args and --without-args checkpoints, or --train/--dev");
        run.add_input(ck_with);
        run.add_input(ck_without);
        Checkpoint with = load_checkpoint(ck_with);
        run.rebase(with.config);
        models = TrainedPair{std::move(with.model), load_checkpoint(ck_without).model, {}, {}};
      } else if (!ab_train.empty() && !ab_dev.empty()) {
        const Corpus tr = read_corpus_file(run, ab_train, Split::train);
        const Corpus dv = read_corpus_file(run, ab_dev, Split::dev);
        models = train_ablation_models(tr, dv, te, cfg);
        save_checkpoint(run.output("checkpoint_with_args.json"), models->with_arguments, cfg);
        save_checkpoint(run.output("checkpoint_without_args.json"), models->without_arguments, cfg);
      } else {
        throw ValidationError(
            "ablate needs trained checkpoints (--with-args and --without-args) or corpora to train in place "
            "(--train and --dev)");
      }
      const PairDataset test = build_dataset(te, cfg, false);
      const auto rows = run_ablation(*models, test, cfg, modes);
      run.write("ablation.csv", ablation_csv(rows));
      run.write("ablation.txt", ablation_table(rows));
      std::cout << ablation_table(rows);
      json metrics = json::object();
      for (const auto& r : rows)
        metrics[std::string(to_string(r.mode))] = {{"conll_f1", round_to(r.report.conll_f1, 4)},
                                                   {"pairwise_accuracy", round_to(r.pairwise_accuracy, 4)}};
      run.finish(metrics.dump());
      return 0;
    }

    if (*sweep) {
      Run run(g, "sweep-beta");
      run.add_input(sw_ckpt);
      Checkpoint ck = load_checkpoint(sw_ckpt);
      run.rebase(ck.config);
      const PipelineConfig& cfg = run.config();
      const Corpus c = read_corpus_file(run, sw_corpus, Split::test);
      const PairDataset data = build_dataset(c, cfg, false);
      const auto rows = sweep_beta(ck.model, data, cfg);
      const std::string csv = sweep_csv(rows);
      run.write("sweep_beta.csv", csv);
      run.write("sweep_beta.svg", line_chart_svg(series_from_csv(csv, "beta", {"conll_f1", "b_cubed_f1"}),
                                                 "F1 versus beta", "beta", "F1"));
      std::cout << csv;
      std::size_t best = 0;
      for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].conll_f1 > rows[best].conll_f1) best = i;
      run.finish(json{{"argmax_beta", rows[best].beta}, {"max_conll_f1", round_to(rows[best].conll_f1, 4)}}.dump());
      return 0;
    }

    if (*losses) {
      Run run(g, "compare-losses");
      const PipelineConfig& cfg = run.config();
      const Corpus tr = read_corpus_file(run, cl_train, Split::train);
      const Corpus* vocab[] = {&tr};
      const Model init = make_model(cfg, vocab);
      const PairDataset data = build_dataset(tr, cfg, true);
      const LossComparison cmp = compare_losses(init, data, cfg);
      const std::string csv = loss_csv(cmp);
      run.write("losses.csv", csv);
      run.write("losses.svg", line_chart_svg(series_from_csv(csv, "step", {"bce_on_probabilities", "bce_on_logits"}),
                                             "Training loss", "step", "joint loss"));
      auto last = [](const TrainHistory& h) {
        const EpochRecord& e = h.epochs.back();
        return json{{"loss_f", e.loss_f}, {"loss_c", e.loss_c}};
      };
      const json summary = {{"same_batches", cmp.probabilities.batch_hash == cmp.logits.batch_hash},
                            {"step0_probabilities", cmp.probabilities.steps.front().joint},
                            {"step0_logits", cmp.logits.steps.front().joint},
                            {"final_epoch_probabilities", last(cmp.probabilities)},
                            {"final_epoch_logits", last(cmp.logits)}};
      std::cout << summary.dump(2) << '\n';
      run.finish(summary.dump());
      return 0;
    }

    if (*scm) {
      Run run(g, "scm");
      if (use_fork == !scm_file.empty()) throw ValidationError("scm needs exactly one of --model or --fork-fixture");
      DiscreteSCM model;
      if (use_fork) {
        model = fork_fixture();
      } else {
        run.add_input(scm_file);
        model = DiscreteSCM::load(scm_file);
      }
      json result;
      if (query == "observational") {
        result = distribution_json(observational(model, target, parse_assignment(evidence)));
      } else if (query == "do") {
        const Assignment a = parse_assignment(do_items);
        result = distribution_json(interventional(model, target, a));
        if (!adjust.empty()) {
          std::vector<std::string> treatments;
          for (const auto& [k, v] : a) treatments.push_back(k);
          const bool valid = satisfies_backdoor(model, treatments, target, adjust);
          result["adjustment_valid"] = valid;
          if (valid) result["backdoor"] = distribution_json(interventional_backdoor(model, target, a, adjust));
        }
      } else if (query == "counterfactual") {
        result = distribution_json(counterfactual(model, target, parse_assignment(factual), parse_assignment(twiddle)));
      } else {
        throw ValidationError("unknown query '" + query + "' (expected observational, do or counterfactual)");
      }
      run.write("scm_result.json", result.dump(2) + "\n");
      std::cout << result.dump(2) << '\n';
      run.finish(result.dump());
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
