#include "acci/synth.hpp"

#include <array>
#include <cstdio>

#include "acci/error.hpp"
#include "acci/rng.hpp"

namespace acci {

namespace {

const std::vector<std::string> kAgents = {"police", "rebels", "soldiers", "gunman", "protesters", "officials",
                                          "hackers", "militants", "troops", "investors", "regulators", "smugglers"};
const std::vector<std::string> kPatients = {"villagers", "guards", "bank", "convoy", "students", "reporters",
                                            "startup", "embassy", "refinery", "suspects", "hostages", "farmers"};
const std::vector<std::string> kLocations = {"paris", "lagos", "denver", "mumbai", "oslo",
                                             "lima", "cairo", "dublin", "austin", "hanoi"};
const std::vector<std::string> kTimes = {"monday", "tuesday", "wednesday", "thursday", "friday",
                                         "saturday", "sunday", "january", "march", "october"};

std::string vocab_word(const std::vector<std::string>& base, std::size_t i) {
  if (i < base.size()) return base[i];
  return base[i % base.size()] + std::to_string(i / base.size() + 1);
}

std::size_t draw_other(Rng& rng, std::size_t n, std::size_t avoid) {
  // Uniform over [0, n) minus `avoid`; n >= 2.
  std::size_t v = static_cast<std::size_t>(rng.below(n - 1));
  return v >= avoid ? v + 1 : v;
}

std::string pair_tag(std::string_view split, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return std::string(split) + "-" + buf;
}

Corpus generate_split(const ConfoundSpec& spec, Split split, std::size_t n_pairs, double flip_rate, Rng& rng) {
  const auto& triggers = synthetic_trigger_sets();
  Corpus c;
  c.split = split;
  const std::array<std::size_t, 4> slot_sizes = {spec.n_agents, spec.n_patients, spec.n_locations, spec.n_times};

  for (std::size_t i = 0; i < n_pairs; ++i) {
    const bool coref = (i % 2 == 0);
    const bool flipped = flip_rate > 0.0 && rng.bernoulli(flip_rate);
    const double p_match_coref = flipped ? 1.0 - spec.p_confounder : spec.p_confounder;
    const bool lexsim = rng.bernoulli(coref ? p_match_coref : 1.0 - p_match_coref);

    const auto& synonyms = triggers[rng.below(spec.n_event_types)];
    const std::size_t n_syn = spec.synonyms_per_type;
    const std::size_t t1 = rng.below(n_syn);
    const std::size_t t2 = lexsim ? t1 : draw_other(rng, n_syn, t1);

    std::array<std::size_t, 4> e1{}, e2{};
    for (std::size_t s = 0; s < 4; ++s) e1[s] = rng.below(slot_sizes[s]);
    if (coref) {
      for (std::size_t s = 0; s < 4; ++s)
        e2[s] = rng.bernoulli(spec.argument_noise) ? draw_other(rng, slot_sizes[s], e1[s]) : e1[s];
    } else {
      for (std::size_t s = 0; s < 4; ++s)
        e2[s] = rng.bernoulli(spec.argument_overlap) ? e1[s] : draw_other(rng, slot_sizes[s], e1[s]);
      if (e2 == e1) {
        const std::size_t s = rng.below(4);
        e2[s] = draw_other(rng, slot_sizes[s], e1[s]);
      }
    }

    const std::string tag = pair_tag(to_string(split), i);
    const std::string topic = tag;
    auto add = [&](char side, const std::array<std::size_t, 4>& ev, const std::string& trig, const std::string& cluster) {
      Document d;
      d.doc_id = tag + "-" + side;
      d.topic_id = topic;
      d.subtopic_id = topic;
      d.sentences.push_back({vocab_word(kAgents, ev[0]), trig, vocab_word(kPatients, ev[1]), "in",
                             vocab_word(kLocations, ev[2]), "on", vocab_word(kTimes, ev[3])});
      Mention m;
      m.mention_id = d.doc_id + "-m";
      m.doc_id = d.doc_id;
      m.sentence_idx = 0;
      m.trigger = {1, 2};
      m.gold_cluster_id = cluster;
      m.arguments = {{ArgRole::participant, {0, 1}},
                     {ArgRole::participant, {2, 3}},
                     {ArgRole::location, {4, 5}},
                     {ArgRole::time, {6, 7}}};
      c.documents.push_back(std::move(d));
      c.mentions.push_back(std::move(m));
    };
    add('a', e1, synonyms[t1], coref ? tag + "-e" : tag + "-a-e");
    add('b', e2, synonyms[t2], coref ? tag + "-e" : tag + "-b-e");
  }
  return c;
}

}  // namespace

const std::vector<std::vector<std::string>>& synthetic_trigger_sets() {
  static const std::vector<std::vector<std::string>> sets = {
      {"attacked", "assaulted", "raided", "stormed"},
      {"killed", "murdered", "slew", "executed"},
      {"arrested", "detained", "apprehended", "captured"},
      {"injured", "wounded", "hurt", "maimed"},
      {"acquired", "bought", "purchased", "obtained"},
      {"announced", "unveiled", "revealed", "launched"},
  };
  return sets;
}

void validate(const ConfoundSpec& spec) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
  };
  prob(spec.p_confounder, "p_confounder");
  prob(spec.flip_rate_test, "flip_rate_test");
  prob(spec.argument_noise, "argument_noise");
  prob(spec.argument_overlap, "argument_overlap");
  if (spec.n_agents < 2 || spec.n_patients < 2 || spec.n_locations < 2 || spec.n_times < 2)
    throw ConfigError("argument vocabularies need at least 2 entries");
  if (spec.n_event_types < 1 || spec.n_event_types > synthetic_trigger_sets().size())
    throw ConfigError("n_event_types must be in [1, " + std::to_string(synthetic_trigger_sets().size()) + "]");
  if (spec.synonyms_per_type < 2 || spec.synonyms_per_type > synthetic_trigger_sets().front().size())
    throw ConfigError("synonyms_per_type must be in [2, 4]");
}

SyntheticCorpora generate_confounded_corpus(const ConfoundSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng train_rng(stable_hash("train", seed));
  Rng dev_rng(stable_hash("dev", seed));
  Rng test_rng(stable_hash("test", seed));
  SyntheticCorpora out;
  out.train = generate_split(spec, Split::train, spec.n_train, 0.0, train_rng);
  out.dev = generate_split(spec, Split::dev, spec.n_dev, 0.0, dev_rng);
  out.test = generate_split(spec, Split::test, spec.n_test, spec.flip_rate_test, test_rng);
  return out;
}

SyntheticPreset standard_synthetic_preset() {
  SyntheticPreset p;
  p.spec.p_confounder = 0.9;
  p.spec.flip_rate_test = 1.0;
  p.spec.n_train = 5000;
  p.spec.n_dev = 1000;
  p.spec.n_test = 1000;
  p.seed = 7;
  return p;
}

}  // namespace acci
