#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acci/corpus.hpp"

namespace acci {

// Controls for the synthetic confounded corpus. Every topic holds exactly one
// candidate pair (two single-sentence documents), so pair-level statistics are
// set directly by these knobs.
struct ConfoundSpec {
  // P(trigger lexemes match | coreferent); P(match | not coreferent) is the
  // complement, so on balanced data the phi coefficient is 2p - 1.
  double p_confounder = 0.9;
  // Fraction of test pairs drawn with the trigger/label association inverted.
  double flip_rate_test = 1.0;
  std::size_t n_train = 5000;
  std::size_t n_dev = 1000;
  std::size_t n_test = 1000;

  std::size_t n_agents = 12;
  std::size_t n_patients = 12;
  std::size_t n_locations = 10;
  std::size_t n_times = 10;
  std::size_t n_event_types = 6;
  std::size_t synonyms_per_type = 4;

  // Coreferent pairs: chance each argument slot of the second mention is
  // reported differently.
  double argument_noise = 0.1;
  // Non-coreferent pairs: chance each argument slot is shared with the first
  // event (at least one slot always differs).
  double argument_overlap = 0.25;
};

void validate(const ConfoundSpec& spec);

struct SyntheticCorpora {
  Corpus train;
  Corpus dev;
  Corpus test;
};

SyntheticCorpora generate_confounded_corpus(const ConfoundSpec& spec, std::uint64_t seed);

// The shared fixture for directional experiments: p_confounder 0.9, full test
// flip, 5000/1000/1000 pairs, seed 7.
struct SyntheticPreset {
  ConfoundSpec spec;
  std::uint64_t seed = 7;
};
SyntheticPreset standard_synthetic_preset();

// Trigger surface forms of one synthetic event type (past tense).
const std::vector<std::vector<std::string>>& synthetic_trigger_sets();

}  // namespace acci
