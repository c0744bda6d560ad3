#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acci/corpus.hpp"

namespace acci {

struct MentionPair {
  std::string pair_id;
  std::string m1;  // m1 < m2 lexicographically
  std::string m2;
  int gold_label = 0;
  bool lexically_similar_trigger = false;
  friend bool operator==(const MentionPair&, const MentionPair&) = default;
};

// Canonical id of an unordered mention pair; symmetric in its arguments.
std::string make_pair_id(std::string_view a, std::string_view b);

// Maps a trigger token to its lemma. Real corpora can plug in an external
// lemmatizer; the default is lowercase + a built-in table + suffix rules.
using Lemmatizer = std::function<std::string(std::string_view)>;
std::string default_lemma(std::string_view token);
// Built-in synonym-set id for a lemma, if it belongs to one.
std::optional<std::size_t> synonym_set_of(std::string_view lemma);

// Lemma of a (possibly multi-token) trigger: per-token lemmas joined by spaces.
std::string trigger_lemma(const std::vector<std::string>& tokens, const Lemmatizer& lemmatize);

enum class PairScope { topic, subtopic, gold_topic };
PairScope parse_pair_scope(std::string_view s);
std::string_view to_string(PairScope s);

// All unordered pairs within each scope unit, sorted by pair_id.
std::vector<MentionPair> generate_pairs(const Corpus& corpus, PairScope scope,
                                        const Lemmatizer& lemmatize = default_lemma);

enum class FilterMode { lemma_overlap, synonym_set };
FilterMode parse_filter_mode(std::string_view s);
std::string_view to_string(FilterMode m);

struct FilterResult {
  std::vector<MentionPair> pairs;
  std::size_t dropped = 0;
  std::size_t dropped_positives = 0;
};

struct FilterOptions {
  FilterMode mode = FilterMode::lemma_overlap;
  double keep_nonmatch_rate = 0.0;
  std::uint64_t seed = 0;
  // Keep every gold-coreferent pair as well (the "oracle" heuristic variant).
  bool oracle = false;
};

// Keeps trigger-matching pairs plus a seeded, per-pair deterministic fraction
// of the rest. The keep decision depends only on (seed, pair_id), so the
// filter is idempotent.
FilterResult heuristic_filter(const std::vector<MentionPair>& pairs, const Corpus& corpus,
                              const FilterOptions& options, const Lemmatizer& lemmatize = default_lemma);

struct ContingencyTable {
  std::size_t coref_sim = 0;
  std::size_t coref_div = 0;
  std::size_t noncoref_sim = 0;
  std::size_t noncoref_div = 0;
  std::optional<double> phi;
  std::string phi_note;  // why phi is missing, when it is

  std::size_t total() const { return coref_sim + coref_div + noncoref_sim + noncoref_div; }
};

ContingencyTable trigger_match_stats(const std::vector<MentionPair>& pairs);

// JSONL {"pair_id","m1","m2","label","lexsim"}
void write_pairs(std::ostream& out, const std::vector<MentionPair>& pairs);
std::vector<MentionPair> read_pairs(std::istream& in);

}  // namespace acci
