#pragma once

#include <string>
#include <vector>

#include "acci/partition.hpp"
#include "acci/scoring.hpp"

namespace acci {

inline constexpr double kLikelyPairGate = 0.5;

// Pairs with score.y >= gate, highest score first, ties by pair_id.
std::vector<ScoredPair> filter_likely_pairs(const std::vector<ScoredPair>& scored, double gate = kLikelyPairGate);

enum class LinkMode { average, single };
LinkMode parse_link_mode(std::string_view s);
std::string_view to_string(LinkMode m);

struct ClusterOptions {
  double tau = 0.5;
  LinkMode link = LinkMode::average;
};

// Starts from singletons and walks `likely` in order. When a pair's mentions
// sit in different clusters, the clusters merge iff their linkage score
// exceeds tau. Linkage reads every pair in `scored`, including pairs below
// the gate; cross pairs that were never scored count as 0 for the average.
Partition cluster(const std::vector<std::string>& mentions, const std::vector<ScoredPair>& likely,
                  const std::vector<ScoredPair>& scored, const ClusterOptions& options);

// filter_likely_pairs followed by cluster.
Partition cluster_scores(const std::vector<std::string>& mentions, const std::vector<ScoredPair>& scored,
                         const ClusterOptions& options, double gate = kLikelyPairGate);

struct ThresholdPoint {
  std::size_t threshold = 0;
  std::size_t true_positives = 0;
};

// For each size threshold k: mentions in predicted clusters of size >= k that
// also belong to the gold cluster overlapping that cluster most.
std::vector<ThresholdPoint> tp_by_cluster_threshold(const Partition& pred, const Partition& gold,
                                                    const std::vector<std::size_t>& thresholds);

}  // namespace acci
