#include "acci/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "acci/error.hpp"
#include "acci/pairgen.hpp"

namespace acci {

std::vector<ScoredPair> filter_likely_pairs(const std::vector<ScoredPair>& scored, double gate) {
  std::vector<ScoredPair> out;
  for (const auto& s : scored)
    if (s.score.y >= gate) out.push_back(s);
  std::sort(out.begin(), out.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score.y != b.score.y) return a.score.y > b.score.y;
    return a.pair_id < b.pair_id;
  });
  return out;
}

LinkMode parse_link_mode(std::string_view s) {
  if (s == "average") return LinkMode::average;
  if (s == "single") return LinkMode::single;
  throw ConfigError("unknown link mode '" + std::string(s) + "' (expected average or single)");
}

std::string_view to_string(LinkMode m) { return m == LinkMode::average ? "average" : "single"; }

Partition cluster(const std::vector<std::string>& mentions, const std::vector<ScoredPair>& likely,
                  const std::vector<ScoredPair>& scored, const ClusterOptions& options) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < mentions.size(); ++i)
    if (!index.emplace(mentions[i], i).second) throw ContractError("duplicate mention " + mentions[i]);
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw ContractError("pair references unknown mention " + id);
    return it->second;
  };

  std::unordered_map<std::string, double> score_of;
  for (const auto& s : scored) score_of[make_pair_id(s.m1, s.m2)] = s.score.y;
  for (const auto& s : likely) score_of.emplace(make_pair_id(s.m1, s.m2), s.score.y);

  std::vector<std::size_t> owner(mentions.size());
  std::vector<std::vector<std::size_t>> members(mentions.size());
  std::vector<std::vector<std::string>> trace(mentions.size());
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    owner[i] = i;
    members[i] = {i};
  }

  for (const auto& pair : likely) {
    const std::size_t a = owner[lookup(pair.m1)], b = owner[lookup(pair.m2)];
    if (a == b) continue;
    double linkage = options.link == LinkMode::average ? 0.0 : -INFINITY;
    for (std::size_t u : members[a]) {
      for (std::size_t v : members[b]) {
        auto it = score_of.find(make_pair_id(mentions[u], mentions[v]));
        if (options.link == LinkMode::average) {
          if (it != score_of.end()) linkage += it->second;
        } else if (it != score_of.end()) {
          linkage = std::max(linkage, it->second);
        }
      }
    }
    if (options.link == LinkMode::average)
      linkage /= static_cast<double>(members[a].size() * members[b].size());
    if (!(linkage > options.tau)) continue;

    const std::size_t keep = std::min(a, b), gone = std::max(a, b);
    for (std::size_t m : members[gone]) owner[m] = keep;
    members[keep].insert(members[keep].end(), members[gone].begin(), members[gone].end());
    members[gone].clear();
    trace[keep].insert(trace[keep].end(), trace[gone].begin(), trace[gone].end());
    trace[keep].push_back(pair.pair_id);
    trace[gone].clear();
  }

  Partition p;
  for (std::size_t c = 0; c < mentions.size(); ++c) {
    if (members[c].empty()) continue;
    std::vector<std::string> ids;
    for (std::size_t m : members[c]) ids.push_back(mentions[m]);
    p.clusters.push_back(std::move(ids));
    p.provenance.push_back(std::move(trace[c]));
  }
  p.normalize();
  return p;
}

Partition cluster_scores(const std::vector<std::string>& mentions, const std::vector<ScoredPair>& scored,
                         const ClusterOptions& options, double gate) {
  return cluster(mentions, filter_likely_pairs(scored, gate), scored, options);
}

std::vector<ThresholdPoint> tp_by_cluster_threshold(const Partition& pred, const Partition& gold,
                                                    const std::vector<std::size_t>& thresholds) {
  check_same_universe(gold, pred);
  std::unordered_map<std::string, std::size_t> gold_of;
  for (std::size_t g = 0; g < gold.clusters.size(); ++g)
    for (const auto& m : gold.clusters[g]) gold_of[m] = g;

  // Correct mentions of every predicted cluster under the majority mapping.
  std::vector<std::pair<std::size_t, std::size_t>> size_and_correct;
  for (const auto& c : pred.clusters) {
    std::map<std::size_t, std::size_t> overlap;
    for (const auto& m : c) ++overlap[gold_of.at(m)];
    std::size_t best = 0;
    for (const auto& [g, n] : overlap) best = std::max(best, n);
    size_and_correct.emplace_back(c.size(), best);
  }

  std::vector<ThresholdPoint> out;
  for (std::size_t k : thresholds) {
    ThresholdPoint pt{k, 0};
    for (const auto& [size, correct] : size_and_correct)
      if (size >= k) pt.true_positives += correct;
    out.push_back(pt);
  }
  return out;
}

}  // namespace acci
