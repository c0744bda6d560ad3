#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include "acci/clustering.hpp"
#include "acci/error.hpp"
#include "acci/pairgen.hpp"

using namespace acci;

namespace {

using Clusters = std::vector<std::vector<std::string>>;

ScoredPair sp(const std::string& a, const std::string& b, double y) {
  ScoredPair s;
  s.pair_id = make_pair_id(a, b);
  s.m1 = std::min(a, b);
  s.m2 = std::max(a, b);
  s.score.p_f = std::clamp(y, 0.0, 1.0);
  s.score.y = y;
  s.score.decision = y >= kDecisionThreshold;
  return s;
}

Clusters run(const std::vector<std::string>& mentions, const std::vector<ScoredPair>& scored, double tau,
             LinkMode link) {
  return cluster_scores(mentions, scored, {tau, link}).clusters;
}

}  // namespace

TEST_CASE("gate keeps confident pairs, best first") {
  const auto likely = filter_likely_pairs({sp("a", "b", 0.6), sp("a", "c", 0.1), sp("b", "c", 0.9), sp("c", "d", 0.5)});
  REQUIRE(likely.size() == 3);
  CHECK(likely[0].score.y == 0.9);
  CHECK(likely[1].score.y == 0.6);
  CHECK(likely[2].score.y == 0.5);
}

TEST_CASE("average and single linkage traces") {
  const std::vector<std::string> m = {"a", "b", "c"};
  const std::vector<ScoredPair> s = {sp("a", "b", 0.9), sp("b", "c", 0.6), sp("a", "c", 0.1)};
  // {a,b} vs {c}: mean(0.1, 0.6) = 0.35
  CHECK(run(m, s, 0.5, LinkMode::average) == Clusters{{"a", "b"}, {"c"}});
  CHECK(run(m, s, 0.3, LinkMode::average) == Clusters{{"a", "b", "c"}});
  // max(0.1, 0.6) = 0.6
  CHECK(run(m, s, 0.5, LinkMode::single) == Clusters{{"a", "b", "c"}});
}

TEST_CASE("unscored cross pairs count as zero") {
  const std::vector<std::string> m = {"a", "b", "c"};
  const std::vector<ScoredPair> s = {sp("a", "b", 0.9), sp("b", "c", 0.8)};
  // {a,b} vs {c}: (0 + 0.8) / 2 = 0.4
  CHECK(run(m, s, 0.5, LinkMode::average) == Clusters{{"a", "b"}, {"c"}});
  CHECK(run(m, s, 0.35, LinkMode::average) == Clusters{{"a", "b", "c"}});
}

TEST_CASE("tau at minus infinity gives connected components of the gated graph") {
  const std::vector<std::string> m = {"a", "b", "c", "d", "e"};
  const std::vector<ScoredPair> s = {sp("a", "b", 0.9), sp("c", "d", 0.6), sp("a", "c", 0.4), sp("d", "e", 0.55)};
  const double lo = -std::numeric_limits<double>::infinity();
  CHECK(run(m, s, lo, LinkMode::average) == Clusters{{"a", "b"}, {"c", "d", "e"}});
  CHECK(run(m, s, lo, LinkMode::single) == Clusters{{"a", "b"}, {"c", "d", "e"}});
}

TEST_CASE("every mention appears exactly once") {
  const std::vector<std::string> m = {"x", "a", "q"};
  const Partition p = cluster_scores(m, {}, {});
  CHECK(p.clusters == Clusters{{"a"}, {"q"}, {"x"}});
  CHECK_THROWS_AS(cluster_scores({"a", "a"}, {}, {}), ContractError);
  CHECK_THROWS_AS(cluster_scores({"a"}, {sp("a", "z", 0.9)}, {}), ContractError);
  CHECK_THROWS_AS(parse_link_mode("complete"), ConfigError);
}

TEST_CASE("provenance records the merging pairs") {
  const Partition p = cluster_scores({"a", "b", "c"}, {sp("a", "b", 0.9)}, {});
  REQUIRE(p.provenance.size() == p.clusters.size());
  CHECK(p.provenance[0] == std::vector<std::string>{make_pair_id("a", "b")});
  CHECK(p.provenance[1].empty());
}

TEST_CASE("single linkage does not depend on input order") {
  std::mt19937_64 rng(5);
  std::vector<std::string> m;
  for (int i = 0; i < 8; ++i) m.push_back("m" + std::to_string(i));
  std::vector<ScoredPair> s;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) s.push_back(sp(m[i], m[j], std::round(u(rng) * 1000) / 1000));
  const Clusters base = run(m, s, 0.7, LinkMode::single);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(s.begin(), s.end(), rng);
    std::shuffle(m.begin(), m.end(), rng);
    CHECK(run(m, s, 0.7, LinkMode::single) == base);
  }
}

TEST_CASE("true positives by cluster-size threshold") {
  Partition pred{{{"a", "b", "c"}, {"d", "e"}, {"f"}}, {}};
  Partition gold{{{"a", "b"}, {"c", "d", "e"}, {"f"}}, {}};
  const auto pts = tp_by_cluster_threshold(pred, gold, {1, 2, 3, 4});
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].true_positives == 5);
  CHECK(pts[1].true_positives == 4);
  CHECK(pts[2].true_positives == 2);
  CHECK(pts[3].true_positives == 0);
}

TEST_CASE("partition files") {
  Partition p{{{"b", "a"}, {"c"}}, {}};
  p.normalize();
  CHECK(p.clusters == Clusters{{"a", "b"}, {"c"}});
  std::ostringstream json, key;
  write_partition_json(json, p);
  write_key_file(key, p);
  std::istringstream jin(json.str()), kin(key.str());
  CHECK(read_partition(jin).same_clusters(p));
  CHECK(read_partition(kin).same_clusters(p));
  std::istringstream bad("#begin document x\nonly\ttwo\n");
  CHECK_THROWS_AS(read_key_file(bad), ParseError);
  CHECK_THROWS_AS(check_partition(Partition{{{"a"}, {"a"}}, {}}), ContractError);
}
