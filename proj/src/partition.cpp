#include "acci/partition.hpp"

#include <algorithm>
#include <istream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "acci/error.hpp"

namespace acci {

void Partition::normalize() {
  if (provenance.size() != clusters.size()) provenance.assign(clusters.size(), {});
  std::vector<std::size_t> order(clusters.size());
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (clusters[a].empty() || clusters[b].empty()) return clusters[a].size() < clusters[b].size();
    return clusters[a].front() < clusters[b].front();
  });
  Partition out;
  for (std::size_t i : order) {
    out.clusters.push_back(std::move(clusters[i]));
    out.provenance.push_back(std::move(provenance[i]));
  }
  *this = std::move(out);
}

std::size_t Partition::mention_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  return n;
}

std::vector<std::string> Partition::mentions() const {
  std::vector<std::string> out;
  out.reserve(mention_count());
  for (const auto& c : clusters) out.insert(out.end(), c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool Partition::same_clusters(const Partition& other) const {
  Partition a{clusters, {}}, b{other.clusters, {}};
  a.normalize();
  b.normalize();
  return a.clusters == b.clusters;
}

void check_partition(const Partition& p) {
  std::set<std::string> seen;
  for (const auto& c : p.clusters) {
    if (c.empty()) throw ContractError("partition contains an empty cluster");
    for (const auto& m : c)
      if (!seen.insert(m).second) throw ContractError("mention " + m + " appears in more than one cluster");
  }
}

void check_same_universe(const Partition& gold, const Partition& pred) {
  check_partition(gold);
  check_partition(pred);
  if (gold.mentions() != pred.mentions())
    throw ContractError("gold and predicted partitions cover different mentions");
}

Partition gold_partition(const Corpus& corpus) {
  std::map<std::string, std::vector<std::string>> by_cluster;
  for (const auto& m : corpus.mentions) by_cluster[m.gold_cluster_id].push_back(m.mention_id);
  Partition p;
  for (auto& [id, members] : by_cluster) p.clusters.push_back(std::move(members));
  p.normalize();
  return p;
}

Partition singleton_partition(const std::vector<std::string>& mentions) {
  Partition p;
  for (const auto& m : mentions) p.clusters.push_back({m});
  p.normalize();
  return p;
}

void write_partition_json(std::ostream& out, const Partition& p) {
  nlohmann::json j;
  j["clusters"] = p.clusters;
  out << j.dump() << '\n';
}

Partition read_partition_json(std::istream& in) {
  Partition p;
  try {
    const auto j = nlohmann::json::parse(in);
    p.clusters = j.at("clusters").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("partition JSON: ") + e.what());
  }
  check_partition(p);
  p.normalize();
  return p;
}

void write_key_file(std::ostream& out, const Partition& p, const Corpus* corpus, const std::string& name) {
  std::map<std::string, const Mention*> by_id;
  if (corpus)
    for (const auto& m : corpus->mentions) by_id[m.mention_id] = &m;
  out << "#begin document " << name << '\n';
  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    for (const auto& id : p.clusters[c]) {
      auto it = by_id.find(id);
      if (it != by_id.end()) {
        const Mention& m = *it->second;
        out << m.doc_id << '\t' << m.sentence_idx << '\t' << m.trigger.start << '\t' << m.trigger.end;
      } else {
        out << "-\t-\t-\t-";
      }
      out << '\t' << id << '\t' << c << '\n';
    }
  }
  out << "#end document\n";
}

Partition read_key_file(std::istream& in) {
  std::map<std::string, std::vector<std::string>> by_cluster;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, '\t');) cols.push_back(col);
    if (cols.size() != 6) throw ParseError(line_no, "key file rows need 6 tab-separated columns");
    by_cluster[cols[5]].push_back(cols[4]);
  }
  Partition p;
  for (auto& [id, members] : by_cluster) p.clusters.push_back(std::move(members));
  check_partition(p);
  p.normalize();
  return p;
}

Partition read_partition(std::istream& in) {
  in >> std::ws;
  if (in.peek() == '{') return read_partition_json(in);
  return read_key_file(in);
}

}  // namespace acci
