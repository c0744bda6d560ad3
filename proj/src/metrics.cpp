#include "acci/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>
#include <unordered_map>

#include "acci/assignment.hpp"

namespace acci {

namespace {

using ClusterOf = std::unordered_map<std::string, std::size_t>;

ClusterOf index_clusters(const Partition& p) {
  ClusterOf out;
  for (std::size_t c = 0; c < p.clusters.size(); ++c)
    for (const auto& m : p.clusters[c]) out[m] = c;
  return out;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Vilain et al.: links kept of `key` when partitioned by `response`.
double muc_side(const Partition& key, const ClusterOf& response_of, double& den) {
  double num = 0.0;
  den = 0.0;
  for (const auto& k : key.clusters) {
    std::map<std::size_t, int> parts;
    for (const auto& m : k) parts[response_of.at(m)] = 1;
    num += static_cast<double>(k.size() - parts.size());
    den += static_cast<double>(k.size() - 1);
  }
  return num;
}

double links(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

// Moosavi & Strube, with the usual self-link for singleton key clusters.
double lea_side(const Partition& key, const Partition& response, const ClusterOf& response_of, double& den) {
  double num = 0.0;
  den = 0.0;
  for (const auto& k : key.clusters) {
    const double importance = static_cast<double>(k.size());
    den += importance;
    if (k.size() == 1) {
      if (response.clusters[response_of.at(k.front())].size() == 1) num += importance;
      continue;
    }
    std::map<std::size_t, std::size_t> overlap;
    for (const auto& m : k) ++overlap[response_of.at(m)];
    double common = 0.0;
    for (const auto& [r, n] : overlap) common += links(n);
    num += importance * common / links(k.size());
  }
  return num;
}

}  // namespace

Prf make_prf(double precision, double recall) {
  Prf r{precision, recall, 0.0};
  if (precision + recall > 0.0) r.f1 = 2.0 * precision * recall / (precision + recall);
  return r;
}

Prf muc(const Partition& gold, const Partition& pred) {
  check_same_universe(gold, pred);
  double rd = 0.0, pd = 0.0;
  const double rn = muc_side(gold, index_clusters(pred), rd);
  const double pn = muc_side(pred, index_clusters(gold), pd);
  return make_prf(ratio(pn, pd), ratio(rn, rd));
}

Prf b_cubed(const Partition& gold, const Partition& pred) {
  check_same_universe(gold, pred);
  const ClusterOf gold_of = index_clusters(gold);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> overlap;
  for (std::size_t c = 0; c < pred.clusters.size(); ++c)
    for (const auto& m : pred.clusters[c]) ++overlap[{c, gold_of.at(m)}];
  double p = 0.0, r = 0.0;
  for (const auto& [key, n] : overlap) {
    const double shared = static_cast<double>(n);
    p += shared * shared / static_cast<double>(pred.clusters[key.first].size());
    r += shared * shared / static_cast<double>(gold.clusters[key.second].size());
  }
  const double total = static_cast<double>(gold.mention_count());
  return make_prf(ratio(p, total), ratio(r, total));
}

Prf ceaf_e(const Partition& gold, const Partition& pred) {
  check_same_universe(gold, pred);
  const ClusterOf pred_of = index_clusters(pred);
  Matrix sim(gold.clusters.size(), pred.clusters.size());
  for (std::size_t g = 0; g < gold.clusters.size(); ++g) {
    std::map<std::size_t, std::size_t> overlap;
    for (const auto& m : gold.clusters[g]) ++overlap[pred_of.at(m)];
    for (const auto& [r, n] : overlap)
      sim(g, r) = 2.0 * static_cast<double>(n) /
                  static_cast<double>(gold.clusters[g].size() + pred.clusters[r].size());
  }
  const double total = max_weight_assignment(sim).total;
  return make_prf(ratio(total, static_cast<double>(pred.clusters.size())),
                  ratio(total, static_cast<double>(gold.clusters.size())));
}

Prf lea(const Partition& gold, const Partition& pred) {
  check_same_universe(gold, pred);
  double rd = 0.0, pd = 0.0;
  const double rn = lea_side(gold, pred, index_clusters(pred), rd);
  const double pn = lea_side(pred, gold, index_clusters(gold), pd);
  return make_prf(ratio(pn, pd), ratio(rn, rd));
}

double conll(double muc_f1, double b_cubed_f1, double ceaf_e_f1) { return (muc_f1 + b_cubed_f1 + ceaf_e_f1) / 3.0; }

MetricReport evaluate(const Partition& gold, const Partition& pred) {
  MetricReport r;
  r.muc = muc(gold, pred);
  r.b_cubed = b_cubed(gold, pred);
  r.ceaf_e = ceaf_e(gold, pred);
  r.lea = lea(gold, pred);
  r.conll_f1 = conll(r.muc.f1, r.b_cubed.f1, r.ceaf_e.f1);
  return r;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

std::string report_json(const MetricReport& r) {
  auto prf = [](const Prf& p) {
    return nlohmann::json{{"precision", round_to(p.precision, 4)},
                          {"recall", round_to(p.recall, 4)},
                          {"f1", round_to(p.f1, 4)}};
  };
  nlohmann::json j;
  j["muc"] = prf(r.muc);
  j["b_cubed"] = prf(r.b_cubed);
  j["ceaf_e"] = prf(r.ceaf_e);
  j["lea"] = prf(r.lea);
  j["conll_f1"] = round_to(r.conll_f1, 4);
  return j.dump(2);
}

std::string report_table(const MetricReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(8) << "metric" << std::right << std::setw(10) << "P" << std::setw(10) << "R"
      << std::setw(10) << "F1" << '\n';
  auto row = [&](const char* name, const Prf& p) {
    out << std::left << std::setw(8) << name << std::right << std::setw(10) << p.precision << std::setw(10)
        << p.recall << std::setw(10) << p.f1 << '\n';
  };
  row("MUC", r.muc);
  row("B3", r.b_cubed);
  row("CEAFe", r.ceaf_e);
  row("LEA", r.lea);
  out << std::left << std::setw(8) << "CoNLL" << std::right << std::setw(30) << r.conll_f1 << '\n';
  return out.str();
}

}  // namespace acci
