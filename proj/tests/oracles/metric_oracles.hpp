#pragma once
// Brute-force coreference metrics straight from their published definitions,
// computed on label vectors without any library code.

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "partitions.hpp"

namespace oracle {

struct Prf {
  double p = 0.0, r = 0.0, f = 0.0;
};

inline Prf prf(double p, double r) { return {p, r, p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0}; }

// MUC recall side: sum over key blocks of (|k| - number of response blocks
// touching k) over sum of (|k| - 1).
inline std::pair<double, double> muc_side(const Labels& key, const Labels& response) {
  double num = 0.0, den = 0.0;
  for (const auto& k : blocks_of(key)) {
    std::set<int> touched;
    for (int m : k) touched.insert(response[m]);
    num += static_cast<double>(k.size()) - static_cast<double>(touched.size());
    den += static_cast<double>(k.size()) - 1.0;
  }
  return {num, den};
}

inline Prf muc(const Labels& gold, const Labels& pred) {
  const auto [rn, rd] = muc_side(gold, pred);
  const auto [pn, pd] = muc_side(pred, gold);
  return prf(pd > 0 ? pn / pd : 0.0, rd > 0 ? rn / rd : 0.0);
}

// B3 by a per-mention double loop over all mentions.
inline Prf b_cubed(const Labels& gold, const Labels& pred) {
  const std::size_t n = gold.size();
  if (n == 0) return {};
  double p = 0.0, r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double both = 0.0, in_pred = 0.0, in_gold = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool sp = pred[j] == pred[i];
      const bool sg = gold[j] == gold[i];
      in_pred += sp;
      in_gold += sg;
      both += sp && sg;
    }
    p += both / in_pred;
    r += both / in_gold;
  }
  return prf(p / n, r / n);
}

inline double phi4(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t common = 0;
  for (int x : a) common += std::count(b.begin(), b.end(), x);
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

// Best one-to-one alignment by trying every injection of the smaller block
// list into the larger one.
inline double best_alignment(const std::vector<std::vector<int>>& g, const std::vector<std::vector<int>>& p) {
  const bool swap = g.size() > p.size();
  const auto& small = swap ? p : g;
  const auto& large = swap ? g : p;
  std::vector<bool> used(large.size(), false);
  double best = 0.0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
    if (i == small.size()) {
      best = std::max(best, acc);
      return;
    }
    for (std::size_t j = 0; j < large.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      rec(i + 1, acc + phi4(small[i], large[j]));
      used[j] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

inline Prf ceaf_e(const Labels& gold, const Labels& pred) {
  const auto g = blocks_of(gold);
  const auto p = blocks_of(pred);
  if (g.empty() || p.empty()) return {};
  const double total = best_alignment(g, p);
  return prf(total / p.size(), total / g.size());
}

// LEA with explicit link sets. A block of size >= 2 owns all its unordered
// pairs; a singleton owns one self-link.
inline std::set<std::pair<int, int>> links_of(const std::vector<int>& block) {
  std::set<std::pair<int, int>> s;
  if (block.size() == 1) {
    s.insert({block[0], block[0]});
    return s;
  }
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = i + 1; j < block.size(); ++j) s.insert({block[i], block[j]});
  return s;
}

inline std::pair<double, double> lea_side(const Labels& key, const Labels& response) {
  std::set<std::pair<int, int>> response_links;
  for (const auto& b : blocks_of(response)) {
    const auto l = links_of(b);
    response_links.insert(l.begin(), l.end());
  }
  double num = 0.0, den = 0.0;
  for (const auto& k : blocks_of(key)) {
    const auto l = links_of(k);
    double hit = 0.0;
    for (const auto& link : l) hit += response_links.count(link);
    num += static_cast<double>(k.size()) * hit / static_cast<double>(l.size());
    den += static_cast<double>(k.size());
  }
  return {num, den};
}

inline Prf lea(const Labels& gold, const Labels& pred) {
  const auto [rn, rd] = lea_side(gold, pred);
  const auto [pn, pd] = lea_side(pred, gold);
  return prf(pd > 0 ? pn / pd : 0.0, rd > 0 ? rn / rd : 0.0);
}

}  // namespace oracle
