#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "acci/corpus.hpp"

namespace acci {

// A clustering of mention ids. After normalize() every cluster is sorted and
// clusters are ordered by their first member, so equal partitions compare
// equal regardless of how they were built.
struct Partition {
  std::vector<std::vector<std::string>> clusters;
  // Pair ids whose merges built each cluster, parallel to `clusters`. Empty
  // for partitions that were read from files or derived from gold labels.
  std::vector<std::vector<std::string>> provenance;

  void normalize();
  std::size_t mention_count() const;
  std::vector<std::string> mentions() const;  // sorted
  bool same_clusters(const Partition& other) const;
};

// Disjointness and non-empty clusters; throws ContractError.
void check_partition(const Partition& p);
// Both partitions must cover the same mention ids; throws ContractError.
void check_same_universe(const Partition& gold, const Partition& pred);

Partition gold_partition(const Corpus& corpus);
Partition singleton_partition(const std::vector<std::string>& mentions);

// {"clusters":[[mention_id,...],...]}
void write_partition_json(std::ostream& out, const Partition& p);
Partition read_partition_json(std::istream& in);

// Tab-separated key file:
//   #begin document <name>
//   doc_id  sentence_idx  start  end  mention_id  cluster
//   #end document
// The corpus supplies spans; without one the span columns are "-".
void write_key_file(std::ostream& out, const Partition& p, const Corpus* corpus = nullptr,
                    const std::string& name = "acci");
Partition read_key_file(std::istream& in);

// Reads either format, picking by the first non-blank character.
Partition read_partition(std::istream& in);

}  // namespace acci
