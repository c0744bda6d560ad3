#pragma once

#include <vector>

#include "acci/tensor.hpp"

namespace acci {

struct Matching {
  std::vector<int> row_to_col;  // -1 when the row stays unmatched
  double total = 0.0;
};

// Exact maximum-weight one-to-one matching on a rectangular weight matrix
// (Hungarian method, O(n^3)). Weights must be finite.
Matching max_weight_assignment(const Matrix& weights);

}  // namespace acci
