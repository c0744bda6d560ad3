#include "acci/assignment.hpp"

#include <cmath>
#include <limits>

#include "acci/error.hpp"

namespace acci {

Matching max_weight_assignment(const Matrix& weights) {
  const std::size_t rows = weights.rows(), cols = weights.cols();
  Matching out;
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return out;
  for (double w : weights.flat())
    if (!std::isfinite(w)) throw ContractError("assignment weights must be finite");

  // Square minimisation problem on costs -w, padded with zeros. Potentials
  // u, v and the augmenting-path arrays are 1-based.
  const std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? -weights(i, j) : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1, c = j - 1;
    if (i < rows && c < cols) {
      out.row_to_col[i] = static_cast<int>(c);
      out.total += weights(i, c);
    }
  }
  return out;
}

}  // namespace acci
