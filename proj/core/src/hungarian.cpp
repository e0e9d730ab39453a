// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "detgeom/assignment.hpp"
#include "detgeom/error.hpp"

namespace detgeom {

namespace {

// Shortest augmenting path with row/column potentials. Requires
// rows <= cols; returns the column matched to each row.
std::vector<std::size_t> solve_rows_le_cols(const CostMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based with a virtual column 0, as in the textbook formulation.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
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

  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<MatchPair> hungarian_assign(const CostMatrix& cost) {
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    for (double x : cost.row(r)) {
      if (!std::isfinite(x)) throw InputError("cost matrix has non-finite entries");
    }
  }
  std::vector<MatchPair> pairs;
  if (cost.rows() == 0 || cost.cols() == 0) return pairs;

  if (cost.rows() <= cost.cols()) {
    const auto cols = solve_rows_le_cols(cost);
    for (std::size_t r = 0; r < cols.size(); ++r) pairs.push_back({r, cols[r]});
  } else {
    const auto rows = solve_rows_le_cols(cost.transposed());
    for (std::size_t c = 0; c < rows.size(); ++c) pairs.push_back({rows[c], c});
    std::sort(pairs.begin(), pairs.end());
  }
  return pairs;
}

double matching_cost(const CostMatrix& cost, std::span<const MatchPair> pairs) {
  double total = 0.0;
  for (const auto& pr : pairs) total += cost(pr.row, pr.col);
  return total;
}

}  // namespace detgeom
