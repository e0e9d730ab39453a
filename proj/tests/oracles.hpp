// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used by the tests. Nothing here calls
// into the code path it is used to check.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace detgeom::oracle {

struct Rect {
  double x1, y1, x2, y2;
};

/// Intersection area by counting pixel centers of an n x n grid over
/// [lo, hi]^2 that fall inside both rectangles.
inline double pixel_intersection(const Rect& a, const Rect& b, int n = 1000,
                                 double lo = 0.0, double hi = 1.0) {
  const double step = (hi - lo) / n;
  // Row and column membership are independent for rectangles, but count the
  // full grid anyway so the oracle is plain enumeration.
  long hits = 0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = lo + (iy + 0.5) * step;
    const bool in_y = y >= a.y1 && y <= a.y2 && y >= b.y1 && y <= b.y2;
    if (!in_y) continue;
    for (int ix = 0; ix < n; ++ix) {
      const double x = lo + (ix + 0.5) * step;
      if (x >= a.x1 && x <= a.x2 && x >= b.x1 && x <= b.x2) ++hits;
    }
  }
  return static_cast<double>(hits) * step * step;
}

/// Minimum total of a one-to-one matching of min(rows, cols) pairs by
/// enumerating permutations.
inline double brute_force_min_matching(const std::vector<std::vector<double>>& c) {
  const std::size_t rows = c.size();
  const std::size_t cols = rows ? c[0].size() : 0;
  const bool transpose = rows > cols;
  const std::size_t r = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  auto at = [&](std::size_t i, std::size_t j) {
    return transpose ? c[j][i] : c[i][j];
  };
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i) total += at(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Central finite-difference gradient of f at x.
inline std::array<double, 4> central_difference(
    const std::function<double(const std::array<double, 4>&)>& f,
    const std::array<double, 4>& x, double h = 1e-6) {
  std::array<double, 4> g{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto plus = x;
    auto minus = x;
    plus[i] += h;
    minus[i] -= h;
    g[i] = (f(plus) - f(minus)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const std::array<double, 4>& analytic,
                             const std::array<double, 4>& numeric) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    scale += numeric[i] * numeric[i];
  }
  diff = std::sqrt(diff);
  scale = std::sqrt(scale);
  if (scale < 1e-12) return diff;
  return diff / scale;
}

/// Dynamic k written out directly from the schedule definition:
/// q = floor(n - 0.5 (N - t)) clamped to [1, len];
/// k = floor(sum of q largest) clamped to [1, len].
inline int hand_dynamic_k(std::vector<double> ious, int t, double n, int heads) {
  std::sort(ious.begin(), ious.end(), std::greater<>());
  const int len = static_cast<int>(ious.size());
  int q = static_cast<int>(std::floor(n - 0.5 * (heads - t) + 1e-9));
  q = std::clamp(q, 1, len);
  double sum = 0.0;
  for (int i = 0; i < q; ++i) sum += ious[static_cast<std::size_t>(i)];
  return std::clamp(static_cast<int>(std::floor(sum + 1e-9)), 1, len);
}

}  // namespace detgeom::oracle
