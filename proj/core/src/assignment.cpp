// SPDX-License-Identifier: Apache-2.0
#include "detgeom/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>

#include "detgeom/error.hpp"

namespace detgeom {

namespace {

// Guards floor() against sums such as 2.9999999999999996 that are integral
// in exact arithmetic.
constexpr double kFloorSlack = 1e-9;

}  // namespace

CostMatrix CostMatrix::transposed() const {
  CostMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

void CostConfig::validate() const {
  for (double v : {lambda_cls, lambda_l1, lambda_giou, lambda_center}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("cost weights must be finite and non-negative");
    }
  }
  if (!(center_penalty >= 1e4) || !std::isfinite(center_penalty)) {
    throw InputError("center_penalty must be finite and at least 1e4");
  }
  if (!(lambda_ics >= 0.0 && lambda_ics <= 1.0)) {
    throw InputError("lambda_ics must lie in [0, 1]");
  }
}

void SchedulerConfig::validate() const {
  if (num_heads < 1) throw InputError("num_heads must be positive");
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError("n must be positive");
  if (n - 0.5 * (num_heads - 1) < 1.0) {
    throw InputError("n - 0.5 (num_heads - 1) must be at least 1");
  }
}

CostMatrix cost_matrix(std::span<const LabeledBox> gts,
                       std::span<const ScoredPrediction> preds,
                       const CostConfig& cfg) {
  cfg.validate();
  if (preds.empty()) throw InputError("cost_matrix needs at least one prediction");

  CostMatrix cost(gts.size(), preds.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const LabeledBox& g = gts[i];
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const ScoredPrediction& p = preds[j];
      const ClassProb cp{p.probs, g.category};
      const double cls = cross_entropy(cp);
      const double l1 = l1_cost(g.box, p.box).value;
      const double overlap = cfg.use_ics ? ics(g.box, p.box, cfg.lambda_ics)
                                         : giou(g.box, p.box);
      const double center =
          contains_point(g.box, p.box.cx, p.box.cy) ? 0.0 : cfg.center_penalty;
      cost(i, j) = cfg.lambda_cls * cls + cfg.lambda_l1 * l1 +
                   cfg.lambda_giou * (1.0 - overlap) +
                   cfg.lambda_center * center;
    }
  }
  return cost;
}

int topk_count(std::size_t row_len, int t, const SchedulerConfig& sched) {
  sched.validate();
  if (t < 1 || t > sched.num_heads) {
    throw InputError("head index " + std::to_string(t) + " outside [1, " +
                     std::to_string(sched.num_heads) + "]");
  }
  if (row_len == 0) throw InputError("empty IoU row");
  const double raw = sched.n - 0.5 * (sched.num_heads - t);
  const auto q = static_cast<long long>(std::floor(raw + kFloorSlack));
  return static_cast<int>(
      std::clamp<long long>(q, 1, static_cast<long long>(row_len)));
}

int dynamic_k(std::span<const double> iou_row, int t,
              const SchedulerConfig& sched) {
  const int q = topk_count(iou_row.size(), t, sched);
  std::vector<double> sorted(iou_row.begin(), iou_row.end());
  std::partial_sort(sorted.begin(), sorted.begin() + q, sorted.end(),
                    std::greater<>());
  const double sum = std::accumulate(sorted.begin(), sorted.begin() + q, 0.0);
  const auto k = static_cast<long long>(std::floor(sum + kFloorSlack));
  return static_cast<int>(
      std::clamp<long long>(k, 1, static_cast<long long>(iou_row.size())));
}

AssignmentResult simota_assign(std::span<const LabeledBox> gts,
                               std::span<const ScoredPrediction> preds, int t,
                               const CostConfig& cfg,
                               const SchedulerConfig& sched) {
  sched.validate();
  if (t < 1 || t > sched.num_heads) {
    throw InputError("head index " + std::to_string(t) + " outside [1, " +
                     std::to_string(sched.num_heads) + "]");
  }

  AssignmentResult result;
  result.k_per_gt.assign(gts.size(), 0);
  if (gts.empty() || preds.empty()) {
    result.negatives.resize(preds.size());
    std::iota(result.negatives.begin(), result.negatives.end(), 0);
    return result;
  }

  const CostMatrix cost = cost_matrix(gts, preds, cfg);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(preds.size(), kNone);

  for (std::size_t i = 0; i < gts.size(); ++i) {
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      if (contains_point(gts[i].box, preds[j].box.cx, preds[j].box.cy)) {
        candidates.push_back(j);
      }
    }
    if (candidates.empty()) {
      result.fallback_gts.push_back(i);
      candidates.resize(preds.size());
      std::iota(candidates.begin(), candidates.end(), 0);
    }

    std::vector<double> ious;
    ious.reserve(candidates.size());
    for (std::size_t j : candidates) ious.push_back(iou(gts[i].box, preds[j].box));
    const int k = dynamic_k(ious, t, sched);

    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) {
                       return cost(i, a) < cost(i, b);
                     });
    for (int r = 0; r < k; ++r) {
      const std::size_t j = candidates[static_cast<std::size_t>(r)];
      // Strict comparison keeps the earlier (lower-index) GT on ties.
      if (owner[j] == kNone || cost(i, j) < cost(owner[j], j)) owner[j] = i;
    }
  }

  for (std::size_t j = 0; j < preds.size(); ++j) {
    if (owner[j] == kNone) {
      result.negatives.push_back(j);
    } else {
      result.positives.push_back({j, owner[j], cost(owner[j], j)});
      ++result.k_per_gt[owner[j]];
    }
  }
  for (std::size_t i : result.fallback_gts) {
    std::clog << "detgeom: warning: ground truth " << i
              << " has no prediction centered inside it; selecting by cost "
                 "over all predictions\n";
  }
  return result;
}

}  // namespace detgeom
