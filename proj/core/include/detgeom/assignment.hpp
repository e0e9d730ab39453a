// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detgeom/box.hpp"
#include "detgeom/geometry.hpp"
#include "detgeom/losses.hpp"

namespace detgeom {

/// Dense row-major matrix of matching costs; rows are ground truths and
/// columns are predictions.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  CostMatrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct CostConfig {
  double lambda_cls = 2.0;
  double lambda_l1 = 5.0;
  double lambda_giou = 2.0;
  double lambda_center = 1.0;
  double center_penalty = 1e5;
  bool use_ics = false;     // replace the GIoU cost by 1 - ICS
  double lambda_ics = kDefaultIcsLambda;

  void validate() const;
};

/// Dynamic-k schedule across a cascade of heads. `n` is the tuning knob
/// (default 8) and `num_heads` the cascade depth (default 6).
struct SchedulerConfig {
  double n = 8.0;
  int num_heads = 6;

  void validate() const;
};

struct PositivePair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double cost = 0.0;

  friend bool operator==(const PositivePair&, const PositivePair&) = default;
};

struct AssignmentResult {
  std::vector<PositivePair> positives;  // sorted by prediction index
  std::vector<std::size_t> negatives;   // ascending
  std::vector<int> k_per_gt;
  // Ground truths that had no prediction centered inside them and fell back
  // to selecting from all predictions.
  std::vector<std::size_t> fallback_gts;
};

/// Matching cost for every (ground truth, prediction) pair:
///   lambda_cls * (-log p) + lambda_l1 * L1 + lambda_giou * (1 - GIoU)
///   + lambda_center * (center_penalty if the prediction center lies outside
///   the ground truth, boundary inclusive).
CostMatrix cost_matrix(std::span<const LabeledBox> gts,
                       std::span<const ScoredPrediction> preds,
                       const CostConfig& cfg = {});

/// Number of top IoUs summed for head `t` (1-based):
/// floor(n - 0.5 (N - t)) clamped to [1, row_len].
int topk_count(std::size_t row_len, int t, const SchedulerConfig& sched);

/// Positives for one ground truth at head `t`: the floor of the sum of the
/// topk_count largest IoUs, clamped to [1, len(iou_row)].
int dynamic_k(std::span<const double> iou_row, int t,
              const SchedulerConfig& sched = {});

/// Many-to-one assignment with a per-head dynamic k.
///
/// Each ground truth takes its k lowest-cost candidates among predictions
/// centered inside it (all predictions if none are). A prediction claimed by
/// several ground truths stays with the cheapest one, ties to the lowest
/// ground-truth index, and the losers are not backfilled.
AssignmentResult simota_assign(std::span<const LabeledBox> gts,
                               std::span<const ScoredPrediction> preds, int t,
                               const CostConfig& cfg = {},
                               const SchedulerConfig& sched = {});

struct MatchPair {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
  friend auto operator<=>(const MatchPair&, const MatchPair&) = default;
};

/// Minimum-cost one-to-one matching of min(rows, cols) pairs (Hungarian
/// method with potentials, O(n^2 m)). Pairs are sorted by row.
std::vector<MatchPair> hungarian_assign(const CostMatrix& cost);

double matching_cost(const CostMatrix& cost, std::span<const MatchPair> pairs);

struct ScoredBox {
  Box box;
  double score = 0.0;
};

/// Indices of boxes kept by greedy NMS, in descending score order (ties keep
/// input order). A box is dropped iff its IoU with an already kept box
/// exceeds `iou_threshold`.
std::vector<std::size_t> nms_indices(std::span<const ScoredBox> dets,
                                     double iou_threshold);

std::vector<ScoredBox> nms(std::span<const ScoredBox> dets,
                           double iou_threshold);

}  // namespace detgeom
