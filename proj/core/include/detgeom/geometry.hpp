// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "detgeom/box.hpp"

namespace detgeom {

inline constexpr double kDefaultIcsLambda = 0.5;

/// All overlap measures for one (ground truth, prediction) pair.
struct OverlapReport {
  double intersection = 0.0;
  double union_ = 0.0;
  double iou = 0.0;
  double gt_coverage = 0.0;
  double pred_coverage = 0.0;
  double ics = 0.0;
  double giou = 0.0;
};

struct Coverage {
  double gt_coverage = 0.0;
  double pred_coverage = 0.0;
};

double area(const Box& b);

double intersection_area(const Box& a, const Box& b);

/// Area of the smallest axis-aligned box enclosing both operands.
double enclosing_area(const Box& a, const Box& b);

/// |G ∩ P| / |G ∪ P|. Two zero-area operands give 0 rather than NaN.
double iou(const Box& gt, const Box& pred);

/// (|G ∩ P| / |G|, |G ∩ P| / |P|). Throws InputError when either box has
/// zero area.
Coverage coverage(const Box& gt, const Box& pred);

double gt_coverage(const Box& gt, const Box& pred);

/// Information coverage score: lambda * GT_Coverage + (1 - lambda) *
/// Pred_Coverage. lambda must lie in [0, 1].
double ics(const Box& gt, const Box& pred, double lambda = kDefaultIcsLambda);

/// Generalized IoU: IoU - |C \ (G ∪ P)| / |C| with C the enclosing box.
double giou(const Box& gt, const Box& pred);

OverlapReport overlap_report(const Box& gt, const Box& pred,
                             double lambda = kDefaultIcsLambda);

/// Closed-box containment test for a point (boundary counts as inside).
bool contains_point(const Box& b, double x, double y);

}  // namespace detgeom
