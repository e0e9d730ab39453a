// SPDX-License-Identifier: Apache-2.0
#include "detgeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detgeom/error.hpp"

namespace detgeom {

namespace {

double overlap_1d(double a1, double a2, double b1, double b2) {
  return std::max(0.0, std::min(a2, b2) - std::max(a1, b1));
}

// Areas used inside ratios are taken from the corner extents so that the
// intersection of a contained box reproduces its area bit for bit.
double extent_area(const Box& b) {
  const Corners c = b.corners();
  return (c.x2 - c.x1) * (c.y2 - c.y1);
}

// Larger area plus the part of the smaller one outside the intersection.
// For a contained box the second term is exactly zero, so the union equals
// the outer box's area and its enclosing box bit for bit.
double union_area(const Box& a, const Box& b, double inter) {
  const double aa = extent_area(a);
  const double ab = extent_area(b);
  return std::max(aa, ab) + (std::min(aa, ab) - inter);
}

void require_positive_area(const Box& b, const char* what) {
  validate(b);
  if (!(b.w > 0.0 && b.h > 0.0) || extent_area(b) <= 0.0) {
    throw InputError(std::string(what) + " box has zero area");
  }
}

}  // namespace

void validate(const Box& b) {
  if (!std::isfinite(b.cx) || !std::isfinite(b.cy) || !std::isfinite(b.w) ||
      !std::isfinite(b.h)) {
    throw InputError("box has non-finite coordinates");
  }
  if (b.w < 0.0 || b.h < 0.0) {
    throw InputError("box has negative width or height");
  }
}

double area(const Box& b) { return b.w * b.h; }

double intersection_area(const Box& a, const Box& b) {
  const Corners ca = a.corners();
  const Corners cb = b.corners();
  return overlap_1d(ca.x1, ca.x2, cb.x1, cb.x2) *
         overlap_1d(ca.y1, ca.y2, cb.y1, cb.y2);
}

double enclosing_area(const Box& a, const Box& b) {
  const Corners ca = a.corners();
  const Corners cb = b.corners();
  const double w = std::max(ca.x2, cb.x2) - std::min(ca.x1, cb.x1);
  const double h = std::max(ca.y2, cb.y2) - std::min(ca.y1, cb.y1);
  return w * h;
}

double iou(const Box& gt, const Box& pred) {
  validate(gt);
  validate(pred);
  const double inter = intersection_area(gt, pred);
  const double uni = union_area(gt, pred, inter);
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

Coverage coverage(const Box& gt, const Box& pred) {
  require_positive_area(gt, "ground-truth");
  require_positive_area(pred, "prediction");
  const double inter = intersection_area(gt, pred);
  return Coverage{inter / extent_area(gt), inter / extent_area(pred)};
}

double gt_coverage(const Box& gt, const Box& pred) {
  return coverage(gt, pred).gt_coverage;
}

double ics(const Box& gt, const Box& pred, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("ics lambda must lie in [0, 1]");
  }
  const Coverage c = coverage(gt, pred);
  return lambda * c.gt_coverage + (1.0 - lambda) * c.pred_coverage;
}

double giou(const Box& gt, const Box& pred) {
  require_positive_area(gt, "ground-truth");
  require_positive_area(pred, "prediction");
  const double inter = intersection_area(gt, pred);
  const double uni = union_area(gt, pred, inter);
  const double encl = enclosing_area(gt, pred);
  return inter / uni - (encl - uni) / encl;
}

OverlapReport overlap_report(const Box& gt, const Box& pred, double lambda) {
  OverlapReport r;
  r.intersection = intersection_area(gt, pred);
  r.union_ = union_area(gt, pred, r.intersection);
  r.iou = iou(gt, pred);
  const Coverage c = coverage(gt, pred);
  r.gt_coverage = c.gt_coverage;
  r.pred_coverage = c.pred_coverage;
  r.ics = ics(gt, pred, lambda);
  r.giou = giou(gt, pred);
  return r;
}

bool contains_point(const Box& b, double x, double y) {
  const Corners c = b.corners();
  return x >= c.x1 && x <= c.x2 && y >= c.y1 && y <= c.y2;
}

}  // namespace detgeom
