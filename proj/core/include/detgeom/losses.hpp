// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include "detgeom/box.hpp"
#include "detgeom/geometry.hpp"

namespace detgeom {

/// Gradient with respect to the prediction's (cx, cy, w, h).
using BoxGrad = std::array<double, 4>;

struct LossValue {
  double value = 0.0;
  BoxGrad grad{};
};

inline constexpr double kProbClamp = 1e-7;

/// Per-class foreground probabilities for one prediction plus the class it
/// is being scored against. A target of kBackground marks a negative.
struct ClassProb {
  static constexpr int kBackground = -1;

  std::vector<double> p;
  int target = kBackground;
};

double clamp_prob(double p);

// Box losses. Gradients are exact derivatives of the piecewise-smooth loss;
// where a prediction edge coincides with a ground-truth edge the prediction
// edge is treated as the active bound of the intersection (the derivative
// taken from the overlapping side).

LossValue iou_loss(const Box& gt, const Box& pred);
LossValue giou_loss(const Box& gt, const Box& pred);
LossValue ics_loss(const Box& gt, const Box& pred,
                   double lambda = kDefaultIcsLambda);

/// Sum of absolute coordinate differences over (cx, cy, w, h). The gradient
/// is the sign pattern, 0 on exact ties.
LossValue l1_cost(const Box& gt, const Box& pred);

/// -log p[target] after clamping.
double cross_entropy(const ClassProb& cp);

/// -alpha (1 - p)^gamma log p for the target class.
double focal_loss(const ClassProb& cp, double alpha = 0.25,
                  double gamma = 2.0);

/// Per-class sigmoid focal loss summed over classes: classes other than
/// the target (all classes for a background target) contribute
/// -(1 - alpha) p^gamma log(1 - p).
double sigmoid_focal_loss(const ClassProb& cp, double alpha = 0.25,
                          double gamma = 2.0);

/// Binary cross entropy over all classes: -log p for the target class and
/// -log(1 - p) for the others.
double binary_cross_entropy(const ClassProb& cp);

struct LossWeights {
  double cls = 2.0;
  double l1 = 5.0;
  double giou = 2.0;
};

enum class ClassLossKind {
  kAuto,          // binary cross entropy for one class, focal otherwise
  kCrossEntropy,
  kFocal,
};

struct HeadLossOptions {
  LossWeights weights{};
  bool use_ics = false;
  double lambda = kDefaultIcsLambda;
  ClassLossKind cls_kind = ClassLossKind::kAuto;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
};

struct LabeledBox {
  Box box;
  int category = 0;
};

struct ScoredPrediction {
  Box box;
  std::vector<double> probs;  // per-class foreground probabilities
};

struct AssignmentResult;

/// Loss of one head given its completed assignment. Regression terms are
/// averaged over positive pairs; the classification term is summed over all
/// predictions and divided by max(1, #positives). With use_ics the GIoU
/// term is replaced by the ICS loss.
double head_loss(const AssignmentResult& assignment,
                 std::span<const LabeledBox> gts,
                 std::span<const ScoredPrediction> preds,
                 const HeadLossOptions& opts = {});

/// Sum of per-head losses.
double total_loss(std::span<const double> per_head);

}  // namespace detgeom
