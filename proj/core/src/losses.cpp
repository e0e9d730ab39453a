// SPDX-License-Identifier: Apache-2.0
#include "detgeom/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "detgeom/assignment.hpp"
#include "detgeom/error.hpp"

namespace detgeom {

namespace {

// Derivatives with respect to the prediction corners, ordered (x1, y1, x2, y2).
using CornerGrad = std::array<double, 4>;

// Where a prediction edge coincides with a ground-truth edge the pairwise
// terms have a kink. Both one-sided derivatives are kept: side 0 moves the
// edge into the overlap (intersection follows it, enclosing box does not),
// side 1 moves it out. Off ties the two sides agree.
struct PairTerms {
  double inter = 0.0;
  double area_gt = 0.0;
  double area_pred = 0.0;
  double encl = 0.0;
  CornerGrad d_area_pred{};
  std::array<CornerGrad, 2> d_inter{};
  std::array<CornerGrad, 2> d_encl{};
};

PairTerms pair_terms(const Box& gt, const Box& pred) {
  const Corners g = gt.corners();
  const Corners p = pred.corners();
  PairTerms t;

  const double pw = p.x2 - p.x1;
  const double ph = p.y2 - p.y1;
  t.area_gt = (g.x2 - g.x1) * (g.y2 - g.y1);
  t.area_pred = pw * ph;
  if (!(t.area_gt > 0.0)) throw InputError("ground-truth box has zero area");
  if (!(t.area_pred > 0.0)) throw InputError("prediction box has zero area");
  t.d_area_pred = {-ph, -pw, ph, pw};

  const double iw = std::min(p.x2, g.x2) - std::max(p.x1, g.x1);
  const double ih = std::min(p.y2, g.y2) - std::max(p.y1, g.y1);
  const bool overlap = iw > 0.0 && ih > 0.0;
  if (overlap) t.inter = iw * ih;
  const double cw = std::max(p.x2, g.x2) - std::min(p.x1, g.x1);
  const double ch = std::max(p.y2, g.y2) - std::min(p.y1, g.y1);
  t.encl = cw * ch;

  // Per corner: signed unit move of the edge, its position relative to the
  // ground-truth edge (+1 inside, -1 outside, 0 tied), and the extent
  // multiplying its movement.
  const std::array<double, 4> sign{-1.0, -1.0, 1.0, 1.0};
  const std::array<double, 4> inside{p.x1 - g.x1, p.y1 - g.y1, g.x2 - p.x2,
                                     g.y2 - p.y2};
  const std::array<double, 4> inter_len{ih, iw, ih, iw};
  const std::array<double, 4> encl_len{ch, cw, ch, cw};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t side = 0; side < 2; ++side) {
      const bool tied = inside[i] == 0.0;
      const bool in_inter = tied ? side == 0 : inside[i] > 0.0;
      const bool in_encl = tied ? side == 1 : inside[i] < 0.0;
      t.d_inter[side][i] = overlap && in_inter ? sign[i] * inter_len[i] : 0.0;
      t.d_encl[side][i] = in_encl ? sign[i] * encl_len[i] : 0.0;
    }
  }
  return t;
}

// Smallest-magnitude element between the two one-sided derivatives: zero
// when the edge sits at a kink minimum, so coincident boxes are stationary.
double min_norm(double a, double b) {
  if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// `corner(d_inter, d_encl, d_area_pred)` gives the loss derivative along one
// corner coordinate.
template <typename F>
BoxGrad edge_gradient(const PairTerms& t, F corner) {
  CornerGrad d{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double a = corner(t.d_inter[0][i], t.d_encl[0][i], t.d_area_pred[i]);
    const double b = corner(t.d_inter[1][i], t.d_encl[1][i], t.d_area_pred[i]);
    d[i] = a == b ? a : min_norm(a, b);
  }
  return {d[0] + d[2], d[1] + d[3], 0.5 * (d[2] - d[0]), 0.5 * (d[3] - d[1])};
}

double log_clamped(double p) { return std::log(clamp_prob(p)); }

double target_prob(const ClassProb& cp) {
  if (cp.target < 0 || static_cast<std::size_t>(cp.target) >= cp.p.size()) {
    throw InputError("class target " + std::to_string(cp.target) +
                     " outside probability vector of size " +
                     std::to_string(cp.p.size()));
  }
  return cp.p[static_cast<std::size_t>(cp.target)];
}

}  // namespace

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

LossValue iou_loss(const Box& gt, const Box& pred) {
  const PairTerms t = pair_terms(gt, pred);
  const double uni = t.area_gt + t.area_pred - t.inter;
  LossValue out;
  out.value = 1.0 - t.inter / uni;
  out.grad = edge_gradient(t, [&](double di, double, double dp) {
    const double d_uni = dp - di;
    return -(di * uni - t.inter * d_uni) / (uni * uni);
  });
  return out;
}

LossValue giou_loss(const Box& gt, const Box& pred) {
  const PairTerms t = pair_terms(gt, pred);
  const double uni = t.area_gt + t.area_pred - t.inter;
  LossValue out;
  // 1 - GIoU = 1 - I/U + (C - U)/C
  out.value = 1.0 - t.inter / uni + (t.encl - uni) / t.encl;
  out.grad = edge_gradient(t, [&](double di, double dc, double dp) {
    const double d_uni = dp - di;
    const double d_iou = (di * uni - t.inter * d_uni) / (uni * uni);
    const double d_ratio = (d_uni * t.encl - uni * dc) / (t.encl * t.encl);
    return -d_iou - d_ratio;
  });
  return out;
}

LossValue ics_loss(const Box& gt, const Box& pred, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("ics lambda must lie in [0, 1]");
  }
  const PairTerms t = pair_terms(gt, pred);
  const double gt_c = t.inter / t.area_gt;
  const double pred_c = t.inter / t.area_pred;
  LossValue out;
  out.value = 1.0 - (lambda * gt_c + (1.0 - lambda) * pred_c);
  out.grad = edge_gradient(t, [&](double di, double, double dp) {
    const double d_gt_c = di / t.area_gt;
    const double d_pred_c =
        (di * t.area_pred - t.inter * dp) / (t.area_pred * t.area_pred);
    return -(lambda * d_gt_c + (1.0 - lambda) * d_pred_c);
  });
  return out;
}

LossValue l1_cost(const Box& gt, const Box& pred) {
  const auto g = gt.as_array();
  const auto p = pred.as_array();
  LossValue out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double diff = p[i] - g[i];
    out.value += std::abs(diff);
    out.grad[i] = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  }
  return out;
}

double cross_entropy(const ClassProb& cp) {
  return -log_clamped(target_prob(cp));
}

double focal_loss(const ClassProb& cp, double alpha, double gamma) {
  const double p = clamp_prob(target_prob(cp));
  return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
}

double sigmoid_focal_loss(const ClassProb& cp, double alpha, double gamma) {
  double sum = 0.0;
  for (std::size_t c = 0; c < cp.p.size(); ++c) {
    const double p = clamp_prob(cp.p[c]);
    if (static_cast<int>(c) == cp.target) {
      sum += -alpha * std::pow(1.0 - p, gamma) * std::log(p);
    } else {
      sum += -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
    }
  }
  return sum;
}

double binary_cross_entropy(const ClassProb& cp) {
  double sum = 0.0;
  for (std::size_t c = 0; c < cp.p.size(); ++c) {
    const double p = clamp_prob(cp.p[c]);
    sum += static_cast<int>(c) == cp.target ? -std::log(p)
                                            : -std::log(1.0 - p);
  }
  return sum;
}

double head_loss(const AssignmentResult& assignment,
                 std::span<const LabeledBox> gts,
                 std::span<const ScoredPrediction> preds,
                 const HeadLossOptions& opts) {
  std::vector<int> target(preds.size(), ClassProb::kBackground);
  for (const auto& pos : assignment.positives) {
    if (pos.pred >= preds.size() || pos.gt >= gts.size()) {
      throw InputError("assignment references an index out of range");
    }
    target[pos.pred] = gts[pos.gt].category;
  }

  double cls_sum = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) {
    const ClassProb cp{preds[j].probs, target[j]};
    ClassLossKind kind = opts.cls_kind;
    if (kind == ClassLossKind::kAuto) {
      kind = cp.p.size() == 1 ? ClassLossKind::kCrossEntropy
                              : ClassLossKind::kFocal;
    }
    cls_sum += kind == ClassLossKind::kCrossEntropy
                   ? binary_cross_entropy(cp)
                   : sigmoid_focal_loss(cp, opts.focal_alpha, opts.focal_gamma);
  }

  const std::size_t num_pos = assignment.positives.size();
  double l1_sum = 0.0;
  double box_sum = 0.0;
  for (const auto& pos : assignment.positives) {
    const Box& g = gts[pos.gt].box;
    const Box& p = preds[pos.pred].box;
    l1_sum += l1_cost(g, p).value;
    box_sum += opts.use_ics ? ics_loss(g, p, opts.lambda).value
                            : giou_loss(g, p).value;
  }

  const double norm = static_cast<double>(std::max<std::size_t>(1, num_pos));
  const double loss_cls = cls_sum / norm;
  const double loss_l1 = num_pos == 0 ? 0.0 : l1_sum / norm;
  const double loss_box = num_pos == 0 ? 0.0 : box_sum / norm;
  return opts.weights.cls * loss_cls + opts.weights.l1 * loss_l1 +
         opts.weights.giou * loss_box;
}

double total_loss(std::span<const double> per_head) {
  return std::accumulate(per_head.begin(), per_head.end(), 0.0);
}

}  // namespace detgeom
