// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "detgeom/box.hpp"
#include "detgeom/geometry.hpp"

namespace detgeom {

enum class LossKind { kIoU, kGIoU, kIcs, kL1 };

std::string to_string(LossKind kind);
/// Accepts "iou", "giou", "ics", "l1"; throws InputError otherwise.
LossKind parse_loss_kind(const std::string& name);

inline constexpr double kMinExtent = 1e-4;

struct FitConfig {
  LossKind loss_kind = LossKind::kGIoU;
  double lambda = kDefaultIcsLambda;
  int steps = 500;
  double learning_rate = 0.05;
  Box init_box{0.5, 0.5, 0.5, 0.5};
  Box target_box = kImageBox;
  // Recorded for provenance; the descent itself draws no random numbers.
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitStep {
  int step = 0;
  Box box;
  double loss = 0.0;
  double iou = 0.0;
  double gt_coverage = 0.0;
  double pred_coverage = 0.0;

  friend bool operator==(const FitStep&, const FitStep&) = default;
};

struct FitTrace {
  LossKind loss_kind = LossKind::kGIoU;
  std::vector<FitStep> steps;  // steps + 1 records, initial state first
  std::vector<std::string> warnings;

  /// First step index whose GT_Coverage reaches `level`.
  std::optional<int> first_gt_coverage_at(double level) const;
  /// First step index whose IoU reaches `level`.
  std::optional<int> first_iou_at(double level) const;
};

/// Thrown when the loss turns NaN; carries the trace up to that point.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, FitTrace partial)
      : std::runtime_error(what), trace_(std::move(partial)) {}
  const FitTrace& trace() const { return trace_; }

 private:
  FitTrace trace_;
};

/// Plain fixed-step gradient descent of the prediction's (cx, cy, w, h)
/// toward the target under the chosen loss. Width and height are clamped to
/// kMinExtent after every step.
FitTrace fit(const FitConfig& cfg);

/// One fit per loss kind from the same configuration.
std::vector<FitTrace> compare_losses(const FitConfig& base,
                                     std::span<const LossKind> kinds);

/// CSV with columns step,cx,cy,w,h,loss,iou,gt_coverage,pred_coverage.
std::string trace_csv(const FitTrace& trace);

/// Side-by-side CSV: a shared step column followed by one column group per
/// trace, each column prefixed with the loss name (e.g. giou_iou).
std::string compare_csv(std::span<const FitTrace> traces);

}  // namespace detgeom
