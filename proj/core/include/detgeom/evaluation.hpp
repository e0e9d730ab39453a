// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "detgeom/box.hpp"

namespace detgeom {

enum class MetricKind { kIoU, kGtCoverage };

/// "iou" or "gtc".
std::string to_string(MetricKind kind);

struct GroundTruth {
  std::int64_t image_id = 0;
  Box box;
  std::int64_t category = 0;
};

struct Detection {
  std::int64_t image_id = 0;
  Box box;
  std::int64_t category = 0;
  double score = 0.0;
};

struct ImageMatch {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // (detection index, ground-truth index) into the caller's spans.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// Greedy one-to-one matching on a single image.
///
/// Detections are visited by descending score (ties broken by box
/// coordinates, so the result does not depend on input order). Each takes
/// the unmatched ground truth with the highest overlap measure, provided the
/// measure reaches `threshold`. Categories are not inspected here.
ImageMatch match_image(std::span<const GroundTruth> gts,
                       std::span<const Detection> dets, double threshold,
                       MetricKind metric);

struct ThresholdResult {
  double threshold = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Percentages in [0, 100], as reported in detection benchmark tables.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  MetricKind metric_kind = MetricKind::kIoU;
  std::vector<double> thresholds;
  std::vector<ThresholdResult> per_threshold;
  double weighted_avg_f1 = 0.0;
};

inline const std::vector<double> kDefaultThresholds{0.6, 0.7, 0.8, 0.9};
inline constexpr double kDefaultNmsThreshold = 0.9;
inline constexpr double kDefaultScoreFloor = 0.05;

struct EvalOptions {
  std::vector<double> thresholds = kDefaultThresholds;
  MetricKind metric = MetricKind::kIoU;
  std::optional<double> nms_threshold = kDefaultNmsThreshold;
  double score_floor = kDefaultScoreFloor;
  bool ignore_category = false;
  bool allow_empty_gt = false;
  unsigned threads = 1;
};

/// Throws InputError unless thresholds are non-empty, strictly increasing
/// and inside (0, 1].
void validate_thresholds(std::span<const double> thresholds);

/// sum(t_i * F1_i) / sum(t_i).
double weighted_f1(std::span<const double> f1s,
                   std::span<const double> thresholds);

ThresholdResult summarize(double threshold, std::size_t tp, std::size_t fp,
                          std::size_t fn);

/// Dataset-level evaluation. Detections under the score floor are dropped,
/// NMS (if enabled) runs per image and category, matching runs per image
/// and category (per image only with ignore_category), and counts are
/// summed over images before precision, recall and F1 are computed.
/// Throws DomainError for an empty ground-truth set unless allow_empty_gt.
EvalReport evaluate(std::span<const GroundTruth> gts,
                    std::span<const Detection> dets,
                    const EvalOptions& opts = {});

}  // namespace detgeom
