// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "detgeom/assignment.hpp"
#include "detgeom/evaluation.hpp"
#include "detgeom/geometry.hpp"
#include "detgeom/losses.hpp"

namespace detgeom::cli {

using ordered_json = nlohmann::ordered_json;

// COCO-style bbox: [x, y, w, h] in absolute pixels, origin at the top-left
// corner of the box.
using PixelBox = std::array<double, 4>;

struct ImageInfo {
  std::int64_t id = 0;
  double width = 0.0;
  double height = 0.0;
  std::optional<std::string> file_name;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct Annotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  PixelBox bbox{};

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Category {
  std::int64_t id = 0;
  std::string name;

  friend bool operator==(const Category&, const Category&) = default;
};

struct DatasetFile {
  std::vector<ImageInfo> images;
  std::vector<Annotation> annotations;
  std::vector<Category> categories;

  const ImageInfo* find_image(std::int64_t id) const;

  friend bool operator==(const DatasetFile&, const DatasetFile&) = default;
};

struct PredictionRecord {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  PixelBox bbox{};
  double score = 0.0;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Parse and validate a dataset document. `source` names it in diagnostics.
DatasetFile parse_dataset(const std::string& text, const std::string& source);
ordered_json dataset_to_json(const DatasetFile& ds);

/// Parse predictions; every image_id must exist in `ds`.
std::vector<PredictionRecord> parse_predictions(const std::string& text,
                                                const std::string& source,
                                                const DatasetFile& ds);
ordered_json predictions_to_json(const std::vector<PredictionRecord>& preds);

/// Pixel [x, y, w, h] to normalized center form.
Box normalize(const PixelBox& bbox, const ImageInfo& image);

std::vector<GroundTruth> to_ground_truths(const DatasetFile& ds);
std::vector<Detection> to_detections(const std::vector<PredictionRecord>& preds,
                                     const DatasetFile& ds);

struct ReportMetadata {
  std::string tool_version;
  std::optional<double> nms_threshold;
  double score_floor = 0.0;
  bool ignore_category = false;
  std::string gt_hash;
  std::string pred_hash;
};

ordered_json report_to_json(const EvalReport& report, const ReportMetadata& meta);

/// Aligned text table: one row per threshold, then the F1 row laid out
/// like a benchmark results table with the weighted average at the end.
std::string report_table(const EvalReport& report);

ordered_json overlap_to_json(const OverlapReport& r);

/// Proposals as [[x1, y1, x2, y2], ...].
ordered_json proposals_to_json(const std::vector<Box>& boxes);

struct AssignInput {
  std::vector<LabeledBox> gts;
  std::vector<ScoredPrediction> preds;
  std::optional<int> head_index;
  CostConfig cost;
  SchedulerConfig sched;
};

/// {"gts": [{"box": [x1,y1,x2,y2], "category": c}],
///  "preds": [{"box": [...], "probs": [...]}],
///  "head_index": t, "config": {...}}
AssignInput parse_assign_input(const std::string& text, const std::string& source);

ordered_json assignment_to_json(const AssignmentResult& r, int head_index);

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

}  // namespace detgeom::cli
