// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>

#include "detgeom/assignment.hpp"
#include "detgeom/error.hpp"

namespace detgeom {

std::vector<std::size_t> nms_indices(std::span<const ScoredBox> dets,
                                     double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw InputError("NMS threshold must lie in (0, 1]");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(dets[k].box, dets[idx].box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

std::vector<ScoredBox> nms(std::span<const ScoredBox> dets, double iou_threshold) {
  std::vector<ScoredBox> out;
  for (std::size_t i : nms_indices(dets, iou_threshold)) out.push_back(dets[i]);
  return out;
}

}  // namespace detgeom
