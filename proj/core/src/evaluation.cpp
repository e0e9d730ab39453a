// SPDX-License-Identifier: Apache-2.0
#include "detgeom/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <map>
#include <numeric>
#include <thread>
#include <tuple>

#include "detgeom/assignment.hpp"
#include "detgeom/error.hpp"
#include "detgeom/geometry.hpp"

namespace detgeom {

namespace {

auto box_key(const Box& b) { return std::tuple(b.cx, b.cy, b.w, b.h); }

double overlap(const Box& gt, const Box& det, MetricKind metric) {
  return metric == MetricKind::kIoU ? iou(gt, det) : gt_coverage(gt, det);
}

struct Group {
  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

std::vector<Counts> evaluate_group(Group& g, const EvalOptions& opts) {
  if (opts.nms_threshold && !g.dets.empty()) {
    std::vector<ScoredBox> scored;
    scored.reserve(g.dets.size());
    for (const auto& d : g.dets) scored.push_back({d.box, d.score});
    std::vector<Detection> kept;
    for (std::size_t i : nms_indices(scored, *opts.nms_threshold)) {
      kept.push_back(g.dets[i]);
    }
    g.dets = std::move(kept);
  }
  std::vector<Counts> out;
  out.reserve(opts.thresholds.size());
  for (double t : opts.thresholds) {
    const ImageMatch m = match_image(g.gts, g.dets, t, opts.metric);
    out.push_back({m.tp, m.fp, m.fn});
  }
  return out;
}

double percent_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0
                  : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string to_string(MetricKind kind) {
  return kind == MetricKind::kIoU ? "iou" : "gtc";
}

ImageMatch match_image(std::span<const GroundTruth> gts,
                       std::span<const Detection> dets, double threshold,
                       MetricKind metric) {
  std::optional<std::int64_t> image;
  auto check_image = [&](std::int64_t id) {
    if (!image) image = id;
    if (*image != id) throw InputError("match_image received mixed image ids");
  };
  for (const auto& g : gts) check_image(g.image_id);
  for (const auto& d : dets) check_image(d.image_id);

  std::vector<std::size_t> det_order(dets.size());
  std::iota(det_order.begin(), det_order.end(), 0);
  std::stable_sort(det_order.begin(), det_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dets[a].score != dets[b].score) {
                       return dets[a].score > dets[b].score;
                     }
                     return box_key(dets[a].box) < box_key(dets[b].box);
                   });
  std::vector<std::size_t> gt_order(gts.size());
  std::iota(gt_order.begin(), gt_order.end(), 0);
  std::stable_sort(gt_order.begin(), gt_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::tuple(box_key(gts[a].box), gts[a].category) <
                            std::tuple(box_key(gts[b].box), gts[b].category);
                   });

  ImageMatch m;
  std::vector<char> taken(gts.size(), 0);
  for (std::size_t di : det_order) {
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t gi : gt_order) {
      if (taken[gi]) continue;
      const double v = overlap(gts[gi].box, dets[di].box, metric);
      if (v > best) {
        best = v;
        best_gt = gi;
      }
    }
    if (best_gt < gts.size() && best >= threshold) {
      taken[best_gt] = 1;
      m.pairs.emplace_back(di, best_gt);
      ++m.tp;
    } else {
      ++m.fp;
    }
  }
  m.fn = gts.size() - m.tp;
  return m;
}

void validate_thresholds(std::span<const double> thresholds) {
  if (thresholds.empty()) throw InputError("at least one threshold is required");
  double prev = 0.0;
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw InputError("thresholds must lie in (0, 1]");
    }
    if (!(t > prev)) throw InputError("thresholds must be strictly increasing");
    prev = t;
  }
}

double weighted_f1(std::span<const double> f1s,
                   std::span<const double> thresholds) {
  if (f1s.size() != thresholds.size()) {
    throw InputError("weighted_f1: F1 and threshold counts differ");
  }
  if (f1s.empty()) throw InputError("weighted_f1: no values");
  // Accumulating offsets from the first value keeps constant inputs exact.
  const double ref = f1s[0];
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < f1s.size(); ++i) {
    num += thresholds[i] * (f1s[i] - ref);
    den += thresholds[i];
  }
  if (!(den > 0.0)) throw InputError("weighted_f1: thresholds sum to zero");
  return ref + num / den;
}

ThresholdResult summarize(double threshold, std::size_t tp, std::size_t fp,
                          std::size_t fn) {
  ThresholdResult r;
  r.threshold = threshold;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = percent_ratio(tp, tp + fp);
  r.recall = percent_ratio(tp, tp + fn);
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

EvalReport evaluate(std::span<const GroundTruth> gts,
                    std::span<const Detection> dets, const EvalOptions& opts) {
  validate_thresholds(opts.thresholds);
  if (opts.nms_threshold &&
      !(*opts.nms_threshold > 0.0 && *opts.nms_threshold <= 1.0)) {
    throw InputError("NMS threshold must lie in (0, 1]");
  }
  if (gts.empty() && !opts.allow_empty_gt) {
    throw DomainError("ground-truth set is empty; recall is undefined");
  }

  using Key = std::pair<std::int64_t, std::int64_t>;
  std::map<Key, Group> groups;
  auto key_of = [&](std::int64_t image, std::int64_t cat) {
    return Key{image, opts.ignore_category ? 0 : cat};
  };
  for (const auto& g : gts) {
    if (!(area(g.box) > 0.0)) throw InputError("ground-truth box has zero area");
    groups[key_of(g.image_id, g.category)].gts.push_back(g);
  }
  for (const auto& d : dets) {
    if (!std::isfinite(d.score)) throw InputError("detection score is not finite");
    if (!(area(d.box) > 0.0)) throw InputError("detection box has zero area");
    if (d.score < opts.score_floor) continue;
    groups[key_of(d.image_id, d.category)].dets.push_back(d);
  }

  std::vector<Group*> work;
  work.reserve(groups.size());
  for (auto& [key, g] : groups) work.push_back(&g);
  std::vector<std::vector<Counts>> results(work.size());

  const unsigned threads = std::max(1u, std::min<unsigned>(
      opts.threads, static_cast<unsigned>(std::max<std::size_t>(1, work.size()))));
  if (threads == 1) {
    for (std::size_t i = 0; i < work.size(); ++i) {
      results[i] = evaluate_group(*work[i], opts);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
          try {
            results[i] = evaluate_group(*work[i], opts);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  EvalReport report;
  report.metric_kind = opts.metric;
  report.thresholds = opts.thresholds;
  std::vector<double> f1s;
  for (std::size_t ti = 0; ti < opts.thresholds.size(); ++ti) {
    Counts total;
    for (const auto& r : results) {
      total.tp += r[ti].tp;
      total.fp += r[ti].fp;
      total.fn += r[ti].fn;
    }
    report.per_threshold.push_back(
        summarize(opts.thresholds[ti], total.tp, total.fp, total.fn));
    f1s.push_back(report.per_threshold.back().f1);
  }
  report.weighted_avg_f1 = weighted_f1(f1s, opts.thresholds);
  return report;
}

}  // namespace detgeom
