// SPDX-License-Identifier: Apache-2.0
#include "detgeom/fitter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "detgeom/error.hpp"
#include "detgeom/losses.hpp"

namespace detgeom {

namespace {

LossValue evaluate_loss(const FitConfig& cfg, const Box& pred) {
  switch (cfg.loss_kind) {
    case LossKind::kIoU: return iou_loss(cfg.target_box, pred);
    case LossKind::kGIoU: return giou_loss(cfg.target_box, pred);
    case LossKind::kIcs: return ics_loss(cfg.target_box, pred, cfg.lambda);
    case LossKind::kL1: return l1_cost(cfg.target_box, pred);
  }
  return {};
}

FitStep record(int step, const Box& box, double loss, const Box& target) {
  FitStep s;
  s.step = step;
  s.box = box;
  s.loss = loss;
  s.iou = iou(target, box);
  const Coverage c = coverage(target, box);
  s.gt_coverage = c.gt_coverage;
  s.pred_coverage = c.pred_coverage;
  return s;
}

void append_number(std::string& out, double v) {
  // Shortest representation that reads back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_step_fields(std::string& out, const FitStep& s) {
  for (double v : {s.box.cx, s.box.cy, s.box.w, s.box.h, s.loss, s.iou,
                   s.gt_coverage, s.pred_coverage}) {
    out += ',';
    append_number(out, v);
  }
}

constexpr const char* kStepColumns[] = {"cx",   "cy",  "w",           "h",
                                        "loss", "iou", "gt_coverage", "pred_coverage"};

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kIoU: return "iou";
    case LossKind::kGIoU: return "giou";
    case LossKind::kIcs: return "ics";
    case LossKind::kL1: return "l1";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "iou") return LossKind::kIoU;
  if (name == "giou") return LossKind::kGIoU;
  if (name == "ics") return LossKind::kIcs;
  if (name == "l1") return LossKind::kL1;
  throw InputError("unknown loss kind '" + name + "' (expected iou|giou|ics|l1)");
}

void FitConfig::validate() const {
  if (steps <= 0) throw InputError("steps must be positive");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw InputError("learning rate must lie in (0, 1]");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  detgeom::validate(init_box);
  detgeom::validate(target_box);
  if (!(area(target_box) > 0.0)) throw InputError("target box must have positive area");
  if (!(area(init_box) > 0.0)) throw InputError("initial box must have positive area");
}

std::optional<int> FitTrace::first_gt_coverage_at(double level) const {
  for (const auto& s : steps) {
    if (s.gt_coverage >= level) return s.step;
  }
  return std::nullopt;
}

std::optional<int> FitTrace::first_iou_at(double level) const {
  for (const auto& s : steps) {
    if (s.iou >= level) return s.step;
  }
  return std::nullopt;
}

FitTrace fit(const FitConfig& cfg) {
  cfg.validate();
  FitTrace trace;
  trace.loss_kind = cfg.loss_kind;
  trace.steps.reserve(static_cast<std::size_t>(cfg.steps) + 1);

  if (intersection_area(cfg.target_box, cfg.init_box) <= 0.0 &&
      (cfg.loss_kind == LossKind::kIoU || cfg.loss_kind == LossKind::kIcs)) {
    trace.warnings.push_back(
        to_string(cfg.loss_kind) +
        " loss has zero gradient for disjoint boxes; the trace will stay flat");
  }

  Box box = cfg.init_box;
  for (int step = 0;; ++step) {
    const LossValue lv = evaluate_loss(cfg, box);
    if (std::isnan(lv.value)) {
      throw FitError("loss became NaN at step " + std::to_string(step), trace);
    }
    trace.steps.push_back(record(step, box, lv.value, cfg.target_box));
    if (step == cfg.steps) break;

    box.cx -= cfg.learning_rate * lv.grad[0];
    box.cy -= cfg.learning_rate * lv.grad[1];
    box.w = std::max(kMinExtent, box.w - cfg.learning_rate * lv.grad[2]);
    box.h = std::max(kMinExtent, box.h - cfg.learning_rate * lv.grad[3]);
  }
  return trace;
}

std::vector<FitTrace> compare_losses(const FitConfig& base,
                                     std::span<const LossKind> kinds) {
  if (kinds.empty()) throw InputError("compare_losses needs at least one loss kind");
  std::vector<FitTrace> out;
  out.reserve(kinds.size());
  for (LossKind k : kinds) {
    FitConfig cfg = base;
    cfg.loss_kind = k;
    out.push_back(fit(cfg));
  }
  return out;
}

std::string trace_csv(const FitTrace& trace) {
  std::string out = "step";
  for (const char* c : kStepColumns) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (const auto& s : trace.steps) {
    out += std::to_string(s.step);
    append_step_fields(out, s);
    out += '\n';
  }
  return out;
}

std::string compare_csv(std::span<const FitTrace> traces) {
  std::string out = "step";
  std::size_t rows = 0;
  for (const auto& t : traces) {
    for (const char* c : kStepColumns) {
      out += ',';
      out += to_string(t.loss_kind);
      out += '_';
      out += c;
    }
    rows = std::max(rows, t.steps.size());
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out += std::to_string(r);
    for (const auto& t : traces) {
      if (r < t.steps.size()) {
        append_step_fields(out, t.steps[r]);
      } else {
        out += std::string(std::size(kStepColumns), ',');
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace detgeom
