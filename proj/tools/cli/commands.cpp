// SPDX-License-Identifier: Apache-2.0
#include "cli/commands.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli/formats.hpp"
#include "cli/located_json.hpp"
#include "detgeom/error.hpp"
#include "detgeom/fitter.hpp"
#include "detgeom/proposals.hpp"

#ifndef DETGEOM_VERSION
#define DETGEOM_VERSION "0.0.0"
#endif

namespace detgeom::cli {

namespace {

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InputError("invalid " + what + " '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

// Accepts fractions or percentages (60 == 0.6).
std::vector<double> parse_thresholds(const std::string& list) {
  std::vector<double> out;
  for (const auto& tok : split(list, ',')) {
    double v = parse_double(tok, "threshold");
    if (v > 1.0) v /= 100.0;
    out.push_back(v);
  }
  validate_thresholds(out);
  return out;
}

std::optional<double> parse_nms(const std::string& s) {
  if (s == "off" || s == "none") return std::nullopt;
  const double v = parse_double(s, "NMS threshold");
  if (!(v > 0.0 && v <= 1.0)) throw InputError("NMS threshold must lie in (0, 1]");
  return v;
}

unsigned thread_budget() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("DETGEOM_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  const double v = parse_double(env, "DETGEOM_THREADS");
  if (!(v >= 1.0) || v != static_cast<double>(static_cast<unsigned>(v))) {
    throw InputError("DETGEOM_THREADS must be a positive integer");
  }
  return std::min(hw, static_cast<unsigned>(v));
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
}

Box box4(const std::vector<double>& v, bool corner_form) {
  if (v.size() != 4) throw InputError("expected 4 numbers");
  return corner_form ? Box::from_corners(v[0], v[1], v[2], v[3])
                     : Box{v[0], v[1], v[2], v[3]};
}

struct EvalArgs {
  std::string gt;
  std::string pred;
  std::string metric = "iou";
  std::string thresholds = "0.6,0.7,0.8,0.9";
  std::string nms = "0.9";
  double score_floor = kDefaultScoreFloor;
  std::string out;
  std::string format = "table";
  bool ignore_category = false;
  bool allow_empty_gt = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  EvalOptions opts;
  opts.metric = a.metric == "iou" ? MetricKind::kIoU : MetricKind::kGtCoverage;
  opts.thresholds = parse_thresholds(a.thresholds);
  opts.nms_threshold = parse_nms(a.nms);
  opts.score_floor = a.score_floor;
  opts.ignore_category = a.ignore_category;
  opts.allow_empty_gt = a.allow_empty_gt;
  opts.threads = thread_budget();

  const std::string gt_text = read_file(a.gt);
  const std::string pred_text = read_file(a.pred);
  const DatasetFile ds = parse_dataset(gt_text, a.gt);
  const auto preds = parse_predictions(pred_text, a.pred, ds);

  const auto gts = to_ground_truths(ds);
  const auto dets = to_detections(preds, ds);
  const EvalReport report = evaluate(gts, dets, opts);

  ReportMetadata meta;
  meta.tool_version = tool_version();
  meta.nms_threshold = opts.nms_threshold;
  meta.score_floor = opts.score_floor;
  meta.ignore_category = opts.ignore_category;
  meta.gt_hash = "sha256:" + sha256_hex(gt_text);
  meta.pred_hash = "sha256:" + sha256_hex(pred_text);
  const std::string json_text = report_to_json(report, meta).dump(2) + "\n";

  if (!a.out.empty()) emit(a.out, json_text, out);
  out << (a.format == "json" ? json_text : report_table(report));
  return kExitOk;
}

struct ProposeArgs {
  int num = 300;
  double sigma2 = 0.01;
  double mu = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_propose(const ProposeArgs& a, std::ostream& out) {
  ProposalConfig cfg;
  cfg.num_proposals = a.num;
  cfg.sigma2 = a.sigma2;
  cfg.mu = a.mu;
  cfg.seed = a.seed;
  emit(a.out, proposals_to_json(generate_proposals(cfg)).dump() + "\n", out);
  return kExitOk;
}

struct AssignArgs {
  std::string input;
  std::optional<int> head;
  std::optional<double> n;
  std::optional<int> heads;
  std::optional<double> lambda_cls, lambda_l1, lambda_giou, lambda_center;
  std::optional<double> center_penalty, lambda_ics;
  bool use_ics = false;
  std::string out;
};

int cmd_assign(const AssignArgs& a, std::ostream& out) {
  AssignInput in = parse_assign_input(read_file(a.input), a.input);
  if (a.n) in.sched.n = *a.n;
  if (a.heads) in.sched.num_heads = *a.heads;
  if (a.lambda_cls) in.cost.lambda_cls = *a.lambda_cls;
  if (a.lambda_l1) in.cost.lambda_l1 = *a.lambda_l1;
  if (a.lambda_giou) in.cost.lambda_giou = *a.lambda_giou;
  if (a.lambda_center) in.cost.lambda_center = *a.lambda_center;
  if (a.center_penalty) in.cost.center_penalty = *a.center_penalty;
  if (a.lambda_ics) in.cost.lambda_ics = *a.lambda_ics;
  if (a.use_ics) in.cost.use_ics = true;
  const std::optional<int> head = a.head ? a.head : in.head_index;
  if (!head) throw InputError("head index missing: pass --head or set head_index");

  const AssignmentResult r = simota_assign(in.gts, in.preds, *head, in.cost, in.sched);
  emit(a.out, assignment_to_json(r, *head).dump(2) + "\n", out);
  return kExitOk;
}

struct FitArgs {
  std::string loss = "giou";
  double lambda = kDefaultIcsLambda;
  int steps = 500;
  double lr = 0.05;
  std::vector<double> init{0.5, 0.5, 0.5, 0.5};
  std::vector<double> target{0.5, 0.5, 1.0, 1.0};
  std::uint64_t seed = 0;
  std::string compare;
  std::string out;
};

void report_fit_summary(const FitTrace& t, std::ostream& err) {
  for (const auto& w : t.warnings) err << "warning: " << w << '\n';
  const auto& last = t.steps.back();
  err << to_string(t.loss_kind) << ": final iou=" << last.iou
      << " gt_coverage=" << last.gt_coverage << " first gt_coverage>=0.95 at step ";
  if (const auto s = t.first_gt_coverage_at(0.95)) {
    err << *s;
  } else {
    err << "never";
  }
  err << '\n';
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  FitConfig cfg;
  cfg.loss_kind = parse_loss_kind(a.loss);
  cfg.lambda = a.lambda;
  cfg.steps = a.steps;
  cfg.learning_rate = a.lr;
  cfg.init_box = box4(a.init, false);
  cfg.target_box = box4(a.target, false);
  cfg.seed = a.seed;
  cfg.validate();

  if (!a.compare.empty()) {
    std::vector<LossKind> kinds;
    for (const auto& k : split(a.compare, ',')) kinds.push_back(parse_loss_kind(k));
    const auto traces = compare_losses(cfg, kinds);
    for (const auto& t : traces) report_fit_summary(t, err);
    emit(a.out, compare_csv(traces), out);
  } else {
    const FitTrace t = fit(cfg);
    report_fit_summary(t, err);
    emit(a.out, trace_csv(t), out);
  }
  return kExitOk;
}

struct ScoreArgs {
  std::vector<double> a;
  std::vector<double> b;
  double lambda = kDefaultIcsLambda;
};

int cmd_score(const ScoreArgs& s, std::ostream& out) {
  const Box gt = box4(s.a, true);
  const Box pred = box4(s.b, true);
  out << overlap_to_json(overlap_report(gt, pred, s.lambda)).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

const char* tool_version() { return DETGEOM_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"detgeom: box overlap measures, label assignment and "
               "detection evaluation"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a prediction file against ground truth");
  eval->add_option("--gt", ev.gt, "Ground-truth dataset (COCO-style JSON)")->required();
  eval->add_option("--pred", ev.pred, "Prediction array JSON")->required();
  eval->add_option("--metric", ev.metric, "Overlap measure: iou or gtc (GT_Coverage)")
      ->check(CLI::IsMember({"iou", "gtc"}))
      ->capture_default_str();
  eval->add_option("--thresholds", ev.thresholds,
                   "Comma-separated thresholds, fractions or percentages")
      ->capture_default_str();
  eval->add_option("--nms", ev.nms, "NMS IoU threshold, or 'off'")->capture_default_str();
  eval->add_option("--score-floor", ev.score_floor,
                   "Discard detections scoring below this value")
      ->capture_default_str();
  eval->add_option("--out", ev.out, "Write the JSON report to this path");
  eval->add_option("--format", ev.format, "Stdout format: table or json")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  eval->add_flag("--ignore-category", ev.ignore_category,
                 "Match detections to ground truth regardless of category");
  eval->add_flag("--allow-empty-gt", ev.allow_empty_gt,
                 "Report zero recall instead of failing on an empty ground-truth set");

  ProposeArgs pr;
  auto* propose = app.add_subcommand("propose", "Emit noise-augmented image-size proposals");
  propose->add_option("--num", pr.num, "Number of proposals")->capture_default_str();
  propose->add_option("--sigma2", pr.sigma2, "Noise variance")->capture_default_str();
  propose->add_option("--mu", pr.mu, "Noise mean")->capture_default_str();
  propose->add_option("--seed", pr.seed, "Generator seed")->capture_default_str();
  propose->add_option("--out", pr.out, "Output path (default stdout)");

  AssignArgs as;
  auto* assign = app.add_subcommand("assign", "Run dynamic-k SimOTA assignment for one head");
  assign->add_option("--input", as.input, "Assignment input JSON")->required();
  assign->add_option("--head", as.head, "Head index t in [1, heads]");
  assign->add_option("--n", as.n, "Schedule hyperparameter n (default 8)");
  assign->add_option("--heads", as.heads, "Number of heads N (default 6)");
  assign->add_option("--lambda-cls", as.lambda_cls, "Classification cost weight (default 2)");
  assign->add_option("--lambda-l1", as.lambda_l1, "L1 cost weight (default 5)");
  assign->add_option("--lambda-giou", as.lambda_giou, "GIoU/ICS cost weight (default 2)");
  assign->add_option("--lambda-center", as.lambda_center, "Center cost weight (default 1)");
  assign->add_option("--center-penalty", as.center_penalty,
                     "Cost for centers outside the ground truth (default 1e5)");
  assign->add_flag("--use-ics", as.use_ics, "Use 1 - ICS instead of 1 - GIoU");
  assign->add_option("--lambda-ics", as.lambda_ics, "ICS mixing weight (default 0.5)");
  assign->add_option("--out", as.out, "Output path (default stdout)");

  FitArgs fa;
  auto* fitc = app.add_subcommand("fit", "Fit a box to a target by gradient descent");
  fitc->add_option("--loss", fa.loss, "iou, giou, ics or l1")
      ->check(CLI::IsMember({"iou", "giou", "ics", "l1"}))
      ->capture_default_str();
  fitc->add_option("--lambda", fa.lambda, "ICS mixing weight")->capture_default_str();
  fitc->add_option("--steps", fa.steps, "Gradient steps")->capture_default_str();
  fitc->add_option("--lr", fa.lr, "Learning rate")->capture_default_str();
  fitc->add_option("--init", fa.init, "Initial box cx cy w h")->expected(4);
  fitc->add_option("--target", fa.target, "Target box cx cy w h")->expected(4);
  fitc->add_option("--seed", fa.seed, "Recorded seed")->capture_default_str();
  fitc->add_option("--compare", fa.compare, "Comma-separated losses to run side by side");
  fitc->add_option("--out", fa.out, "CSV output path (default stdout)");

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Overlap measures for two corner-form boxes");
  score->add_option("--a", sc.a, "Ground-truth box x1 y1 x2 y2")->expected(4)->required();
  score->add_option("--b", sc.b, "Prediction box x1 y1 x2 y2")->expected(4)->required();
  score->add_option("--lambda", sc.lambda, "ICS mixing weight")->capture_default_str();

  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  if (storage.empty()) storage.emplace_back("detgeom");
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*eval) return cmd_eval(ev, out);
    if (*propose) return cmd_propose(pr, out);
    if (*assign) return cmd_assign(as, out);
    if (*fitc) return cmd_fit(fa, out, err);
    if (*score) return cmd_score(sc, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const FitError& e) {
    err << "error: " << e.what() << '\n' << trace_csv(e.trace());
    return kExitDomainError;
  }
  return kExitInputError;
}

}  // namespace detgeom::cli
