// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/formats.hpp"
#include "cli/located_json.hpp"

namespace detgeom::cli {
namespace {

using nlohmann::json;

std::string fixture(const std::string& name) {
  return std::string(DETGEOM_FIXTURE_DIR) + "/" + name;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "detgeom");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

Result eval_json(const std::string& gt, const std::string& pred,
                 std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"eval", "--gt", fixture(gt), "--pred", fixture(pred),
                                "--format", "json"};
  args.insert(args.end(), extra.begin(), extra.end());
  return invoke(args);
}

TEST(CliEvalTest, PerfectPredictions) {
  const auto r = eval_json("perfect_gt.json", "perfect_pred.json");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["weighted_avg_f1"].get<double>(), 100.0);
  EXPECT_EQ(report["tool_version"], tool_version());
}

TEST(CliEvalTest, GoldenLayout) {
  // The golden file pins key order, number formatting and input hashes.
  const auto r = eval_json("perfect_gt.json", "perfect_pred.json");
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, read_file(fixture("golden_perfect_report.json")));
}

TEST(CliEvalTest, WritesReportFile) {
  const auto path = std::filesystem::temp_directory_path() / "detgeom_cli_report.json";
  const auto r = invoke({"eval", "--gt", fixture("perfect_gt.json"), "--pred",
                         fixture("perfect_pred.json"), "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Weighted Average F1"), std::string::npos);
  EXPECT_EQ(read_file(path.string()), read_file(fixture("golden_perfect_report.json")));
  std::filesystem::remove(path);
}

TEST(CliEvalTest, Deterministic) {
  const auto a = eval_json("perfect_gt.json", "perfect_pred.json", {"--metric", "gtc"});
  const auto b = eval_json("perfect_gt.json", "perfect_pred.json", {"--metric", "gtc"});
  EXPECT_EQ(a.out, b.out);
}

TEST(CliEvalTest, CoveringVsCroppingFlip) {
  auto f1 = [](const std::string& pred, const std::string& metric) {
    const auto r = eval_json("flip_gt.json", pred, {"--metric", metric, "--thresholds", "0.8"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return json::parse(r.out)["per_threshold"][0];
  };
  const auto iou_cov = f1("flip_covering.json", "iou");
  const auto iou_crop = f1("flip_cropping.json", "iou");
  const auto gtc_cov = f1("flip_covering.json", "gtc");
  EXPECT_EQ(iou_cov["fp"], 1);
  EXPECT_EQ(iou_cov["f1"].get<double>(), 0.0);
  EXPECT_EQ(iou_crop["tp"], 1);
  EXPECT_EQ(gtc_cov["tp"], 1);
  EXPECT_EQ(gtc_cov["f1"].get<double>(), 100.0);
}

TEST(CliEvalTest, ThresholdsAsFractionOrPercent) {
  const auto half = eval_json("flip_gt.json", "flip_covering.json", {"--thresholds", "0.5"});
  ASSERT_EQ(half.code, kExitOk) << half.err;
  EXPECT_EQ(json::parse(half.out)["weighted_avg_f1"].get<double>(), 100.0);

  const auto pct = eval_json("perfect_gt.json", "perfect_pred.json", {"--thresholds", "60,70"});
  const auto frac = eval_json("perfect_gt.json", "perfect_pred.json", {"--thresholds", "0.6,0.7"});
  ASSERT_EQ(pct.code, kExitOk) << pct.err;
  EXPECT_EQ(pct.out, frac.out);
  EXPECT_EQ(json::parse(pct.out)["thresholds"], json::parse("[0.6, 0.7]"));

  EXPECT_EQ(eval_json("perfect_gt.json", "perfect_pred.json", {"--thresholds", "0.7,0.6"}).code,
            kExitInputError);
}

TEST(CliEvalTest, NmsOff) {
  const auto r = eval_json("perfect_gt.json", "perfect_pred.json", {"--nms", "off"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(json::parse(r.out)["nms_threshold"].is_null());
}

TEST(CliEvalTest, MalformedJsonHasLineNumber) {
  const auto r = eval_json("malformed.json", "perfect_pred.json");
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("malformed.json:3:"), std::string::npos) << r.err;
}

TEST(CliEvalTest, SchemaErrorHasLineNumber) {
  const auto r = eval_json("schema_error.json", "perfect_pred.json");
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("schema_error.json:5:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("/annotations/1/bbox"), std::string::npos) << r.err;
}

TEST(CliEvalTest, UnknownFlagAndMissingFile) {
  EXPECT_EQ(invoke({"eval", "--gt", fixture("perfect_gt.json"), "--pred",
                    fixture("perfect_pred.json"), "--frobnicate"})
                .code,
            kExitInputError);
  EXPECT_EQ(eval_json("does_not_exist.json", "perfect_pred.json").code, kExitInputError);
  EXPECT_EQ(invoke({}).code, kExitInputError);
  EXPECT_EQ(invoke({"bogus"}).code, kExitInputError);
}

TEST(CliEvalTest, EmptyGroundTruth) {
  EXPECT_EQ(eval_json("empty_gt.json", "empty_pred.json").code, kExitDomainError);
  const auto r = eval_json("empty_gt.json", "empty_pred.json", {"--allow-empty-gt"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(CliFormatsTest, RoundTrip) {
  for (const char* name : {"perfect_gt.json", "flip_gt.json", "empty_gt.json"}) {
    const std::string text = read_file(fixture(name));
    const DatasetFile once = parse_dataset(text, name);
    const DatasetFile twice = parse_dataset(dataset_to_json(once).dump(2), name);
    EXPECT_EQ(once, twice) << name;
    EXPECT_EQ(json::parse(text), json::parse(dataset_to_json(once).dump())) << name;
  }
  const std::vector<std::pair<std::string, std::string>> pred_files{
      {"perfect_pred.json", "perfect_gt.json"},
      {"flip_covering.json", "flip_gt.json"},
      {"flip_cropping.json", "flip_gt.json"}};
  for (const auto& [name, gt_name] : pred_files) {
    const DatasetFile ds = parse_dataset(read_file(fixture(gt_name)), gt_name);
    const std::string text = read_file(fixture(name));
    const auto once = parse_predictions(text, name, ds);
    const auto twice = parse_predictions(predictions_to_json(once).dump(2), name, ds);
    EXPECT_EQ(predictions_to_json(once), predictions_to_json(twice)) << name;
    EXPECT_EQ(json::parse(text), json::parse(predictions_to_json(once).dump())) << name;
  }
}

TEST(CliProposeTest, DeterministicAndContained) {
  const auto a = invoke({"propose", "--seed", "7"});
  const auto b = invoke({"propose", "--seed", "7"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json boxes = json::parse(a.out);
  ASSERT_EQ(boxes.size(), 300u);
  for (const auto& box : boxes) {
    EXPECT_GE(box[0].get<double>(), 0.0);
    EXPECT_GE(box[1].get<double>(), 0.0);
    EXPECT_LE(box[2].get<double>(), 1.0);
    EXPECT_LE(box[3].get<double>(), 1.0);
  }
  EXPECT_NE(invoke({"propose", "--seed", "8"}).out, a.out);
}

TEST(CliProposeTest, ZeroAndNegativeVariance) {
  const auto r = invoke({"propose", "--sigma2", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json boxes = json::parse(r.out);
  ASSERT_EQ(boxes.size(), 300u);
  for (const auto& box : boxes) EXPECT_EQ(box, json::parse("[0.0, 0.0, 1.0, 1.0]"));
  EXPECT_EQ(invoke({"propose", "--sigma2", "-0.01"}).code, kExitInputError);
}

TEST(CliAssignTest, PerfectPair) {
  const auto r = invoke({"assign", "--input", fixture("assign_perfect.json"), "--head", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json out = json::parse(r.out);
  ASSERT_EQ(out["positives"].size(), 1u);
  EXPECT_EQ(out["positives"][0]["pred"], 0);
  EXPECT_TRUE(out["negatives"].empty());
}

TEST(CliAssignTest, TenCandidates) {
  const auto r = invoke({"assign", "--input", fixture("assign_ten.json"), "--head", "6"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json out = json::parse(r.out);
  EXPECT_EQ(out["k_per_gt"], json::parse("[4]"));
  const auto t1 = json::parse(
      invoke({"assign", "--input", fixture("assign_ten.json"), "--head", "1"}).out);
  EXPECT_EQ(t1["k_per_gt"], json::parse("[3]"));
}

TEST(CliAssignTest, UseIcsKeepsSchema) {
  const auto plain =
      json::parse(invoke({"assign", "--input", fixture("assign_ten.json"), "--head", "6"}).out);
  const auto with_ics = json::parse(
      invoke({"assign", "--input", fixture("assign_ten.json"), "--head", "6", "--use-ics"}).out);
  std::vector<std::string> keys_a, keys_b;
  for (const auto& [k, v] : plain.items()) keys_a.push_back(k);
  for (const auto& [k, v] : with_ics.items()) keys_b.push_back(k);
  EXPECT_EQ(keys_a, keys_b);
  EXPECT_NE(plain["positives"][0]["cost"], with_ics["positives"][0]["cost"]);
}

TEST(CliAssignTest, HeadOutOfRange) {
  EXPECT_EQ(invoke({"assign", "--input", fixture("assign_ten.json"), "--head", "7"}).code,
            kExitInputError);
  EXPECT_EQ(invoke({"assign", "--input", fixture("assign_ten.json"), "--head", "0"}).code,
            kExitInputError);
}

TEST(CliFitTest, ConstantTraceAtTarget) {
  const auto r = invoke({"fit", "--init", "0.5", "0.5", "1", "1", "--steps", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "step,cx,cy,w,h,loss,iou,gt_coverage,pred_coverage");
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.substr(line.find(',')), ",0.5,0.5,1,1,0,1,1,1");
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST(CliFitTest, CompareAndErrors) {
  const auto r = invoke({"fit", "--compare", "giou,ics", "--steps", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string header = r.out.substr(0, r.out.find('\n'));
  EXPECT_NE(header.find("giou_iou"), std::string::npos);
  EXPECT_NE(header.find("ics_gt_coverage"), std::string::npos);
  EXPECT_EQ(invoke({"fit", "--target", "0.5", "0.5", "0", "1"}).code, kExitInputError);
  EXPECT_EQ(invoke({"fit", "--loss", "mse"}).code, kExitInputError);
  EXPECT_EQ(invoke({"fit"}).out, invoke({"fit"}).out);
}

TEST(CliScoreTest, Outputs) {
  const auto same = json::parse(invoke({"score", "--a", "0", "0", "1", "1", "--b", "0", "0", "1", "1"}).out);
  for (const char* k : {"iou", "gt_coverage", "pred_coverage", "ics", "giou"}) {
    EXPECT_EQ(same[k].get<double>(), 1.0) << k;
  }
  const auto covering = json::parse(
      invoke({"score", "--a", "0", "0", "1", "1", "--b", "-0.07", "-0.07", "1.07", "1.07"}).out);
  EXPECT_NEAR(covering["iou"].get<double>(), 0.77, 0.005);
  EXPECT_EQ(covering["gt_coverage"].get<double>(), 1.0);
  const auto disjoint =
      json::parse(invoke({"score", "--a", "0", "0", "1", "1", "--b", "2", "2", "3", "3"}).out);
  EXPECT_EQ(disjoint["iou"].get<double>(), 0.0);
  EXPECT_EQ(disjoint["ics"].get<double>(), 0.0);
  EXPECT_LT(disjoint["giou"].get<double>(), 0.0);
  EXPECT_EQ(invoke({"score", "--a", "0", "0", "0", "1", "--b", "0", "0", "1", "1"}).code,
            kExitInputError);
}

}  // namespace
}  // namespace detgeom::cli
