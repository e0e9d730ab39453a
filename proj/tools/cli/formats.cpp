// SPDX-License-Identifier: Apache-2.0
#include "cli/formats.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <openssl/evp.h>

#include "cli/located_json.hpp"
#include "detgeom/error.hpp"

namespace detgeom::cli {

namespace {

using nlohmann::json;

// Typed accessors that report failures against the source location.
class Reader {
 public:
  explicit Reader(const LocatedJson& src) : src_(src) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    throw InputError(src_.diagnostic(ptr, msg));
  }

  const json& at(const std::string& ptr) const {
    return src_.doc.at(json::json_pointer(ptr));
  }

  bool has(const std::string& ptr) const {
    return src_.doc.contains(json::json_pointer(ptr));
  }

  const json& require(const std::string& ptr) const {
    if (!has(ptr)) fail(ptr, "missing required field");
    return at(ptr);
  }

  const json& array(const std::string& ptr) const {
    const json& v = require(ptr);
    if (!v.is_array()) fail(ptr, "expected an array");
    return v;
  }

  const json& object(const std::string& ptr) const {
    const json& v = require(ptr);
    if (!v.is_object()) fail(ptr, "expected an object");
    return v;
  }

  std::int64_t integer(const std::string& ptr) const {
    const json& v = require(ptr);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && std::floor(d) == d) return static_cast<std::int64_t>(d);
    }
    fail(ptr, "expected an integer");
  }

  double number(const std::string& ptr) const {
    const json& v = require(ptr);
    if (!v.is_number()) fail(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, "expected a finite number");
    return d;
  }

  bool boolean(const std::string& ptr) const {
    const json& v = require(ptr);
    if (!v.is_boolean()) fail(ptr, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& ptr) const {
    const json& v = require(ptr);
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  std::array<double, 4> quad(const std::string& ptr) const {
    const json& v = array(ptr);
    if (v.size() != 4) fail(ptr, "expected exactly 4 numbers");
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) out[i] = number(ptr + "/" + std::to_string(i));
    return out;
  }

  std::vector<double> numbers(const std::string& ptr) const {
    const json& v = array(ptr);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(number(ptr + "/" + std::to_string(i)));
    }
    return out;
  }

 private:
  const LocatedJson& src_;
};

std::string item(const std::string& base, std::size_t i) {
  return base + "/" + std::to_string(i);
}

Box corner_box(const Reader& r, const std::string& ptr) {
  const auto q = r.quad(ptr);
  if (!(q[2] > q[0] && q[3] > q[1])) {
    r.fail(ptr, "box must satisfy x2 > x1 and y2 > y1");
  }
  return Box::from_corners(q[0], q[1], q[2], q[3]);
}

ordered_json quad_json(const std::array<double, 4>& q) {
  return ordered_json::array({q[0], q[1], q[2], q[3]});
}

}  // namespace

const ImageInfo* DatasetFile::find_image(std::int64_t id) const {
  for (const auto& im : images) {
    if (im.id == id) return &im;
  }
  return nullptr;
}

DatasetFile parse_dataset(const std::string& text, const std::string& source) {
  const LocatedJson src = parse_located(text, source);
  const Reader r(src);
  if (!src.doc.is_object()) r.fail("", "dataset must be a JSON object");

  DatasetFile ds;
  std::unordered_set<std::int64_t> image_ids;
  const json& images = r.array("/images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string p = item("/images", i);
    r.object(p);
    ImageInfo im;
    im.id = r.integer(p + "/id");
    im.width = r.number(p + "/width");
    im.height = r.number(p + "/height");
    if (!(im.width > 0.0 && im.height > 0.0)) {
      r.fail(p, "image width and height must be positive");
    }
    if (r.has(p + "/file_name")) im.file_name = r.string(p + "/file_name");
    if (!image_ids.insert(im.id).second) r.fail(p + "/id", "duplicate image id");
    ds.images.push_back(std::move(im));
  }

  const json& anns = r.array("/annotations");
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const std::string p = item("/annotations", i);
    r.object(p);
    Annotation a;
    a.id = r.integer(p + "/id");
    a.image_id = r.integer(p + "/image_id");
    a.category_id = r.integer(p + "/category_id");
    a.bbox = r.quad(p + "/bbox");
    if (!(a.bbox[2] > 0.0 && a.bbox[3] > 0.0)) {
      r.fail(p + "/bbox", "bbox width and height must be positive");
    }
    if (!image_ids.contains(a.image_id)) {
      r.fail(p + "/image_id", "unknown image id " + std::to_string(a.image_id));
    }
    ds.annotations.push_back(a);
  }

  if (r.has("/categories")) {
    const json& cats = r.array("/categories");
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const std::string p = item("/categories", i);
      r.object(p);
      Category c;
      c.id = r.integer(p + "/id");
      c.name = r.has(p + "/name") ? r.string(p + "/name") : std::string{};
      ds.categories.push_back(std::move(c));
    }
  }
  return ds;
}

ordered_json dataset_to_json(const DatasetFile& ds) {
  ordered_json out;
  out["images"] = ordered_json::array();
  for (const auto& im : ds.images) {
    ordered_json j;
    j["id"] = im.id;
    j["width"] = im.width;
    j["height"] = im.height;
    if (im.file_name) j["file_name"] = *im.file_name;
    out["images"].push_back(std::move(j));
  }
  out["annotations"] = ordered_json::array();
  for (const auto& a : ds.annotations) {
    ordered_json j;
    j["id"] = a.id;
    j["image_id"] = a.image_id;
    j["category_id"] = a.category_id;
    j["bbox"] = quad_json(a.bbox);
    out["annotations"].push_back(std::move(j));
  }
  out["categories"] = ordered_json::array();
  for (const auto& c : ds.categories) {
    out["categories"].push_back(ordered_json{{"id", c.id}, {"name", c.name}});
  }
  return out;
}

std::vector<PredictionRecord> parse_predictions(const std::string& text,
                                                const std::string& source,
                                                const DatasetFile& ds) {
  const LocatedJson src = parse_located(text, source);
  const Reader r(src);
  if (!src.doc.is_array()) r.fail("", "predictions must be a JSON array");

  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < src.doc.size(); ++i) {
    const std::string p = item("", i);
    r.object(p);
    PredictionRecord rec;
    rec.image_id = r.integer(p + "/image_id");
    rec.category_id = r.integer(p + "/category_id");
    rec.bbox = r.quad(p + "/bbox");
    rec.score = r.number(p + "/score");
    if (!(rec.bbox[2] > 0.0 && rec.bbox[3] > 0.0)) {
      r.fail(p + "/bbox", "bbox width and height must be positive");
    }
    if (!(rec.score >= 0.0 && rec.score <= 1.0)) {
      r.fail(p + "/score", "score must lie in [0, 1]");
    }
    if (ds.find_image(rec.image_id) == nullptr) {
      r.fail(p + "/image_id", "image id " + std::to_string(rec.image_id) +
                                  " does not exist in the ground-truth file");
    }
    out.push_back(rec);
  }
  return out;
}

ordered_json predictions_to_json(const std::vector<PredictionRecord>& preds) {
  ordered_json out = ordered_json::array();
  for (const auto& p : preds) {
    ordered_json j;
    j["image_id"] = p.image_id;
    j["category_id"] = p.category_id;
    j["bbox"] = quad_json(p.bbox);
    j["score"] = p.score;
    out.push_back(std::move(j));
  }
  return out;
}

Box normalize(const PixelBox& b, const ImageInfo& image) {
  return Box{(b[0] + 0.5 * b[2]) / image.width, (b[1] + 0.5 * b[3]) / image.height,
             b[2] / image.width, b[3] / image.height};
}

std::vector<GroundTruth> to_ground_truths(const DatasetFile& ds) {
  std::vector<GroundTruth> out;
  out.reserve(ds.annotations.size());
  for (const auto& a : ds.annotations) {
    const ImageInfo* im = ds.find_image(a.image_id);
    if (im == nullptr) throw InputError("annotation references unknown image");
    out.push_back({a.image_id, normalize(a.bbox, *im), a.category_id});
  }
  return out;
}

std::vector<Detection> to_detections(const std::vector<PredictionRecord>& preds,
                                     const DatasetFile& ds) {
  std::vector<Detection> out;
  out.reserve(preds.size());
  for (const auto& p : preds) {
    const ImageInfo* im = ds.find_image(p.image_id);
    if (im == nullptr) throw InputError("prediction references unknown image");
    out.push_back({p.image_id, normalize(p.bbox, *im), p.category_id, p.score});
  }
  return out;
}

ordered_json report_to_json(const EvalReport& report, const ReportMetadata& meta) {
  ordered_json out;
  out["tool_version"] = meta.tool_version;
  out["metric_kind"] = to_string(report.metric_kind);
  out["thresholds"] = report.thresholds;
  out["nms_threshold"] =
      meta.nms_threshold ? ordered_json(*meta.nms_threshold) : ordered_json(nullptr);
  out["score_floor"] = meta.score_floor;
  out["ignore_category"] = meta.ignore_category;
  out["input_hashes"] = ordered_json{{"gt", meta.gt_hash}, {"pred", meta.pred_hash}};
  out["per_threshold"] = ordered_json::array();
  for (const auto& t : report.per_threshold) {
    ordered_json j;
    j["threshold"] = t.threshold;
    j["tp"] = t.tp;
    j["fp"] = t.fp;
    j["fn"] = t.fn;
    j["precision"] = t.precision;
    j["recall"] = t.recall;
    j["f1"] = t.f1;
    out["per_threshold"].push_back(std::move(j));
  }
  out["weighted_avg_f1"] = report.weighted_avg_f1;
  return out;
}

std::string report_table(const EvalReport& report) {
  const std::string measure =
      report.metric_kind == MetricKind::kIoU ? "IoU" : "GT_Coverage";
  auto label = [&](double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s(%g%%)", measure.c_str(), t * 100.0);
    return std::string(buf);
  };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::left << std::setw(20) << "Threshold" << std::right << std::setw(8)
     << "TP" << std::setw(8) << "FP" << std::setw(8) << "FN" << std::setw(11)
     << "Precision" << std::setw(9) << "Recall" << std::setw(9) << "F1" << '\n';
  for (const auto& t : report.per_threshold) {
    os << std::left << std::setw(20) << label(t.threshold) << std::right
       << std::setw(8) << t.tp << std::setw(8) << t.fp << std::setw(8) << t.fn
       << std::setw(11) << t.precision << std::setw(9) << t.recall
       << std::setw(9) << t.f1 << '\n';
  }
  os << '\n' << std::left << std::setw(8) << "";
  for (const auto& t : report.per_threshold) {
    os << std::right << std::setw(20) << label(t.threshold);
  }
  os << std::setw(22) << "Weighted Average F1" << '\n';
  os << std::left << std::setw(8) << "F1" << std::setprecision(1);
  for (const auto& t : report.per_threshold) os << std::right << std::setw(20) << t.f1;
  os << std::setw(22) << report.weighted_avg_f1 << '\n';
  return os.str();
}

ordered_json overlap_to_json(const OverlapReport& r) {
  ordered_json out;
  out["intersection"] = r.intersection;
  out["union"] = r.union_;
  out["iou"] = r.iou;
  out["gt_coverage"] = r.gt_coverage;
  out["pred_coverage"] = r.pred_coverage;
  out["ics"] = r.ics;
  out["giou"] = r.giou;
  return out;
}

ordered_json proposals_to_json(const std::vector<Box>& boxes) {
  ordered_json out = ordered_json::array();
  for (const auto& b : boxes) {
    const Corners c = b.corners();
    out.push_back(ordered_json::array({c.x1, c.y1, c.x2, c.y2}));
  }
  return out;
}

AssignInput parse_assign_input(const std::string& text, const std::string& source) {
  const LocatedJson src = parse_located(text, source);
  const Reader r(src);
  if (!src.doc.is_object()) r.fail("", "assignment input must be a JSON object");

  AssignInput in;
  const json& gts = r.array("/gts");
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const std::string p = item("/gts", i);
    r.object(p);
    LabeledBox g;
    g.box = corner_box(r, p + "/box");
    g.category = r.has(p + "/category") ? static_cast<int>(r.integer(p + "/category")) : 0;
    if (g.category < 0) r.fail(p + "/category", "category must be non-negative");
    in.gts.push_back(g);
  }
  const json& preds = r.array("/preds");
  for (std::size_t j = 0; j < preds.size(); ++j) {
    const std::string p = item("/preds", j);
    r.object(p);
    ScoredPrediction sp;
    sp.box = corner_box(r, p + "/box");
    sp.probs = r.numbers(p + "/probs");
    for (std::size_t c = 0; c < sp.probs.size(); ++c) {
      if (!(sp.probs[c] >= 0.0 && sp.probs[c] <= 1.0)) {
        r.fail(p + "/probs/" + std::to_string(c), "probability must lie in [0, 1]");
      }
    }
    in.preds.push_back(std::move(sp));
  }
  for (std::size_t i = 0; i < in.gts.size(); ++i) {
    for (std::size_t j = 0; j < in.preds.size(); ++j) {
      if (static_cast<std::size_t>(in.gts[i].category) >= in.preds[j].probs.size()) {
        r.fail(item("/preds", j) + "/probs",
               "no probability for ground-truth category " +
                   std::to_string(in.gts[i].category));
      }
    }
  }
  if (r.has("/head_index")) in.head_index = static_cast<int>(r.integer("/head_index"));

  if (r.has("/config")) {
    r.object("/config");
    auto opt_num = [&](const char* key, double& dst) {
      const std::string p = std::string("/config/") + key;
      if (r.has(p)) dst = r.number(p);
    };
    opt_num("lambda_cls", in.cost.lambda_cls);
    opt_num("lambda_l1", in.cost.lambda_l1);
    opt_num("lambda_giou", in.cost.lambda_giou);
    opt_num("lambda_center", in.cost.lambda_center);
    opt_num("center_penalty", in.cost.center_penalty);
    opt_num("lambda_ics", in.cost.lambda_ics);
    opt_num("n", in.sched.n);
    if (r.has("/config/use_ics")) in.cost.use_ics = r.boolean("/config/use_ics");
    if (r.has("/config/num_heads")) {
      in.sched.num_heads = static_cast<int>(r.integer("/config/num_heads"));
    }
  }
  return in;
}

ordered_json assignment_to_json(const AssignmentResult& r, int head_index) {
  ordered_json out;
  out["head_index"] = head_index;
  out["k_per_gt"] = r.k_per_gt;
  out["positives"] = ordered_json::array();
  for (const auto& p : r.positives) {
    out["positives"].push_back(
        ordered_json{{"pred", p.pred}, {"gt", p.gt}, {"cost", p.cost}});
  }
  out["negatives"] = r.negatives;
  out["fallback_gts"] = r.fallback_gts;
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

}  // namespace detgeom::cli
