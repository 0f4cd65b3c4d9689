#include "core/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/image.hpp"

namespace rainsd {

namespace {

using nlohmann::json;

void validate_box(const Box& b) {
  if (!(b.x1 < b.x2) || !(b.y1 < b.y2)) {
    throw Error::invalid("box must satisfy x1 < x2 and y1 < y2");
  }
}

double area(const Box& b) { return (b.x2 - b.x1) * (b.y2 - b.y1); }

}  // namespace

double iou(const Box& a, const Box& b) {
  validate_box(a);
  validate_box(b);
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  return inter / (area(a) + area(b) - inter);
}

DetectionMetrics detection_metrics(const std::vector<DetectionRecord>& preds,
                                   const std::vector<DetectionRecord>& gts,
                                   double iou_threshold) {
  for (const auto& p : preds) {
    validate_box(p.box);
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw Error::invalid("prediction score must lie in [0, 1]");
    }
  }
  for (const auto& g : gts) validate_box(g.box);

  DetectionMetrics out;
  if (gts.empty()) return out;  // recall/mAP undefined, flags stay false

  // Ground truth grouped by (image, class); values index into gts.
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> gt_groups;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    gt_groups[{gts[i].image_id, gts[i].class_id}].push_back(i);
  }

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score > preds[b].score;
  });

  std::vector<bool> gt_matched(gts.size(), false);
  std::vector<bool> pred_is_tp(preds.size(), false);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto& p = preds[order[rank]];
    const auto group = gt_groups.find({p.image_id, p.class_id});
    if (group == gt_groups.end()) continue;
    double best_iou = 0.0;
    std::size_t best_gt = gts.size();
    for (std::size_t gi : group->second) {
      if (gt_matched[gi]) continue;
      const double v = iou(p.box, gts[gi].box);
      if (v > best_iou) {
        best_iou = v;
        best_gt = gi;
      }
    }
    if (best_gt < gts.size() && best_iou >= iou_threshold) {
      gt_matched[best_gt] = true;
      pred_is_tp[order[rank]] = true;
    }
  }

  const auto total_tp = static_cast<double>(
      std::count(gt_matched.begin(), gt_matched.end(), true));
  out.recall_pct = 100.0 * total_tp / static_cast<double>(gts.size());
  out.recall_defined = true;

  // Per-class average precision over the score-descending prediction order.
  std::map<int, std::size_t> gt_per_class;
  for (const auto& g : gts) ++gt_per_class[g.class_id];

  double ap_sum = 0.0;
  for (const auto& [cls, n_gt] : gt_per_class) {
    std::vector<bool> tp_flags;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      if (preds[order[rank]].class_id != cls) continue;
      tp_flags.push_back(pred_is_tp[order[rank]]);
    }
    std::vector<double> precision, recall;
    double tp = 0.0, fp = 0.0;
    for (bool is_tp : tp_flags) {
      (is_tp ? tp : fp) += 1.0;
      precision.push_back(tp / (tp + fp));
      recall.push_back(tp / static_cast<double>(n_gt));
    }
    // Precision envelope, then the all-point interpolated area.
    for (std::size_t i = precision.size(); i-- > 1;) {
      precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double ap = 0.0, prev_recall = 0.0;
    for (std::size_t i = 0; i < precision.size(); ++i) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
    ap_sum += ap;
  }
  out.map_pct = 100.0 * ap_sum / static_cast<double>(gt_per_class.size());
  out.map_defined = true;
  return out;
}

SegmentationMetrics segmentation_metrics(const std::vector<MaskRecord>& preds,
                                         const std::vector<MaskRecord>& gts,
                                         int num_classes) {
  if (preds.size() != gts.size() || preds.empty()) {
    throw Error::invalid("segmentation_metrics: prediction/ground-truth image counts "
                         "must match and be non-empty");
  }
  std::map<std::string, const MaskRecord*> gt_by_id;
  for (const auto& g : gts) {
    if (!gt_by_id.emplace(g.image_id, &g).second) {
      throw Error::invalid("duplicate ground-truth mask id '" + g.image_id + "'");
    }
  }

  if (num_classes == 0) {
    std::uint8_t max_label = 0;
    for (const auto* list : {&preds, &gts}) {
      for (const auto& m : *list) {
        for (std::uint8_t v : m.labels) max_label = std::max(max_label, v);
      }
    }
    num_classes = static_cast<int>(max_label) + 1;
  }

  const auto n = static_cast<std::size_t>(num_classes);
  std::vector<std::uint64_t> confusion(n * n, 0);  // [gt * n + pred]
  for (const auto& p : preds) {
    const auto it = gt_by_id.find(p.image_id);
    if (it == gt_by_id.end()) {
      throw Error::invalid("no ground-truth mask for image '" + p.image_id + "'");
    }
    const MaskRecord& g = *it->second;
    if (p.width != g.width || p.height != g.height) {
      throw Error::invalid("mask shape mismatch for image '" + p.image_id + "'");
    }
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
      if (p.labels[i] >= num_classes || g.labels[i] >= num_classes) {
        throw Error::invalid("mask label exceeds class count in image '" + p.image_id +
                             "'");
      }
      ++confusion[static_cast<std::size_t>(g.labels[i]) * n + p.labels[i]];
    }
  }

  std::uint64_t total = 0, correct = 0;
  for (std::size_t c = 0; c < n; ++c) correct += confusion[c * n + c];
  for (std::uint64_t v : confusion) total += v;

  double iou_sum = 0.0;
  std::size_t iou_classes = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t k = 0; k < n; ++k) {
      row += confusion[c * n + k];
      col += confusion[k * n + c];
    }
    const std::uint64_t tp = confusion[c * n + c];
    const std::uint64_t denom = row + col - tp;
    if (denom == 0) continue;  // class absent everywhere
    iou_sum += static_cast<double>(tp) / static_cast<double>(denom);
    ++iou_classes;
  }

  SegmentationMetrics out;
  out.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  out.miou_pct = iou_classes == 0 ? 0.0 : 100.0 * iou_sum / static_cast<double>(iou_classes);
  return out;
}

std::vector<DetectionRecord> read_detections(const std::filesystem::path& path,
                                             bool with_score) {
  std::ifstream in(path);
  if (!in) throw Error::io("cannot open " + path.string());
  std::vector<DetectionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json record = json::parse(line);
      DetectionRecord r;
      r.image_id = record.at("image_id").get<std::string>();
      r.class_id = record.at("class_id").get<int>();
      const auto& box = record.at("box");
      if (!box.is_array() || box.size() != 4) {
        throw Error::format("'box' must be [x1, y1, x2, y2]");
      }
      r.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
               box[3].get<double>()};
      validate_box(r.box);
      if (with_score) {
        r.score = record.at("score").get<double>();
        if (r.score < 0.0 || r.score > 1.0) {
          throw Error::format("score must lie in [0, 1]");
        }
      }
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error::format(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<MaskRecord> read_mask_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error::io("mask directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (ext == ".png" || ext == ".ppm") files.push_back(entry.path());
  }
  if (files.empty()) throw Error::io("no .png/.ppm masks in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<MaskRecord> records;
  records.reserve(files.size());
  for (const auto& file : files) {
    const ImageBuffer img = load_image(file);
    MaskRecord m;
    m.image_id = file.stem().string();
    m.width = img.width();
    m.height = img.height();
    m.labels.reserve(static_cast<std::size_t>(m.width) * m.height);
    for (int y = 0; y < m.height; ++y) {
      for (int x = 0; x < m.width; ++x) m.labels.push_back(img.pixel(x, y).r);
    }
    records.push_back(std::move(m));
  }
  return records;
}

}  // namespace rainsd
