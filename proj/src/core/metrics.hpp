#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rainsd {

struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // x1 < x2, y1 < y2
};

struct DetectionRecord {
  std::string image_id;
  int class_id = 0;
  Box box;
  double score = 0.0;  // predictions only
};

/// H x W small-integer class labels for one image.
struct MaskRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;  // row-major
};

/// Intersection over union of two boxes, in [0, 1].
double iou(const Box& a, const Box& b);

struct DetectionMetrics {
  double recall_pct = 0.0;
  double map_pct = 0.0;
  bool recall_defined = false;  // false on an empty ground-truth set
  bool map_defined = false;
};

/// Greedy score-descending matching (ties broken by input order), one match
/// per ground-truth box, TP iff IoU >= threshold with the class matching.
/// Recall pools every ground-truth box; AP uses all-point interpolation of
/// the precision envelope per class, averaged over classes present in the
/// ground truth.
DetectionMetrics detection_metrics(const std::vector<DetectionRecord>& preds,
                                   const std::vector<DetectionRecord>& gts,
                                   double iou_threshold = 0.5);

struct SegmentationMetrics {
  double miou_pct = 0.0;
  double accuracy_pct = 0.0;
};

/// Pixels pool across images (pairs matched by image_id). Per-class
/// IoU = TP / (TP + FP + FN); mIoU averages classes that occur in either
/// prediction or ground truth; accuracy = correct / total.
/// num_classes 0 infers max label + 1 from the data.
SegmentationMetrics segmentation_metrics(const std::vector<MaskRecord>& preds,
                                         const std::vector<MaskRecord>& gts,
                                         int num_classes = 0);

/// Line-delimited JSON records:
///   {"image_id": "a", "class_id": 1, "box": [x1,y1,x2,y2], "score": 0.9}
/// Predictions require a score; ground truth must not carry one.
std::vector<DetectionRecord> read_detections(const std::filesystem::path& path,
                                             bool with_score);

/// Loads every PNG/PPM label image in a directory; the red channel is the
/// class label and the file stem is the image id.
std::vector<MaskRecord> read_mask_dir(const std::filesystem::path& dir);

}  // namespace rainsd
