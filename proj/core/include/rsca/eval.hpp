#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsca/geometry.hpp"
#include "rsca/postproc.hpp"

namespace rsca {

/// Area of intersection over area of union; 0 for degenerate input.
double polygon_iou(const Polygon& a, const Polygon& b);

struct GroundTruth {
  Polygon polygon;
  bool ignore = false;
};

struct PairIoU {
  std::size_t detection = 0;
  std::size_t truth = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<PairIoU> matches;  ///< accepted one-to-one pairs
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;

  /// Recomputes precision, recall and F from the counts.
  void update_scores();
};

/// Greedy one-to-one matching by descending IoU against non-ignored truths;
/// pairs at or above iou_thresh are true positives. Unmatched detections
/// that reach iou_thresh with an ignored truth are dropped rather than
/// counted as false positives. Unmatched non-ignored truths are misses.
MatchResult match(std::span<const Detection> dets, std::span<const GroundTruth> truths, double iou_thresh = 0.5);

/// Micro-average: sums tp / fp / fn, then recomputes the scores.
MatchResult aggregate(std::span<const MatchResult> per_image);

}  // namespace rsca
