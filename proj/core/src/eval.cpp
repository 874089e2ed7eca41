#include "rsca/eval.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "rsca/errors.hpp"
#include "rsca/polyclip.hpp"

namespace rsca {

double polygon_iou(const Polygon& a, const Polygon& b) {
  const double aa = area(a);
  const double ab = area(b);
  if (aa <= 0.0 || ab <= 0.0) return 0.0;
  const Ring& ra = a.vertices();
  const Ring& rb = b.vertices();
  const double inter =
      boolean_area(std::span<const Ring>(&ra, 1), std::span<const Ring>(&rb, 1), BoolOp::Intersection);
  const double uni = aa + ab - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

void MatchResult::update_scores() {
  precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  f_measure = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace {

bool boxes_overlap(const Polygon& a, const Polygon& b) {
  auto bounds = [](const Polygon& p) {
    double x0 = p[0].x, y0 = p[0].y, x1 = p[0].x, y1 = p[0].y;
    for (const auto& v : p.vertices()) {
      x0 = std::min(x0, v.x);
      y0 = std::min(y0, v.y);
      x1 = std::max(x1, v.x);
      y1 = std::max(y1, v.y);
    }
    return std::array<double, 4>{x0, y0, x1, y1};
  };
  const auto ba = bounds(a);
  const auto bb = bounds(b);
  return ba[0] <= bb[2] && bb[0] <= ba[2] && ba[1] <= bb[3] && bb[1] <= ba[3];
}

}  // namespace

MatchResult match(std::span<const Detection> dets, std::span<const GroundTruth> truths, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0)) throw ParameterError("iou_thresh must lie in (0, 1]");
  std::vector<PairIoU> candidates;
  std::vector<PairIoU> ignore_hits;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (!boxes_overlap(dets[d].polygon, truths[t].polygon)) continue;
      const double iou = polygon_iou(dets[d].polygon, truths[t].polygon);
      if (iou < iou_thresh) continue;
      (truths[t].ignore ? ignore_hits : candidates).push_back({d, t, iou});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const PairIoU& a, const PairIoU& b) {
    return std::tie(b.iou, a.detection, a.truth) < std::tie(a.iou, b.detection, b.truth);
  });

  MatchResult res;
  std::vector<bool> det_used(dets.size(), false);
  std::vector<bool> truth_used(truths.size(), false);
  for (const auto& c : candidates) {
    if (det_used[c.detection] || truth_used[c.truth]) continue;
    det_used[c.detection] = true;
    truth_used[c.truth] = true;
    res.matches.push_back(c);
  }
  std::vector<bool> det_ignored(dets.size(), false);
  for (const auto& c : ignore_hits) {
    if (!det_used[c.detection]) det_ignored[c.detection] = true;
  }

  res.tp = res.matches.size();
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (!det_used[d] && !det_ignored[d]) ++res.fp;
  }
  for (std::size_t t = 0; t < truths.size(); ++t) {
    if (!truths[t].ignore && !truth_used[t]) ++res.fn;
  }
  res.update_scores();
  return res;
}

MatchResult aggregate(std::span<const MatchResult> per_image) {
  MatchResult total;
  for (const auto& r : per_image) {
    total.tp += r.tp;
    total.fp += r.fp;
    total.fn += r.fn;
  }
  total.update_scores();
  return total;
}

}  // namespace rsca
