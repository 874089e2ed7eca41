#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rsca/geometry.hpp"
#include "rsca/grid.hpp"

namespace rsca {

struct DetectParams {
  double bin_thresh = 0.3;
  double d_ts = 1.5;             ///< dilation ratio
  double min_area = 4.0;         ///< px^2 at map resolution
  double approx_eps_frac = 0.01; ///< Douglas-Peucker epsilon as a fraction of contour length
  double score_thresh = 0.5;
  double contour_offset = 0.5;   ///< outward push of the pixel-centre contour to the region's pixel edges

  void validate() const;
};

struct Detection {
  Polygon polygon;  ///< original-image coordinates
  double score = 0.0;
};

/// Row-major h x w binary image.
struct BitMask {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<std::uint8_t> bits;

  BitMask() = default;
  BitMask(std::size_t rows, std::size_t cols) : h(rows), w(cols), bits(rows * cols, 0) {}
  std::uint8_t at(std::size_t y, std::size_t x) const { return bits[y * w + x]; }
  std::uint8_t& at(std::size_t y, std::size_t x) { return bits[y * w + x]; }
  std::size_t count() const;
};

/// 8-connected labelling; 0 is background, regions are numbered 1..count in
/// order of their first pixel in raster order.
struct Components {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<std::int32_t> labels;
  std::int32_t count = 0;

  std::int32_t at(std::size_t y, std::size_t x) const { return labels[y * w + x]; }
};

/// pixel <- prob >= t. prob must be a single plane [1, 1, h, w].
BitMask binarize(const Grid& prob, double t);

Components connected_components(const BitMask& mask);

/// Outer boundary of one labelled region by Moore-neighbour tracing, as
/// pixel centres (x + 0.5, y + 0.5) in tracing order. A single-pixel region
/// yields one point.
std::vector<Point> trace_boundary(const Components& comps, std::int32_t label);

/// Douglas-Peucker on a closed contour. eps <= 0 returns the contour unchanged.
Ring approximate_closed(std::span<const Point> contour, double eps);

/// Traced and simplified outline of a region, or nullopt when it collapses
/// below three vertices. Single pixels become their unit square.
std::optional<Polygon> trace_and_approx(const Components& comps, std::int32_t label, double approx_eps_frac);

/// Outward offset by D = A / L * d_ts, largest component kept.
Polygon dilate_instance(const Polygon& spine, double d_ts);

/// Dilation ratio that undoes shrinking with ratio r exactly for tangential
/// convex polygons (squares, regular polygons, triangles):
/// 2 (1 - r^2) / (1 + r^2).
double matched_dilation_ratio(double r);

/// Probability map [1, 1, l, l] (any h, w) to detections in an orig_w x
/// orig_h image. Components whose mean probability is below score_thresh
/// or whose dilated area is below min_area are dropped.
std::vector<Detection> detect(const Grid& prob, const DetectParams& params, double orig_w, double orig_h);

}  // namespace rsca
