#pragma once

#include <span>
#include <string>
#include <vector>

#include "rsca/geometry.hpp"
#include "rsca/grid.hpp"

namespace rsca {

/// Per-pixel training target. Both grids are [1, 1, h, w] with values in
/// {0, 1}; a pixel is never positive and ignored at once.
struct LabelMask {
  Grid mask;
  Grid ignore;

  std::size_t positive_count() const;
  std::size_t ignored_count() const;
};

/// One annotated text instance as read from disk. Points may be non-simple.
struct AnnotatedInstance {
  Ring points;
  bool ignore = false;
};

/// Marks every pixel whose centre (x + 0.5, y + 0.5) lies inside any of the
/// polygons (even-odd rule per polygon). Out-of-frame parts are clipped.
LabelMask rasterize(std::span<const Polygon> polygons, std::size_t h, std::size_t w);

/// Fills pixel centres inside `polygon` into a [1, 1, h, w] plane.
void rasterize_into(const Polygon& polygon, Grid& plane);

/// Text-spine target for one image at a training epoch. Each non-ignored
/// instance is shrunk with the scheduled ratio and rasterized; ignored
/// instances are rasterized unshrunk into the ignore channel and take
/// precedence over positives. Instances that cannot form a valid polygon are
/// skipped with a message appended to `warnings` (when given); non-simple
/// outlines are repaired to their largest even-odd component.
LabelMask make_training_target(std::span<const AnnotatedInstance> annotations, const ShrinkSchedule& schedule,
                               int epoch, std::size_t h, std::size_t w,
                               std::vector<std::string>* warnings = nullptr);

}  // namespace rsca
