#include "rsca/labelgen.hpp"

#include <algorithm>
#include <cmath>

#include "rsca/errors.hpp"

namespace rsca {

std::size_t LabelMask::positive_count() const {
  return static_cast<std::size_t>(std::count(mask.data().begin(), mask.data().end(), 1.0));
}

std::size_t LabelMask::ignored_count() const {
  return static_cast<std::size_t>(std::count(ignore.data().begin(), ignore.data().end(), 1.0));
}

void rasterize_into(const Polygon& polygon, Grid& plane) {
  const std::size_t h = plane.shape().h;
  const std::size_t w = plane.shape().w;
  const auto& v = polygon.vertices();
  const std::size_t n = v.size();

  double ymin = v[0].y;
  double ymax = v[0].y;
  for (const auto& p : v) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const auto row0 = static_cast<std::ptrdiff_t>(std::max(0.0, std::floor(ymin - 0.5)));
  const auto row1 = static_cast<std::ptrdiff_t>(std::min(static_cast<double>(h), std::ceil(ymax + 0.5)));

  std::vector<double> xs;
  for (std::ptrdiff_t y = row0; y < row1; ++y) {
    const double yc = static_cast<double>(y) + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v[i];
      const Point b = v[(i + 1) % n];
      if ((a.y <= yc) != (b.y <= yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // centres x + 0.5 in [xs[k], xs[k+1])
      const double first = std::ceil(xs[k] - 0.5);
      const double last = std::ceil(xs[k + 1] - 0.5);
      const auto x0 = static_cast<std::ptrdiff_t>(std::max(first, 0.0));
      const auto x1 = static_cast<std::ptrdiff_t>(std::min(last, static_cast<double>(w)));
      for (std::ptrdiff_t x = x0; x < x1; ++x) {
        plane.at(0, 0, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = 1.0;
      }
    }
  }
}

LabelMask rasterize(std::span<const Polygon> polygons, std::size_t h, std::size_t w) {
  LabelMask out{Grid({1, 1, h, w}), Grid({1, 1, h, w})};
  for (const auto& p : polygons) rasterize_into(p, out.mask);
  return out;
}

LabelMask make_training_target(std::span<const AnnotatedInstance> annotations, const ShrinkSchedule& schedule,
                               int epoch, std::size_t h, std::size_t w, std::vector<std::string>* warnings) {
  schedule.validate();
  LabelMask out{Grid({1, 1, h, w}), Grid({1, 1, h, w})};
  auto warn = [&](std::size_t idx, const std::string& msg) {
    if (warnings != nullptr) warnings->push_back("instance " + std::to_string(idx) + ": " + msg);
  };

  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& inst = annotations[i];
    std::vector<Polygon> parts;
    Ring pts;
    for (const Point& q : inst.points) {
      if (pts.empty() || !(pts.back() == q)) pts.push_back(q);
    }
    while (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
    try {
      if (is_simple(pts)) {
        parts.emplace_back(pts);
      } else {
        parts = repair_polygon(pts);
        if (parts.empty()) throw GeometryError("outline encloses no area");
        parts.erase(parts.begin() + 1, parts.end());
        warn(i, "self-intersecting outline repaired");
      }
    } catch (const GeometryError& e) {
      warn(i, std::string("skipped: ") + e.what());
      continue;
    }
    const Polygon& poly = parts.front();
    if (inst.ignore) {
      rasterize_into(poly, out.ignore);
      continue;
    }
    try {
      for (const auto& spine : shrink_for_epoch(poly, schedule, epoch)) rasterize_into(spine, out.mask);
    } catch (const GeometryError& e) {
      warn(i, std::string("skipped: ") + e.what());
    }
  }
  for (std::size_t k = 0; k < out.mask.size(); ++k) {
    if (out.ignore[k] != 0.0) out.mask[k] = 0.0;
  }
  return out;
}

}  // namespace rsca
