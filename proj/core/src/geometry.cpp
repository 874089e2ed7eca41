#include "rsca/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsca/errors.hpp"
#include "rsca/polyclip.hpp"

namespace rsca {

double norm(Point a) { return std::hypot(a.x, a.y); }

double signed_area(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

double ring_perimeter(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 2) return 0.0;
  double len = 0.0;
  for (std::size_t i = 0; i < n; ++i) len += norm(ring[(i + 1) % n] - ring[i]);
  return len;
}

namespace {

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({norm(b - a), norm(c - a), 1e-300});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_touch(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  return o4 == 0 && on_segment(q1, q2, p2);
}

}  // namespace

bool is_simple(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = ring[j];
      const Point d = ring[(j + 1) % n];
      const bool adjacent_next = j == i + 1;
      const bool adjacent_wrap = i == 0 && j == n - 1;
      if (adjacent_next || adjacent_wrap) {
        // adjacent edges may only share their common vertex: reject a fold-back
        const Point shared = adjacent_next ? b : a;
        const Point other_e = adjacent_next ? a : b;
        const Point other_f = adjacent_next ? d : c;
        if (orientation(shared, other_e, other_f) == 0 && dot(other_e - shared, other_f - shared) > 0) return false;
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

Polygon::Polygon(Ring vertices) {
  Ring v;
  v.reserve(vertices.size());
  for (const Point& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("polygon vertex is not finite");
    if (v.empty() || !(v.back() == p)) v.push_back(p);
  }
  while (v.size() > 1 && v.front() == v.back()) v.pop_back();
  if (v.size() < 3) {
    throw GeometryError("polygon needs at least 3 distinct vertices, got " + std::to_string(v.size()));
  }
  const double a = signed_area(v);
  if (a == 0.0) throw GeometryError("polygon has zero area");
  if (a < 0) std::reverse(v.begin(), v.end());
  vertices_ = std::move(v);
}

double area(const Polygon& p) { return std::abs(signed_area(p.vertices())); }

double perimeter(const Polygon& p) { return ring_perimeter(p.vertices()); }

Polygon scale(const Polygon& p, double sx, double sy) {
  Ring v = p.vertices();
  for (auto& q : v) q = {q.x * sx, q.y * sy};
  return Polygon(std::move(v));
}

Polygon translate(const Polygon& p, Point by) {
  Ring v = p.vertices();
  for (auto& q : v) q = q + by;
  return Polygon(std::move(v));
}

double shrink_offset(const Polygon& p, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("shrink ratio must lie in (0, 1]");
  const double len = perimeter(p);
  if (len <= 0.0) throw GeometryError("zero perimeter");
  return area(p) / len * (1.0 - r * r);
}

namespace {

// Outward unit normal of a counter-clockwise edge a -> b.
Point outward_normal(Point a, Point b) {
  const Point d = b - a;
  const double len = norm(d);
  return {d.y / len, -d.x / len};
}

Ring raw_offset_ring(const Ring& v, double d, double miter_limit) {
  const std::size_t n = v.size();
  std::vector<Point> normals(n);
  for (std::size_t i = 0; i < n; ++i) normals[i] = outward_normal(v[i], v[(i + 1) % n]);

  Ring out;
  out.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = v[i];
    const Point n_in = normals[(i + n - 1) % n];
    const Point n_out = normals[i];
    const double sin_turn = cross(n_in, n_out);  // > 0 for a left (convex) turn
    const double cos_turn = dot(n_in, n_out);
    if (std::abs(sin_turn) < 1e-12 && cos_turn > 0) {
      out.push_back(p + d * n_in);
      continue;
    }
    if (sin_turn * d > 0) {
      // outside of the turn
      const double ratio = std::sqrt(2.0 / (1.0 + cos_turn));
      if (cos_turn > -1.0 + 1e-12 && ratio <= miter_limit) {
        out.push_back(p + (d / (1.0 + cos_turn)) * (n_in + n_out));
      } else {
        out.push_back(p + d * n_in);
        out.push_back(p + d * n_out);
      }
    } else {
      // inside of the turn: the loop through p is removed by the cleanup
      out.push_back(p + d * n_in);
      out.push_back(p);
      out.push_back(p + d * n_out);
    }
  }
  return out;
}

std::vector<Polygon> to_polygons(std::vector<Ring> rings, double min_area) {
  std::vector<Polygon> out;
  for (auto& r : rings) {
    if (std::abs(signed_area(r)) <= min_area) continue;
    try {
      out.emplace_back(std::move(r));
    } catch (const GeometryError&) {
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Polygon& a, const Polygon& b) { return area(a) > area(b); });
  return out;
}

}  // namespace

std::vector<Polygon> offset_polygon(const Polygon& p, double d, const OffsetOptions& options) {
  if (!std::isfinite(d)) throw ParameterError("offset distance must be finite");
  if (d == 0.0) return {p};
  const Ring raw = raw_offset_ring(p.vertices(), d, options.miter_limit);
  const Region region = resolve(std::span<const Ring>(&raw, 1), FillRule::Positive);
  const double a = area(p);
  return to_polygons(region.outers, 1e-9 * std::max(a, 1.0));
}

std::vector<Polygon> repair_polygon(std::span<const Point> ring) {
  const Ring r(ring.begin(), ring.end());
  const Region region = resolve(std::span<const Ring>(&r, 1), FillRule::EvenOdd);
  return to_polygons(region.outers, 0.0);
}

void ShrinkSchedule::validate() const {
  if (!(r_a > 0.0 && r_a <= 1.0)) throw ParameterError("r_a must lie in (0, 1]");
  if (!(r_b > 0.0 && r_b <= 1.0)) throw ParameterError("r_b must lie in (0, 1]");
  if (max_epoch <= 0) throw ParameterError("max_epoch must be positive");
}

double schedule_ratio(const ShrinkSchedule& s, int epoch) {
  s.validate();
  const int e = std::clamp(epoch, 0, s.max_epoch);
  return s.r_a + (s.r_b - s.r_a) * static_cast<double>(e) / static_cast<double>(s.max_epoch);
}

std::vector<Polygon> shrink_for_epoch(const Polygon& p, const ShrinkSchedule& s, int epoch) {
  const double d = shrink_offset(p, schedule_ratio(s, epoch));
  auto parts = offset_polygon(p, -d);
  if (d == 0.0) return parts;
  std::erase_if(parts, [](const Polygon& q) { return area(q) < kMinSpineArea; });
  return parts;
}

}  // namespace rsca
