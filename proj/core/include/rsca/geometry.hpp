#pragma once

#include <span>
#include <vector>

namespace rsca {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a);

/// Implicitly closed vertex loop; may be non-simple or degenerate.
using Ring = std::vector<Point>;

/// Shoelace area, positive for counter-clockwise rings (y axis up).
double signed_area(std::span<const Point> ring);
double ring_perimeter(std::span<const Point> ring);

/// True when no two edges intersect other than adjacent edges at their shared vertex.
bool is_simple(std::span<const Point> ring);

/// Ordered vertex loop of at least three distinct vertices with non-zero
/// area. Consecutive duplicates (and a repeated closing vertex) are
/// dropped and the orientation is normalised to counter-clockwise.
class Polygon {
 public:
  /// Throws GeometryError for fewer than three distinct vertices or zero area.
  explicit Polygon(Ring vertices);

  const Ring& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  Ring vertices_;
};

double area(const Polygon& p);
double perimeter(const Polygon& p);

Polygon scale(const Polygon& p, double sx, double sy);
Polygon translate(const Polygon& p, Point by);

/// Offset distance D = A / L * (1 - r^2) for shrink ratio r in (0, 1].
double shrink_offset(const Polygon& p, double r);

struct OffsetOptions {
  /// Outer joins whose miter length exceeds limit * |d| are bevelled.
  double miter_limit = 2.0;
};

/// Offsets the boundary by d: d < 0 shrinks, d > 0 dilates. Joins on the
/// outside of a turn are mitred (bevelled past the limit); the raw offset
/// ring is then cleaned of self-intersections with a positive-winding
/// rebuild. Shrinking may return zero, one or several polygons; holes that
/// a dilation might close off are not represented.
std::vector<Polygon> offset_polygon(const Polygon& p, double d, const OffsetOptions& options = {});

/// Splits a possibly self-intersecting ring into simple polygons under the
/// even-odd rule, largest area first.
std::vector<Polygon> repair_polygon(std::span<const Point> ring);

/// Linear shrink-ratio schedule from r_a (epoch 0) to r_b (max_epoch).
struct ShrinkSchedule {
  double r_a = 0.4;
  double r_b = 0.6;
  int max_epoch = 1200;

  /// Throws ParameterError unless 0 < r_a, r_b <= 1 and max_epoch > 0.
  void validate() const;
};

/// r = r_a + (r_b - r_a) * epoch / max_epoch, with epoch clamped to [0, max_epoch].
double schedule_ratio(const ShrinkSchedule& s, int epoch);

/// Inward offset by the shrink distance at the scheduled ratio.
/// Components smaller than kMinSpineArea are discarded.
std::vector<Polygon> shrink_for_epoch(const Polygon& p, const ShrinkSchedule& s, int epoch);

/// Text-spine components below this area (px^2) are dropped.
inline constexpr double kMinSpineArea = 1.0;

}  // namespace rsca
