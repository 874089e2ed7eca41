#include "rsca/polyclip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace rsca {
namespace {

struct Edge {
  Point a;
  Point b;
};

struct BBox {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

int winding_number(Point p, const std::vector<Edge>& edges) {
  int wn = 0;
  for (const auto& e : edges) {
    const double side = cross(e.b - e.a, p - e.a);
    if (e.a.y <= p.y) {
      if (e.b.y > p.y && side > 0) ++wn;
    } else if (e.b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn;
}

bool filled(int winding, FillRule rule) {
  switch (rule) {
    case FillRule::EvenOdd:
      return (winding & 1) != 0;
    case FillRule::NonZero:
      return winding != 0;
    case FillRule::Positive:
      return winding > 0;
  }
  return false;
}

bool combine(bool in_subject, bool in_clip, BoolOp op) {
  switch (op) {
    case BoolOp::Union:
      return in_subject || in_clip;
    case BoolOp::Intersection:
      return in_subject && in_clip;
    case BoolOp::Difference:
      return in_subject && !in_clip;
    case BoolOp::Xor:
      return in_subject != in_clip;
  }
  return false;
}

// Merges points closer than `tol` into one node via a hashed grid.
class NodeTable {
 public:
  explicit NodeTable(double tol) : tol_(tol), cell_(4.0 * tol) {}

  std::size_t find_or_add(Point p) {
    const auto cx = static_cast<std::int64_t>(std::floor(p.x / cell_));
    const auto cy = static_cast<std::int64_t>(std::floor(p.y / cell_));
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t id : it->second) {
          const Point q = points_[id];
          if (std::abs(q.x - p.x) <= tol_ && std::abs(q.y - p.y) <= tol_) return id;
        }
      }
    }
    const std::size_t id = points_.size();
    points_.push_back(p);
    cells_[key(cx, cy)].push_back(id);
    return id;
  }

  const std::vector<Point>& points() const { return points_; }

 private:
  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(y);
  }

  double tol_;
  double cell_;
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

struct HalfEdge {
  std::size_t from;
  std::size_t to;
};

class Arrangement {
 public:
  Arrangement(std::span<const Ring> subject, std::span<const Ring> clip) {
    collect(subject, subject_);
    collect(clip, clip_);
    BBox box{1e300, 1e300, -1e300, -1e300};
    for (const auto* set : {&subject_, &clip_}) {
      for (const auto& e : *set) {
        for (Point p : {e.a, e.b}) {
          box.x0 = std::min(box.x0, p.x);
          box.y0 = std::min(box.y0, p.y);
          box.x1 = std::max(box.x1, p.x);
          box.y1 = std::max(box.y1, p.y);
        }
      }
    }
    scale_ = std::max({box.x1 - box.x0, box.y1 - box.y0, std::abs(box.x0), std::abs(box.y0),
                       std::abs(box.x1), std::abs(box.y1), 1e-9});
    tol_ = 1e-10 * scale_;
  }

  template <typename Inside>
  std::vector<HalfEdge> boundary(Inside inside) {
    split();
    std::vector<HalfEdge> out;
    const auto& pts = nodes_->points();
    for (const auto& seg : segments_) {
      const Point a = pts[seg.from];
      const Point b = pts[seg.to];
      const Point d = b - a;
      const double len = norm(d);
      if (len <= tol_) continue;
      const Point left{-d.y / len, d.x / len};
      const double delta = std::clamp(1e-3 * len, 10.0 * tol_, 1e-6 * scale_);
      const Point mid = 0.5 * (a + b);
      const Point pl = mid + delta * left;
      const Point pr = mid - delta * left;
      const bool in_left = inside(winding_number(pl, subject_), winding_number(pl, clip_));
      const bool in_right = inside(winding_number(pr, subject_), winding_number(pr, clip_));
      if (in_left && !in_right) out.push_back({seg.from, seg.to});
      if (in_right && !in_left) out.push_back({seg.to, seg.from});
    }
    return out;
  }

  const std::vector<Point>& nodes() const { return nodes_->points(); }
  double tolerance() const { return tol_; }

 private:
  static void collect(std::span<const Ring> rings, std::vector<Edge>& edges) {
    for (const auto& ring : rings) {
      const std::size_t n = ring.size();
      if (n < 2) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const Point a = ring[i];
        const Point b = ring[(i + 1) % n];
        if (a == b) continue;
        edges.push_back({a, b});
      }
    }
  }

  void split() {
    if (nodes_) return;
    nodes_.emplace(tol_);
    std::vector<Edge> all = subject_;
    all.insert(all.end(), clip_.begin(), clip_.end());
    std::vector<std::vector<double>> cuts(all.size(), std::vector<double>{0.0, 1.0});

    std::vector<BBox> boxes(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto& e = all[i];
      boxes[i] = {std::min(e.a.x, e.b.x) - tol_, std::min(e.a.y, e.b.y) - tol_, std::max(e.a.x, e.b.x) + tol_,
                  std::max(e.a.y, e.b.y) + tol_};
    }
    // sweep on x to prune pairs
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return boxes[l].x0 < boxes[r].x0; });
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const std::size_t i = order[oi];
      for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
        const std::size_t j = order[oj];
        if (boxes[j].x0 > boxes[i].x1) break;
        if (boxes[j].y0 > boxes[i].y1 || boxes[j].y1 < boxes[i].y0) continue;
        intersect(all[i], all[j], cuts[i], cuts[j]);
      }
    }

    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto& ts = cuts[i];
      std::sort(ts.begin(), ts.end());
      const Point a = all[i].a;
      const Point d = all[i].b - a;
      std::size_t prev = nodes_->find_or_add(a);
      for (std::size_t k = 1; k < ts.size(); ++k) {
        const Point p = ts[k] >= 1.0 ? all[i].b : a + ts[k] * d;
        const std::size_t id = nodes_->find_or_add(p);
        if (id == prev) continue;
        const std::size_t lo = std::min(prev, id);
        const std::size_t hi = std::max(prev, id);
        if (seen.insert((static_cast<std::uint64_t>(lo) << 32) | hi).second) segments_.push_back({lo, hi});
        prev = id;
      }
    }
  }

  void intersect(const Edge& e, const Edge& f, std::vector<double>& te, std::vector<double>& tf) const {
    const Point r = e.b - e.a;
    const Point s = f.b - f.a;
    const double lr = norm(r);
    const double ls = norm(s);
    const Point qp = f.a - e.a;
    const double denom = cross(r, s);
    if (std::abs(denom) > 1e-12 * lr * ls) {
      const double t = cross(qp, s) / denom;
      const double u = cross(qp, r) / denom;
      const double et = tol_ / lr;
      const double eu = tol_ / ls;
      if (t >= -et && t <= 1.0 + et && u >= -eu && u <= 1.0 + eu) {
        te.push_back(std::clamp(t, 0.0, 1.0));
        tf.push_back(std::clamp(u, 0.0, 1.0));
      }
      return;
    }
    // parallel: only collinear overlaps matter
    if (std::abs(cross(r, qp)) / lr > tol_) return;
    auto project = [](Point a, Point dir, double len2, Point p) { return dot(p - a, dir) / len2; };
    for (Point p : {f.a, f.b}) {
      const double t = project(e.a, r, lr * lr, p);
      if (t > 0.0 && t < 1.0) te.push_back(t);
    }
    for (Point p : {e.a, e.b}) {
      const double u = project(f.a, s, ls * ls, p);
      if (u > 0.0 && u < 1.0) tf.push_back(u);
    }
  }

  std::vector<Edge> subject_;
  std::vector<Edge> clip_;
  double scale_ = 1.0;
  double tol_ = 1e-10;
  std::optional<NodeTable> nodes_;
  std::vector<HalfEdge> segments_;
};

// Chains boundary half-edges (inside on the left) into closed rings. At a
// vertex with several outgoing candidates the one reached first turning
// clockwise from the reversed incoming edge continues the ring.
std::vector<Ring> chain(const std::vector<HalfEdge>& edges, const std::vector<Point>& pts) {
  std::unordered_map<std::size_t, std::vector<std::size_t>> outgoing;
  for (std::size_t i = 0; i < edges.size(); ++i) outgoing[edges[i].from].push_back(i);
  std::vector<bool> used(edges.size(), false);
  std::vector<Ring> rings;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    Ring ring;
    std::size_t cur = start;
    while (!used[cur]) {
      used[cur] = true;
      const HalfEdge& e = edges[cur];
      ring.push_back(pts[e.from]);
      const Point v = pts[e.to];
      const Point back = pts[e.from] - v;
      const double ref = std::atan2(back.y, back.x);
      std::size_t best = edges.size();
      double best_turn = 0.0;
      for (std::size_t cand : outgoing[e.to]) {
        if (used[cand] && cand != start) continue;
        const Point dir = pts[edges[cand].to] - v;
        double turn = ref - std::atan2(dir.y, dir.x);
        while (turn <= 0.0) turn += two_pi;
        while (turn > two_pi) turn -= two_pi;
        if (best == edges.size() || turn < best_turn) {
          best = cand;
          best_turn = turn;
        }
      }
      if (best == edges.size()) break;
      cur = best;
    }
    rings.push_back(std::move(ring));
  }
  return rings;
}

Ring simplify_ring(Ring ring, double tol) {
  bool changed = true;
  while (changed && ring.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size() && ring.size() >= 3; ++i) {
      const std::size_t n = ring.size();
      const Point a = ring[(i + n - 1) % n];
      const Point b = ring[i];
      const Point c = ring[(i + 1) % n];
      const Point ac = c - a;
      const double lac = norm(ac);
      const bool dup = norm(b - a) <= tol;
      // b lies on segment a-c (within tolerance) and between its endpoints
      const bool straight = lac > tol && std::abs(cross(ac, b - a)) / lac <= tol && dot(b - a, ac) >= 0.0 &&
                            dot(b - c, a - c) >= 0.0;
      if (dup || straight) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return ring;
}

template <typename Inside>
Region build_region(std::span<const Ring> subject, std::span<const Ring> clip, Inside inside) {
  Arrangement arr(subject, clip);
  const auto edges = arr.boundary(inside);
  Region region;
  const double tol = 10.0 * arr.tolerance();
  for (auto& ring : chain(edges, arr.nodes())) {
    ring = simplify_ring(std::move(ring), tol);
    if (ring.size() < 3) continue;
    const double a = signed_area(ring);
    if (std::abs(a) <= tol * tol) continue;
    (a > 0 ? region.outers : region.holes).push_back(std::move(ring));
  }
  return region;
}

template <typename Inside>
double region_area(std::span<const Ring> subject, std::span<const Ring> clip, Inside inside) {
  Arrangement arr(subject, clip);
  const auto edges = arr.boundary(inside);
  const auto& pts = arr.nodes();
  double twice = 0.0;
  for (const auto& e : edges) twice += cross(pts[e.from], pts[e.to]);
  return 0.5 * twice;
}

}  // namespace

Region boolean_op(std::span<const Ring> subject, std::span<const Ring> clip, BoolOp op, FillRule rule) {
  return build_region(subject, clip,
                      [=](int ws, int wc) { return combine(filled(ws, rule), filled(wc, rule), op); });
}

double boolean_area(std::span<const Ring> subject, std::span<const Ring> clip, BoolOp op, FillRule rule) {
  return region_area(subject, clip, [=](int ws, int wc) { return combine(filled(ws, rule), filled(wc, rule), op); });
}

Region resolve(std::span<const Ring> rings, FillRule rule) {
  return build_region(rings, std::span<const Ring>{}, [=](int ws, int) { return filled(ws, rule); });
}

}  // namespace rsca
