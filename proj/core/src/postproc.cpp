#include "rsca/postproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "rsca/errors.hpp"

namespace rsca {

void DetectParams::validate() const {
  if (!(bin_thresh > 0.0 && bin_thresh < 1.0)) throw ParameterError("bin_thresh must lie in (0, 1)");
  if (!(score_thresh > 0.0 && score_thresh < 1.0)) throw ParameterError("score_thresh must lie in (0, 1)");
  if (!(d_ts >= 0.0) || !std::isfinite(d_ts)) throw ParameterError("d_ts must be non-negative");
  if (!(min_area >= 0.0)) throw ParameterError("min_area must be non-negative");
  if (!(approx_eps_frac >= 0.0)) throw ParameterError("approx_eps_frac must be non-negative");
  if (!(contour_offset >= 0.0) || !std::isfinite(contour_offset)) throw ParameterError("contour_offset must be non-negative");
}

std::size_t BitMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

BitMask binarize(const Grid& prob, double t) {
  const Shape& s = prob.shape();
  if (s.n != 1 || s.c != 1) throw ShapeError("binarize: expected a [1, 1, h, w] map, got " + to_string(s));
  BitMask m(s.h, s.w);
  for (std::size_t i = 0; i < prob.size(); ++i) m.bits[i] = prob[i] >= t ? 1 : 0;
  return m;
}

namespace {

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    auto& p = parent[static_cast<std::size_t>(x)];
    p = parent[static_cast<std::size_t>(p)];
    x = p;
  }
  return x;
}

}  // namespace

Components connected_components(const BitMask& mask) {
  Components out;
  out.h = mask.h;
  out.w = mask.w;
  out.labels.assign(mask.h * mask.w, 0);
  std::vector<std::int32_t> parent{0};

  // first pass: provisional labels from the already-visited neighbours W, NW, N, NE
  for (std::size_t y = 0; y < mask.h; ++y) {
    for (std::size_t x = 0; x < mask.w; ++x) {
      if (mask.at(y, x) == 0) continue;
      std::array<std::int32_t, 4> nb{0, 0, 0, 0};
      if (x > 0) nb[0] = out.labels[y * mask.w + x - 1];
      if (y > 0) {
        if (x > 0) nb[1] = out.labels[(y - 1) * mask.w + x - 1];
        nb[2] = out.labels[(y - 1) * mask.w + x];
        if (x + 1 < mask.w) nb[3] = out.labels[(y - 1) * mask.w + x + 1];
      }
      std::int32_t label = 0;
      for (auto l : nb) {
        if (l != 0 && (label == 0 || l < label)) label = l;
      }
      if (label == 0) {
        label = static_cast<std::int32_t>(parent.size());
        parent.push_back(label);
      } else {
        const std::int32_t root = find_root(parent, label);
        for (auto l : nb) {
          if (l == 0) continue;
          const std::int32_t other = find_root(parent, l);
          if (other != root) parent[static_cast<std::size_t>(std::max(root, other))] = std::min(root, other);
        }
      }
      out.labels[y * mask.w + x] = label;
    }
  }

  // second pass: dense relabelling in raster order of first appearance
  std::vector<std::int32_t> dense(parent.size(), 0);
  for (auto& l : out.labels) {
    if (l == 0) continue;
    const std::int32_t root = find_root(parent, l);
    auto& d = dense[static_cast<std::size_t>(root)];
    if (d == 0) d = ++out.count;
    l = d;
  }
  return out;
}

namespace {

// Clockwise on screen (y down), starting west.
constexpr std::array<std::array<int, 2>, 8> kMoore{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int direction_of(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kMoore[static_cast<std::size_t>(d)][0] == dx && kMoore[static_cast<std::size_t>(d)][1] == dy) return d;
  }
  return -1;
}

}  // namespace

std::vector<Point> trace_boundary(const Components& comps, std::int32_t label) {
  const auto h = static_cast<std::ptrdiff_t>(comps.h);
  const auto w = static_cast<std::ptrdiff_t>(comps.w);
  auto inside = [&](std::ptrdiff_t x, std::ptrdiff_t y) {
    return x >= 0 && y >= 0 && x < w && y < h && comps.labels[static_cast<std::size_t>(y * w + x)] == label;
  };

  std::ptrdiff_t sx = -1;
  std::ptrdiff_t sy = -1;
  for (std::ptrdiff_t i = 0; i < h * w; ++i) {
    if (comps.labels[static_cast<std::size_t>(i)] == label) {
      sx = i % w;
      sy = i / w;
      break;
    }
  }
  if (sx < 0) return {};

  auto centre = [](std::ptrdiff_t x, std::ptrdiff_t y) {
    return Point{static_cast<double>(x) + 0.5, static_cast<double>(y) + 0.5};
  };

  std::vector<Point> contour{centre(sx, sy)};
  std::ptrdiff_t cx = sx;
  std::ptrdiff_t cy = sy;
  int back = 0;  // the west neighbour of the first pixel in raster order is background
  std::ptrdiff_t first_x = -1;
  std::ptrdiff_t first_y = -1;
  const std::ptrdiff_t limit = 4 * h * w + 8;
  for (std::ptrdiff_t step = 0; step < limit; ++step) {
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int d = (back + i) % 8;
      const auto& off = kMoore[static_cast<std::size_t>(d)];
      if (inside(cx + off[0], cy + off[1])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel

    const auto& off = kMoore[static_cast<std::size_t>(found)];
    const std::ptrdiff_t nx = cx + off[0];
    const std::ptrdiff_t ny = cy + off[1];
    if (cx == sx && cy == sy) {
      if (first_x < 0) {
        first_x = nx;
        first_y = ny;
      } else if (nx == first_x && ny == first_y) {
        break;
      }
    }
    // the last background pixel examined becomes the backtrack of the next pixel
    const auto& prev = kMoore[static_cast<std::size_t>((found + 7) % 8)];
    back = direction_of(static_cast<int>(cx + prev[0] - nx), static_cast<int>(cy + prev[1] - ny));
    cx = nx;
    cy = ny;
    if (cx == sx && cy == sy) continue;
    contour.push_back(centre(cx, cy));
  }
  return contour;
}

namespace {

double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// Marks the kept vertices of the open chain pts[first..last].
void douglas_peucker(std::span<const Point> pts, std::size_t first, std::size_t last, double eps,
                     std::vector<bool>& keep) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi <= lo + 1) continue;
    double best = -1.0;
    std::size_t idx = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
      if (d > best) {
        best = d;
        idx = i;
      }
    }
    if (best > eps) {
      keep[idx] = true;
      stack.emplace_back(lo, idx);
      stack.emplace_back(idx, hi);
    }
  }
}

}  // namespace

Ring approximate_closed(std::span<const Point> contour, double eps) {
  const std::size_t n = contour.size();
  if (eps <= 0.0 || n < 4) return Ring(contour.begin(), contour.end());

  // split the loop at the vertex farthest from the first one
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = norm(contour[i] - contour[0]);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  std::vector<Point> closed(contour.begin(), contour.end());
  closed.push_back(contour[0]);
  std::vector<bool> keep(closed.size(), false);
  keep[0] = true;
  keep[far] = true;
  douglas_peucker(closed, 0, far, eps, keep);
  douglas_peucker(closed, far, n, eps, keep);

  Ring out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(contour[i]);
  }
  return out;
}

std::optional<Polygon> trace_and_approx(const Components& comps, std::int32_t label, double approx_eps_frac) {
  const auto contour = trace_boundary(comps, label);
  if (contour.empty()) return std::nullopt;
  if (contour.size() == 1) {
    const Point c = contour[0];
    return Polygon({{c.x - 0.5, c.y - 0.5}, {c.x + 0.5, c.y - 0.5}, {c.x + 0.5, c.y + 0.5}, {c.x - 0.5, c.y + 0.5}});
  }
  const double eps = approx_eps_frac * ring_perimeter(contour);
  Ring approx = approximate_closed(contour, eps);
  try {
    Polygon p(approx);
    if (is_simple(p.vertices())) return p;
  } catch (const GeometryError&) {
  }
  auto parts = repair_polygon(approx);
  if (parts.empty()) return std::nullopt;
  return parts.front();
}

Polygon dilate_instance(const Polygon& spine, double d_ts) {
  const double offset = area(spine) / perimeter(spine) * d_ts;
  if (offset == 0.0) return spine;
  auto parts = offset_polygon(spine, offset);
  if (parts.empty()) return spine;
  return parts.front();
}

double matched_dilation_ratio(double r) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("shrink ratio must lie in (0, 1]");
  return 2.0 * (1.0 - r * r) / (1.0 + r * r);
}

std::vector<Detection> detect(const Grid& prob, const DetectParams& params, double orig_w, double orig_h) {
  params.validate();
  if (!(orig_w > 0.0 && orig_h > 0.0)) throw ParameterError("detect: original image size must be positive");
  const BitMask mask = binarize(prob, params.bin_thresh);
  const Components comps = connected_components(mask);
  const double sx = orig_w / static_cast<double>(mask.w);
  const double sy = orig_h / static_cast<double>(mask.h);

  std::vector<double> sum(static_cast<std::size_t>(comps.count) + 1, 0.0);
  std::vector<std::size_t> count(sum.size(), 0);
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    const auto l = static_cast<std::size_t>(comps.labels[i]);
    sum[l] += prob[i];
    ++count[l];
  }

  std::vector<Detection> out;
  for (std::int32_t label = 1; label <= comps.count; ++label) {
    const auto l = static_cast<std::size_t>(label);
    const double score = sum[l] / static_cast<double>(count[l]);
    if (score < params.score_thresh) continue;
    auto spine = trace_and_approx(comps, label, params.approx_eps_frac);
    if (!spine) continue;  // collapsed below three vertices
    Polygon base = *spine;
    if (params.contour_offset > 0.0 && count[l] > 1) {  // single pixels already come back as their footprint
      auto grown = offset_polygon(base, params.contour_offset);
      if (grown.empty()) continue;
      base = *std::max_element(grown.begin(), grown.end(),
                               [](const Polygon& a, const Polygon& b) { return area(a) < area(b); });
    }
    Polygon full = dilate_instance(base, params.d_ts);
    if (area(full) < params.min_area) continue;
    out.push_back({scale(full, sx, sy), score});
  }
  return out;
}

}  // namespace rsca
