#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "rsca/errors.hpp"
#include "rsca/formats.hpp"
#include "rsca_cli/commands.hpp"
#include "rsca_cli/image_io.hpp"

namespace rsca::cli {

namespace {

struct Canvas {
  Image& img;
  const std::uint8_t* color;
  int thickness;

  void plot(long x, long y) {
    const long lo = -(thickness - 1) / 2;
    const long hi = thickness / 2;
    for (long dy = lo; dy <= hi; ++dy) {
      for (long dx = lo; dx <= hi; ++dx) {
        const long px = x + dx;
        const long py = y + dy;
        if (px < 0 || py < 0 || px >= static_cast<long>(img.width) || py >= static_cast<long>(img.height)) continue;
        std::copy(color, color + 3, img.pixel(static_cast<std::size_t>(px), static_cast<std::size_t>(py)));
      }
    }
  }

  // Liang-Barsky against a one-pixel margin around the frame, then Bresenham.
  void line(double x0, double y0, double x1, double y1) {
    const double xmin = -1.0;
    const double ymin = -1.0;
    const double xmax = static_cast<double>(img.width);
    const double ymax = static_cast<double>(img.height);
    double t0 = 0.0;
    double t1 = 1.0;
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {x0 - xmin, xmax - x0, y0 - ymin, ymax - y0};
    for (int i = 0; i < 4; ++i) {
      if (p[i] == 0.0) {
        if (q[i] < 0.0) return;
        continue;
      }
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        t0 = std::max(t0, t);
      } else {
        t1 = std::min(t1, t);
      }
      if (t0 > t1) return;
    }
    long ax = std::lround(x0 + t0 * dx);
    long ay = std::lround(y0 + t0 * dy);
    const long bx = std::lround(x0 + t1 * dx);
    const long by = std::lround(y0 + t1 * dy);
    const long sx = ax < bx ? 1 : -1;
    const long sy = ay < by ? 1 : -1;
    const long ex = std::abs(bx - ax);
    const long ey = -std::abs(by - ay);
    long err = ex + ey;
    for (;;) {
      plot(ax, ay);
      if (ax == bx && ay == by) break;
      const long e2 = 2 * err;
      if (e2 >= ey) {
        err += ey;
        ax += sx;
      }
      if (e2 <= ex) {
        err += ex;
        ay += sy;
      }
    }
  }
};

struct Outlines {
  std::vector<Ring> rings;
  std::size_t width = 0;  ///< 0 when the file does not carry a size
  std::size_t height = 0;
};

Outlines load_outlines(const fs::path& path, const std::string& wanted_id) {
  const std::string text = read_text_file(path);
  Outlines out;
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_object() && j.contains("instances")) {
    const ImageAnnotation ann = parse_annotation_json(text, path.stem().string());
    out.width = ann.width;
    out.height = ann.height;
    for (const auto& inst : ann.instances) out.rings.push_back(inst.points);
    return out;
  }
  const auto images = parse_detection_json(text);
  const ImageDetections* chosen = nullptr;
  for (const auto& img : images) {
    if (img.image_id == wanted_id) chosen = &img;
  }
  if (chosen == nullptr && images.size() == 1) chosen = &images.front();
  if (chosen == nullptr && !images.empty()) {
    throw ParameterError("overlay: no detections for image id '" + wanted_id + "' (use --image-id)");
  }
  if (chosen != nullptr) {
    for (const auto& d : chosen->detections) out.rings.push_back(d.polygon.vertices());
  }
  return out;
}

}  // namespace

int cmd_overlay(const OverlayOptions& opt, Streams io) {
  if (opt.thickness < 1) throw ParameterError("--thickness must be at least 1");
  Image img = read_image(opt.image);
  const std::string id = opt.image_id.empty() ? opt.image.stem().string() : opt.image_id;
  const Outlines outlines = load_outlines(opt.polygons, id);

  if (outlines.width != 0 && (outlines.width != img.width || outlines.height != img.height)) {
    io.err << "overlay: warning: annotation size " << outlines.width << "x" << outlines.height
           << " differs from image size " << img.width << "x" << img.height << "; drawing clipped\n";
  }
  bool outside = false;
  Canvas canvas{img, opt.color, opt.thickness};
  for (const auto& ring : outlines.rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point a = ring[i];
      const Point b = ring[(i + 1) % ring.size()];
      outside = outside || a.x < 0 || a.y < 0 || a.x >= static_cast<double>(img.width) ||
                a.y >= static_cast<double>(img.height);
      canvas.line(std::floor(a.x), std::floor(a.y), std::floor(b.x), std::floor(b.y));
    }
  }
  if (outside) io.err << "overlay: warning: polygons extend beyond the image; clipped\n";
  write_image(img, opt.out);
  io.out << "overlay: " << outlines.rings.size() << " polygon(s) -> " << opt.out.string() << "\n";
  return 0;
}

}  // namespace rsca::cli
