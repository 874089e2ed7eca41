#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>

#include "rsca/errors.hpp"
#include "rsca/formats.hpp"
#include "rsca/grid_io.hpp"
#include "rsca_cli/commands.hpp"
#include "rsca_cli/fsutil.hpp"
#include "rsca_cli/image_io.hpp"

namespace rsca::cli {

std::size_t resolve_input_size(const std::string& size, std::size_t custom_size) {
  if (size == "640") return 640;
  if (size == "800") return 800;
  if (size == "custom") {
    if (custom_size == 0 || custom_size % 32 != 0) {
      throw ParameterError("--size custom needs --custom-size, a positive multiple of 32");
    }
    return custom_size;
  }
  throw ParameterError("--size must be 640, 800 or custom (got '" + size + "')");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Bilinear resample to side x side, channels scaled to [0, 1].
Grid image_to_grid(const Image& img, std::size_t side) {
  Grid g({1, 3, side, side});
  const double sx = static_cast<double>(img.width) / static_cast<double>(side);
  const double sy = static_cast<double>(img.height) / static_cast<double>(side);
  const auto max_x = static_cast<double>(img.width - 1);
  const auto max_y = static_cast<double>(img.height - 1);
  for (std::size_t y = 0; y < side; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, img.height - 1);
    const double ty = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < side; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, img.width - 1);
      const double tx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < 3; ++c) {
        const double top = (1 - tx) * img.pixel(x0, y0)[c] + tx * img.pixel(x1, y0)[c];
        const double bot = (1 - tx) * img.pixel(x0, y1)[c] + tx * img.pixel(x1, y1)[c];
        g.at(0, c, y, x) = ((1 - ty) * top + ty * bot) / 255.0;
      }
    }
  }
  return g;
}

struct Timed {
  ImageDetections dets;
  double decode_ms = 0.0;
  double post_ms = 0.0;
};

}  // namespace

int cmd_detect(const DetectOptions& opt, Streams io) {
  opt.params.validate();
  const std::size_t side = resolve_input_size(opt.size, opt.custom_size);
  const bool from_maps = !opt.prob_maps.empty();
  if (from_maps == !opt.image.empty()) throw ParameterError("detect: give exactly one of --prob-maps or --image");
  if (!from_maps && opt.decoder.empty()) throw ParameterError("detect: --image requires --decoder");

  std::vector<Timed> results;
  if (from_maps) {
    std::vector<fs::path> maps;
    if (fs::is_directory(opt.prob_maps)) {
      maps = list_files(opt.prob_maps, {".grd"});
    } else if (fs::is_regular_file(opt.prob_maps)) {
      maps.push_back(opt.prob_maps);
    } else {
      throw FormatError("detect: no such file or directory: " + opt.prob_maps.string());
    }
    results.resize(maps.size());
    parallel_for(maps.size(), opt.jobs, [&](std::size_t i) {
      const Grid prob = load_grd1(maps[i]);
      const Shape s = prob.shape();
      if (s.n != 1 || s.c != 1) {
        throw ShapeError(maps[i].filename().string() + ": probability map must be [1, 1, h, w], got " + to_string(s));
      }
      const double ow = opt.orig_width > 0 ? opt.orig_width : static_cast<double>(s.w);
      const double oh = opt.orig_height > 0 ? opt.orig_height : static_cast<double>(s.h);
      const auto t0 = Clock::now();
      results[i].dets = {maps[i].stem().string(), detect(prob, opt.params, ow, oh)};
      results[i].post_ms = ms_since(t0);
    });
  } else {
    const DecoderParams params = load_decoder(opt.decoder);
    const Image img = read_image(opt.image);
    const Grid input = image_to_grid(img, side);
    const auto t0 = Clock::now();
    const Pyramid pyr = synth_pyramid(input, params.config.channels, opt.seed);
    const Grid prob = decode(pyr, params);
    Timed t;
    t.decode_ms = ms_since(t0);
    const auto t1 = Clock::now();
    t.dets = {opt.image.stem().string(),
              detect(prob, opt.params, static_cast<double>(img.width), static_cast<double>(img.height))};
    t.post_ms = ms_since(t1);
    results.push_back(std::move(t));
  }

  std::vector<ImageDetections> all;
  double decode_ms = 0.0;
  double post_ms = 0.0;
  std::size_t count = 0;
  for (auto& r : results) {
    decode_ms += r.decode_ms;
    post_ms += r.post_ms;
    count += r.dets.detections.size();
    all.push_back(std::move(r.dets));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  write_file_atomic(opt.out, to_detection_json(all));

  const double n = static_cast<double>(std::max<std::size_t>(results.size(), 1));
  io.out << "detect: " << count << " detections in " << results.size() << " image(s)\n";
  io.out << std::fixed << std::setprecision(2);
  if (!from_maps) io.out << "  decode:          " << decode_ms / n << " ms/image\n";
  io.out << "  post-processing: " << post_ms / n << " ms/image\n";
  const double total = (decode_ms + post_ms) / n;
  if (total > 0) io.out << "  throughput:      " << 1000.0 / total << " FPS (wall clock)\n";
  io.out << std::defaultfloat;
  return 0;
}

}  // namespace rsca::cli
