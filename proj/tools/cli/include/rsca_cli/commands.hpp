#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rsca/decoder.hpp"
#include "rsca/geometry.hpp"
#include "rsca/postproc.hpp"

namespace rsca::cli {

namespace fs = std::filesystem;

/// Sink for progress lines and diagnostics.
struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// --seed if given, else RSCA_SEED, else 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

struct GenLabelsOptions {
  fs::path annotations;
  fs::path out;
  ShrinkSchedule schedule;
  int epoch = 0;
  std::size_t width = 0;   ///< overrides the annotation's size when nonzero
  std::size_t height = 0;
  int jobs = 1;
};

/// Writes <out>/<id>.grd (positive mask), <out>/ignore/<id>.grd and
/// <out>/summary.json. Files that fail are listed in the summary and make the
/// command return nonzero; the remaining files are still written.
int cmd_gen_labels(const GenLabelsOptions& opt, Streams io);

struct DetectOptions {
  fs::path prob_maps;  ///< directory of GRD1 maps, or a single map
  fs::path image;      ///< PNG / PPM, decoded with `decoder`
  fs::path decoder;
  fs::path out;
  DetectParams params;
  std::string size = "640";  ///< "640", "800" or "custom"
  std::size_t custom_size = 0;
  double orig_width = 0.0;   ///< map inputs only; defaults to the map size
  double orig_height = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Network input side for --size; throws ParameterError on anything else.
std::size_t resolve_input_size(const std::string& size, std::size_t custom_size);

int cmd_detect(const DetectOptions& opt, Streams io);

struct EvalOptions {
  fs::path detections;
  fs::path annotations;  ///< directory or single file
  double iou_thresh = 0.5;
  fs::path out;          ///< metrics JSON; empty prints the table only
  int jobs = 1;
};

int cmd_eval(const EvalOptions& opt, Streams io);

struct GradcheckCmdOptions {
  std::vector<std::string> ops;  ///< empty or "all" runs every operator
  std::uint64_t seed = 0;
  int trials = 20;
  bool inject_bug = false;
};

int cmd_gradcheck(const GradcheckCmdOptions& opt, Streams io);

struct OverlayOptions {
  fs::path image;
  fs::path polygons;
  fs::path out;
  std::string image_id;  ///< picks one entry from a multi-image detection file
  std::uint8_t color[3] = {255, 0, 0};
  int thickness = 1;
};

int cmd_overlay(const OverlayOptions& opt, Streams io);

struct InitDecoderOptions {
  fs::path out;
  DecoderConfig config;
  std::uint64_t seed = 0;
};

int cmd_init_decoder(const InitDecoderOptions& opt, Streams io);

}  // namespace rsca::cli
