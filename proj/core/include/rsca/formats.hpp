#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsca/eval.hpp"
#include "rsca/labelgen.hpp"
#include "rsca/lcau.hpp"
#include "rsca/postproc.hpp"

namespace rsca {

/// One image's ground truth.
/// JSON: {"width": W, "height": H, "instances": [{"points": [[x, y], ...], "ignore": bool}]}
struct ImageAnnotation {
  std::string image_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<AnnotatedInstance> instances;

  /// Valid polygons with their ignore flags; degenerate instances are dropped.
  std::vector<GroundTruth> truths() const;
};

ImageAnnotation parse_annotation_json(const std::string& text, const std::string& image_id);
std::string to_annotation_json(const ImageAnnotation& ann);

/// CTW1500-style text: one instance per line of comma-separated coordinates
/// x1,y1,...,xk,yk (k >= 3, 14 in the dataset). A trailing "###" field marks
/// the instance as ignored. width / height of 0 are inferred from the extent
/// of the points (rounded up).
ImageAnnotation parse_ctw1500(const std::string& text, const std::string& image_id, std::size_t width = 0,
                              std::size_t height = 0);

/// Dispatches on extension: .json canonical, .txt CTW1500. image_id is the file stem.
ImageAnnotation load_annotation(const std::filesystem::path& path, std::size_t width = 0, std::size_t height = 0);

/// JSON: {"image_id": ..., "detections": [{"points": [[x, y], ...], "score": s}]}
struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

/// Serialises a list of per-image objects as a JSON array.
std::string to_detection_json(std::span<const ImageDetections> images);
/// Accepts either a single per-image object or an array of them.
std::vector<ImageDetections> parse_detection_json(const std::string& text);

/// {"precision", "recall", "f_measure", "tp", "fp", "fn", "per_image": [...]}
std::string to_metrics_json(const MatchResult& total,
                            std::span<const std::pair<std::string, MatchResult>> per_image);

/// LCAU parameters as <stem>.weights.grd, <stem>.bias.grd and a <stem>.json
/// descriptor {"r", "k", "C"}.
void save_lcau_params(const LcauParams& params, const std::filesystem::path& stem);
LcauParams load_lcau_params(const std::filesystem::path& stem);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rsca
