#include "rsca/formats.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rsca/errors.hpp"
#include "rsca/grid_io.hpp"

namespace rsca {

using nlohmann::json;

std::vector<GroundTruth> ImageAnnotation::truths() const {
  std::vector<GroundTruth> out;
  for (const auto& inst : instances) {
    try {
      Polygon p(inst.points);
      if (!is_simple(p.vertices())) {
        auto parts = repair_polygon(p.vertices());
        if (parts.empty()) continue;
        p = parts.front();
      }
      out.push_back({std::move(p), inst.ignore});
    } catch (const GeometryError&) {
      auto parts = repair_polygon(inst.points);
      if (!parts.empty()) out.push_back({parts.front(), inst.ignore});
    }
  }
  return out;
}

namespace {

Ring parse_points(const json& pts) {
  Ring ring;
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 2) throw FormatError("point must be [x, y]");
    ring.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return ring;
}

json points_json(std::span<const Point> ring) {
  json pts = json::array();
  for (const auto& p : ring) pts.push_back({p.x, p.y});
  return pts;
}

}  // namespace

ImageAnnotation parse_annotation_json(const std::string& text, const std::string& image_id) {
  try {
    const json j = json::parse(text);
    ImageAnnotation ann;
    ann.image_id = j.value("image_id", image_id);
    ann.width = j.at("width").get<std::size_t>();
    ann.height = j.at("height").get<std::size_t>();
    for (const auto& inst : j.at("instances")) {
      ann.instances.push_back({parse_points(inst.at("points")), inst.value("ignore", false)});
    }
    return ann;
  } catch (const json::exception& e) {
    throw FormatError("annotation " + image_id + ": " + e.what());
  }
}

std::string to_annotation_json(const ImageAnnotation& ann) {
  json inst = json::array();
  for (const auto& i : ann.instances) inst.push_back({{"points", points_json(i.points)}, {"ignore", i.ignore}});
  const json j{{"image_id", ann.image_id}, {"width", ann.width}, {"height", ann.height}, {"instances", inst}};
  return j.dump(2) + "\n";
}

ImageAnnotation parse_ctw1500(const std::string& text, const std::string& image_id, std::size_t width,
                              std::size_t height) {
  ImageAnnotation ann;
  ann.image_id = image_id;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  double max_x = 0.0;
  double max_y = 0.0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    AnnotatedInstance inst;
    if (!fields.empty() && fields.back().find("###") != std::string::npos) {
      inst.ignore = true;
      fields.pop_back();
    }
    if (fields.size() < 6 || fields.size() % 2 != 0) {
      throw FormatError(image_id + ":" + std::to_string(lineno) + ": expected an even number (>= 6) of coordinates");
    }
    for (std::size_t i = 0; i < fields.size(); i += 2) {
      try {
        const double x = std::stod(fields[i]);
        const double y = std::stod(fields[i + 1]);
        inst.points.push_back({x, y});
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      } catch (const std::exception&) {
        throw FormatError(image_id + ":" + std::to_string(lineno) + ": non-numeric coordinate");
      }
    }
    ann.instances.push_back(std::move(inst));
  }
  ann.width = width > 0 ? width : static_cast<std::size_t>(std::ceil(max_x));
  ann.height = height > 0 ? height : static_cast<std::size_t>(std::ceil(max_y));
  return ann;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return std::move(ss).str();
}

ImageAnnotation load_annotation(const std::filesystem::path& path, std::size_t width, std::size_t height) {
  const std::string text = read_text_file(path);
  const std::string id = path.stem().string();
  const std::string ext = path.extension().string();
  if (ext == ".json") return parse_annotation_json(text, id);
  if (ext == ".txt") return parse_ctw1500(text, id, width, height);
  throw FormatError("unsupported annotation file " + path.string());
}

std::string to_detection_json(std::span<const ImageDetections> images) {
  json arr = json::array();
  for (const auto& img : images) {
    json dets = json::array();
    for (const auto& d : img.detections) {
      dets.push_back({{"points", points_json(d.polygon.vertices())}, {"score", d.score}});
    }
    arr.push_back({{"image_id", img.image_id}, {"detections", dets}});
  }
  return arr.dump(2) + "\n";
}

std::vector<ImageDetections> parse_detection_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    auto one = [](const json& obj) {
      ImageDetections img;
      img.image_id = obj.at("image_id").get<std::string>();
      for (const auto& d : obj.at("detections")) {
        img.detections.push_back({Polygon(parse_points(d.at("points"))), d.value("score", 1.0)});
      }
      return img;
    };
    std::vector<ImageDetections> out;
    if (j.is_array()) {
      for (const auto& obj : j) out.push_back(one(obj));
    } else {
      out.push_back(one(j));
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("detection JSON: ") + e.what());
  } catch (const GeometryError& e) {
    throw FormatError(std::string("detection JSON: ") + e.what());
  }
}

namespace {

json metrics_object(const MatchResult& r) {
  return {{"precision", r.precision}, {"recall", r.recall}, {"f_measure", r.f_measure},
          {"tp", r.tp},               {"fp", r.fp},         {"fn", r.fn}};
}

}  // namespace

std::string to_metrics_json(const MatchResult& total,
                            std::span<const std::pair<std::string, MatchResult>> per_image) {
  json j = metrics_object(total);
  json per = json::array();
  for (const auto& [id, r] : per_image) {
    json o = metrics_object(r);
    o["image_id"] = id;
    per.push_back(o);
  }
  j["per_image"] = per;
  return j.dump(2) + "\n";
}

void save_lcau_params(const LcauParams& params, const std::filesystem::path& stem) {
  params.validate();
  save_grd1(stem.string() + ".weights.grd", params.gen_weights);
  save_grd1(stem.string() + ".bias.grd", Grid({1, 1, 1, params.gen_bias.size()}, params.gen_bias));
  std::ofstream os(stem.string() + ".json", std::ios::trunc);
  if (!os) throw FormatError("cannot write " + stem.string() + ".json");
  os << json{{"r", params.r}, {"k", params.k}, {"C", params.channels()}}.dump(2) << '\n';
}

LcauParams load_lcau_params(const std::filesystem::path& stem) {
  try {
    const json desc = json::parse(read_text_file(stem.string() + ".json"));
    LcauParams p;
    p.r = desc.at("r").get<int>();
    p.k = desc.at("k").get<int>();
    p.gen_weights = load_grd1(stem.string() + ".weights.grd");
    const Grid bias = load_grd1(stem.string() + ".bias.grd");
    p.gen_bias.assign(bias.data().begin(), bias.data().end());
    if (p.channels() != desc.at("C").get<std::size_t>()) throw FormatError("LCAU descriptor channel count mismatch");
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("LCAU descriptor: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("LCAU parameters: ") + e.what());
  }
}

}  // namespace rsca
