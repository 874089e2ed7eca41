#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "rsca/errors.hpp"
#include "rsca/formats.hpp"

using namespace rsca;
using nlohmann::json;

TEST_CASE("annotation JSON round trip") {
  const std::string text = R"({"width": 100, "height": 50, "instances": [
    {"points": [[1, 2], [30, 2], [30, 20], [1, 20]], "ignore": false},
    {"points": [[40, 5], [60, 5], [50, 25]], "ignore": true}]})";
  const ImageAnnotation a = parse_annotation_json(text, "img");
  CHECK(a.width == 100);
  CHECK(a.height == 50);
  REQUIRE(a.instances.size() == 2);
  CHECK(a.instances[1].ignore);
  const ImageAnnotation b = parse_annotation_json(to_annotation_json(a), "img");
  CHECK(b.instances[0].points == a.instances[0].points);
  CHECK(b.instances[1].ignore);
  const auto truths = a.truths();
  REQUIRE(truths.size() == 2);
  CHECK(truths[1].ignore);
}

TEST_CASE("malformed annotation JSON is a format error") {
  CHECK_THROWS_AS(parse_annotation_json("{\"width\": 3", "x"), FormatError);
  CHECK_THROWS_AS(parse_annotation_json(R"({"width": 3, "height": 3, "instances": [{"points": [[1]]}]})", "x"),
                  FormatError);
}

TEST_CASE("CTW1500 lines, ignore marker and inferred size") {
  const std::string text = "10,10,90,10,90,50,10,50\n\n100,60,160,60,160,90,100,90,###\n";
  const ImageAnnotation a = parse_ctw1500(text, "ctw");
  REQUIRE(a.instances.size() == 2);
  CHECK_FALSE(a.instances[0].ignore);
  CHECK(a.instances[1].ignore);
  CHECK(a.instances[0].points.size() == 4);
  CHECK(a.width == 160);
  CHECK(a.height == 90);
  CHECK(parse_ctw1500(text, "ctw", 640, 480).width == 640);
}

TEST_CASE("fourteen-point CTW1500 instances") {
  std::string line;
  for (int i = 0; i < 7; ++i) line += std::to_string(10 + 20 * i) + ",10,";
  for (int i = 6; i >= 0; --i) line += std::to_string(10 + 20 * i) + ",40" + (i > 0 ? "," : "");
  const ImageAnnotation a = parse_ctw1500(line + "\n", "c");
  REQUIRE(a.instances.size() == 1);
  CHECK(a.instances[0].points.size() == 14);
}

TEST_CASE("odd coordinate counts are a format error") {
  CHECK_THROWS_AS(parse_ctw1500("1,2,3,4,5\n", "bad"), FormatError);
  CHECK_THROWS_AS(parse_ctw1500("1,2,3,x,5,6\n", "bad"), FormatError);
}

TEST_CASE("detection JSON round trip keeps full precision") {
  ImageDetections img{"a", {{Polygon({{0.1, 0.2}, {10.333333333333334, 0.2}, {5, 7.77}}), 0.875}}};
  const std::vector<ImageDetections> list{img, {"b", {}}};
  const auto back = parse_detection_json(to_detection_json(list));
  REQUIRE(back.size() == 2);
  CHECK(back[0].image_id == "a");
  CHECK(back[0].detections[0].polygon == img.detections[0].polygon);
  CHECK(back[0].detections[0].score == 0.875);
  CHECK(back[1].detections.empty());
  const auto single = parse_detection_json(R"({"image_id": "z", "detections": []})");
  CHECK(single.size() == 1);
}

TEST_CASE("metrics JSON carries totals and per-image rows") {
  MatchResult m;
  m.tp = 1;
  m.fp = 1;
  m.fn = 1;
  m.update_scores();
  const std::vector<std::pair<std::string, MatchResult>> per{{"x", m}};
  const json j = json::parse(to_metrics_json(m, per));
  CHECK(j["precision"].get<double>() == 0.5);
  CHECK(j["recall"].get<double>() == 0.5);
  CHECK(j["f_measure"].get<double>() == 0.5);
  CHECK(j["per_image"][0]["image_id"] == "x");
}

TEST_CASE("LCAU parameter sidecar round trip") {
  const auto stem = std::filesystem::temp_directory_path() / "rsca_test_lcau";
  const LcauParams p = LcauParams::random(3, 2, 5, 4);
  save_lcau_params(p, stem);
  const json desc = json::parse(read_text_file(stem.string() + ".json"));
  CHECK(desc["r"] == 2);
  CHECK(desc["k"] == 5);
  CHECK(desc["C"] == 3);
  const LcauParams q = load_lcau_params(stem);
  CHECK(q.gen_weights == p.gen_weights);
  CHECK(q.gen_bias == p.gen_bias);
  for (const char* ext : {".json", ".weights.grd", ".bias.grd"}) std::filesystem::remove(stem.string() + ext);
}

TEST_CASE("annotation files dispatch on extension") {
  const auto dir = std::filesystem::temp_directory_path() / "rsca_test_formats";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "one.txt") << "0,0,10,0,10,10,0,10\n";
  std::ofstream(dir / "two.json") << R"({"width": 20, "height": 20, "instances": []})";
  CHECK(load_annotation(dir / "one.txt").image_id == "one");
  CHECK(load_annotation(dir / "two.json").width == 20);
  CHECK_THROWS_AS(load_annotation(dir / "missing.json"), FormatError);
  std::filesystem::remove_all(dir);
}
