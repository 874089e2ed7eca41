#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rsca/formats.hpp"
#include "rsca/grid_io.hpp"
#include "rsca/postproc.hpp"
#include "rsca_cli/app.hpp"
#include "rsca_cli/commands.hpp"
#include "rsca_cli/image_io.hpp"

using namespace rsca;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rsca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int rc = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("rsca_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

 private:
  fs::path path_;
};

Polygon rect(double x0, double y0, double x1, double y1) { return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}); }

void write_annotation(const fs::path& path, const std::vector<Polygon>& polys, std::size_t w, std::size_t h) {
  ImageAnnotation a{path.stem().string(), w, h, {}};
  for (const auto& p : polys) a.instances.push_back({p.vertices(), false});
  std::ofstream(path) << to_annotation_json(a);
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

const std::vector<Polygon> kSquares{rect(10, 10, 50, 40), rect(70, 20, 110, 60)};

}  // namespace

TEST_SUITE("gen-labels") {
  TEST_CASE("writes masks, ignore planes and a summary") {
    TempDir d("gen");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    const Run r = run({"gen-labels", "--annotations", d / "ann", "--out", d / "labels", "--epoch", "0"});
    REQUIRE(r.rc == 0);
    const Grid mask = load_grd1(d.path() / "labels" / "a.grd");
    CHECK(mask.shape() == Shape{1, 1, 80, 128});
    CHECK(fs::exists(d.path() / "labels" / "ignore" / "a.grd"));
    const json summary = json::parse(slurp(d.path() / "labels" / "summary.json"));
    CHECK(summary["shrink_ratio"].get<double>() == 0.4);
    CHECK(summary["images"][0]["image_id"] == "a");
    CHECK(summary["images"][0]["positive_pixels"].get<std::size_t>() > 0);
  }

  TEST_CASE("fixed ratio gives identical masks at every epoch") {
    TempDir d("gen_fixed");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    std::string first;
    for (const char* epoch : {"0", "500", "1200"}) {
      const std::string out = d / (std::string("e") + epoch);
      REQUIRE(run({"gen-labels", "--annotations", d / "ann", "--out", out, "--r-a", "0.5", "--r-b", "0.5", "--epoch",
                   epoch})
                  .rc == 0);
      const std::string bytes = slurp(fs::path(out) / "a.grd");
      if (first.empty()) first = bytes;
      CHECK(bytes == first);
    }
  }

  TEST_CASE("positive counts grow with the epoch") {
    TempDir d("gen_grow");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    std::size_t prev = 0;
    for (const char* epoch : {"0", "300", "600", "1200"}) {
      const std::string out = d / (std::string("e") + epoch);
      REQUIRE(run({"gen-labels", "--annotations", d / "ann", "--out", out, "--epoch", epoch}).rc == 0);
      const auto n = json::parse(slurp(fs::path(out) / "summary.json"))["images"][0]["positive_pixels"]
                         .get<std::size_t>();
      CHECK(n >= prev);
      prev = n;
    }
  }

  TEST_CASE("a broken file fails the command while the rest are written") {
    TempDir d("gen_bad");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "good.json", kSquares, 128, 80);
    std::ofstream(d.path() / "ann" / "bad.json") << "{not json";
    const Run r = run({"gen-labels", "--annotations", d / "ann", "--out", d / "labels"});
    CHECK(r.rc != 0);
    CHECK(r.err.find("bad.json") != std::string::npos);
    CHECK(fs::exists(d.path() / "labels" / "good.grd"));
    CHECK(json::parse(slurp(d.path() / "labels" / "summary.json"))["errors"].size() == 1);
  }

  TEST_CASE("invalid schedule is rejected") {
    TempDir d("gen_sched");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    CHECK(run({"gen-labels", "--annotations", d / "ann", "--out", d / "o", "--r-a", "0"}).rc != 0);
  }
}

TEST_SUITE("detect") {
  TEST_CASE("blank map gives an empty detection list") {
    TempDir d("det_blank");
    save_grd1(d.path() / "blank.grd", Grid({1, 1, 32, 32}));
    REQUIRE(run({"detect", "--prob-maps", d / "blank.grd", "--out", d / "det.json"}).rc == 0);
    const auto dets = parse_detection_json(slurp(d.path() / "det.json"));
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].image_id == "blank");
    CHECK(dets[0].detections.empty());
  }

  TEST_CASE("one spine gives one detection scaled to the original size") {
    TempDir d("det_one");
    const std::vector<Polygon> spine{rect(20, 20, 40, 36)};
    save_grd1(d.path() / "m.grd", rasterize(spine, 64, 64).mask);
    REQUIRE(run({"detect", "--prob-maps", d / "m.grd", "--out", d / "a.json"}).rc == 0);
    REQUIRE(run({"detect", "--prob-maps", d / "m.grd", "--out", d / "b.json", "--orig-width", "128",
                 "--orig-height", "128"})
                .rc == 0);
    const auto a = parse_detection_json(slurp(d.path() / "a.json"));
    const auto b = parse_detection_json(slurp(d.path() / "b.json"));
    REQUIRE(a[0].detections.size() == 1);
    REQUIRE(b[0].detections.size() == 1);
    const auto& va = a[0].detections[0].polygon.vertices();
    const auto& vb = b[0].detections[0].polygon.vertices();
    REQUIRE(va.size() == vb.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
      CHECK(vb[i].x == doctest::Approx(2 * va[i].x).epsilon(1e-12));
      CHECK(vb[i].y == doctest::Approx(2 * va[i].y).epsilon(1e-12));
    }
  }

  TEST_CASE("input size validation") {
    CHECK(cli::resolve_input_size("640", 0) == 640);
    CHECK(cli::resolve_input_size("800", 0) == 800);
    CHECK(cli::resolve_input_size("custom", 512) == 512);
    CHECK_THROWS(cli::resolve_input_size("custom", 500));
    CHECK_THROWS(cli::resolve_input_size("700", 0));
    TempDir d("det_size");
    save_grd1(d.path() / "m.grd", Grid({1, 1, 8, 8}));
    const Run r = run({"detect", "--prob-maps", d / "m.grd", "--out", d / "o.json", "--size", "700"});
    CHECK(r.rc != 0);
    CHECK(r.err.find("error") != std::string::npos);
  }

  TEST_CASE("bad magic is an error") {
    TempDir d("det_magic");
    std::ofstream(d.path() / "m.grd", std::ios::binary) << "GRD2xxxxxxxxxxxxxxxxxxxx";
    CHECK(run({"detect", "--prob-maps", d / "m.grd", "--out", d / "o.json"}).rc != 0);
  }

  TEST_CASE("output is byte-identical across runs and thread counts") {
    TempDir d("det_det");
    oracle::Rng rng(5);
    for (int i = 0; i < 4; ++i) {
      std::vector<Polygon> ps{oracle::convex_fixture(rng, {50, 50}, 20, 40)};
      save_grd1(d.path() / ("m" + std::to_string(i) + ".grd"), rasterize(ps, 100, 100).mask);
    }
    REQUIRE(run({"detect", "--prob-maps", d.path().string(), "--out", d / "a.json"}).rc == 0);
    REQUIRE(run({"detect", "--prob-maps", d.path().string(), "--out", d / "b.json", "--jobs", "4"}).rc == 0);
    CHECK(slurp(d.path() / "a.json") == slurp(d.path() / "b.json"));
  }
}

TEST_SUITE("eval") {
  TEST_CASE("annotations evaluated against themselves score 1") {
    TempDir d("eval_self");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    ImageDetections dets{"a", {}};
    for (const auto& p : kSquares) dets.detections.push_back({p, 1.0});
    const std::vector<ImageDetections> list{dets};
    std::ofstream(d.path() / "det.json") << to_detection_json(list);
    const Run r = run({"eval", "--detections", d / "det.json", "--annotations", d / "ann", "--out", d / "m.json"});
    REQUIRE(r.rc == 0);
    CHECK(r.out.find("TOTAL") != std::string::npos);
    CHECK(json::parse(slurp(d.path() / "m.json"))["f_measure"].get<double>() == 1.0);
  }

  TEST_CASE("no detections score 0; 1 TP / 1 FP / 1 FN scores 0.5") {
    TempDir d("eval_half");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    const std::vector<ImageDetections> none{{"a", {}}};
    std::ofstream(d.path() / "none.json") << to_detection_json(none);
    const std::vector<ImageDetections> half{{"a", {{kSquares[0], 1.0}, {rect(0, 60, 20, 80), 1.0}}}};
    std::ofstream(d.path() / "half.json") << to_detection_json(half);

    REQUIRE(run({"eval", "--detections", d / "none.json", "--annotations", d / "ann", "--out", d / "m0.json"}).rc ==
            0);
    const json m0 = json::parse(slurp(d.path() / "m0.json"));
    CHECK(m0["f_measure"].get<double>() == 0.0);
    CHECK(m0["fn"].get<int>() == 2);

    REQUIRE(run({"eval", "--detections", d / "half.json", "--annotations", d / "ann", "--out", d / "m1.json"}).rc ==
            0);
    const json m1 = json::parse(slurp(d.path() / "m1.json"));
    CHECK(m1["precision"].get<double>() == 0.5);
    CHECK(m1["recall"].get<double>() == 0.5);
    CHECK(m1["f_measure"].get<double>() == 0.5);
  }

  TEST_CASE("detections without an annotation are skipped with a warning") {
    TempDir d("eval_orphan");
    fs::create_directories(d.path() / "ann");
    write_annotation(d.path() / "ann" / "a.json", kSquares, 128, 80);
    const std::vector<ImageDetections> list{{"a", {}}, {"zzz", {{kSquares[0], 1.0}}}};
    std::ofstream(d.path() / "det.json") << to_detection_json(list);
    const Run r = run({"eval", "--detections", d / "det.json", "--annotations", d / "ann"});
    CHECK(r.rc == 0);
    CHECK(r.err.find("zzz") != std::string::npos);
  }
}

TEST_SUITE("gradcheck") {
  TEST_CASE("zero trials pass vacuously with a warning") {
    const Run r = run({"gradcheck", "--op", "conv", "--trials", "0"});
    CHECK(r.rc == 0);
    CHECK(r.err.find("vacuous") != std::string::npos);
  }

  TEST_CASE("unknown operator is an error") { CHECK(run({"gradcheck", "--op", "softmin"}).rc != 0); }

  TEST_CASE("injected bug fails") { CHECK(run({"gradcheck", "--op", "sigmoid", "--inject-bug"}).rc != 0); }
}

TEST_SUITE("overlay") {
  TEST_CASE("empty polygon list leaves the image untouched") {
    TempDir d("ov_empty");
    cli::Image img(16, 12);
    for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 7);
    cli::write_image(img, d.path() / "in.png");
    const std::vector<ImageDetections> none{{"in", {}}};
    std::ofstream(d.path() / "det.json") << to_detection_json(none);
    REQUIRE(run({"overlay", "--image", d / "in.png", "--polygons", d / "det.json", "--out", d / "out.png"}).rc == 0);
    CHECK(cli::read_image(d.path() / "out.png").rgb == img.rgb);
  }

  TEST_CASE("vertices are stroked in the requested colour") {
    TempDir d("ov_stroke");
    cli::write_image(cli::Image(32, 32), d.path() / "in.ppm");
    const std::vector<ImageDetections> list{{"in", {{rect(4, 4, 20, 24), 1.0}}}};
    std::ofstream(d.path() / "det.json") << to_detection_json(list);
    REQUIRE(run({"overlay", "--image", d / "in.ppm", "--polygons", d / "det.json", "--out", d / "out.ppm",
                 "--color", "0,255,0"})
                .rc == 0);
    const cli::Image out = cli::read_image(d.path() / "out.ppm");
    for (auto [x, y] : {std::pair<std::size_t, std::size_t>{4, 4}, {20, 4}, {20, 24}, {4, 24}}) {
      CHECK(out.pixel(x, y)[0] == 0);
      CHECK(out.pixel(x, y)[1] == 255);
    }
    CHECK(out.pixel(12, 14)[1] == 0);
  }

  TEST_CASE("out-of-frame polygons are clipped with a warning") {
    TempDir d("ov_clip");
    cli::write_image(cli::Image(16, 16), d.path() / "in.png");
    const std::vector<ImageDetections> list{{"in", {{rect(-10, 4, 40, 10), 1.0}}}};
    std::ofstream(d.path() / "det.json") << to_detection_json(list);
    const Run r = run({"overlay", "--image", d / "in.png", "--polygons", d / "det.json", "--out", d / "out.png"});
    REQUIRE(r.rc == 0);
    CHECK(r.err.find("clipped") != std::string::npos);
    CHECK(cli::read_image(d.path() / "out.png").pixel(0, 4)[0] == 255);
  }
}

TEST_SUITE("seeds") {
  TEST_CASE("flag, then environment, then zero") {
    CHECK(cli::resolve_seed(std::uint64_t{9}) == 9);
    ::setenv("RSCA_SEED", "77", 1);
    CHECK(cli::resolve_seed(std::nullopt) == 77);
    CHECK(cli::resolve_seed(std::uint64_t{9}) == 9);
    ::unsetenv("RSCA_SEED");
    CHECK(cli::resolve_seed(std::nullopt) == 0);
  }

  TEST_CASE("same seed writes byte-identical decoders") {
    TempDir d("seed_dec");
    REQUIRE(run({"init-decoder", "--out", d / "a", "--channels", "4", "--seed", "3"}).rc == 0);
    REQUIRE(run({"init-decoder", "--out", d / "b", "--channels", "4", "--seed", "3"}).rc == 0);
    REQUIRE(run({"init-decoder", "--out", d / "c", "--channels", "4", "--seed", "4"}).rc == 0);
    std::size_t same = 0;
    std::size_t differ = 0;
    for (const auto& e : fs::directory_iterator(d.path() / "a")) {
      const std::string leaf = e.path().filename().string();
      CHECK(slurp(e.path()) == slurp(d.path() / "b" / leaf));
      ++same;
      if (slurp(e.path()) != slurp(d.path() / "c" / leaf)) ++differ;
    }
    CHECK(same > 0);
    CHECK(differ > 0);
  }
}
