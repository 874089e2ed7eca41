#include <json.hpp>

#include <cstdlib>
#include <exception>

#include "rsca/errors.hpp"
#include "rsca/formats.hpp"
#include "rsca/grid_io.hpp"
#include "rsca/labelgen.hpp"
#include "rsca_cli/commands.hpp"
#include "rsca_cli/fsutil.hpp"

namespace rsca::cli {

using nlohmann::json;

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RSCA_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return 0;
}

namespace {

struct LabelOutcome {
  std::string image_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t positive = 0;
  std::size_t ignored = 0;
  std::vector<std::string> warnings;
  std::string error;
};

}  // namespace

int cmd_gen_labels(const GenLabelsOptions& opt, Streams io) {
  opt.schedule.validate();
  const auto files = list_files(opt.annotations, {".json", ".txt"});
  if (files.empty()) {
    io.err << "gen-labels: no .json or .txt annotations in " << opt.annotations << "\n";
    return 1;
  }
  fs::create_directories(opt.out / "ignore");

  std::vector<LabelOutcome> results(files.size());
  parallel_for(files.size(), opt.jobs, [&](std::size_t i) {
    auto& res = results[i];
    res.image_id = files[i].stem().string();
    try {
      ImageAnnotation ann = load_annotation(files[i], opt.width, opt.height);
      if (opt.width != 0) ann.width = opt.width;
      if (opt.height != 0) ann.height = opt.height;
      if (ann.width == 0 || ann.height == 0) throw ParameterError("image size unknown; pass --width/--height");
      const LabelMask target =
          make_training_target(ann.instances, opt.schedule, opt.epoch, ann.height, ann.width, &res.warnings);
      write_file_atomic(opt.out / (res.image_id + ".grd"), encode_grd1(target.mask));
      write_file_atomic(opt.out / "ignore" / (res.image_id + ".grd"), encode_grd1(target.ignore));
      res.width = ann.width;
      res.height = ann.height;
      res.positive = target.positive_count();
      res.ignored = target.ignored_count();
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });

  json images = json::array();
  json errors = json::array();
  std::size_t ok = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& res = results[i];
    if (!res.error.empty()) {
      io.err << "gen-labels: " << files[i].filename().string() << ": " << res.error << "\n";
      errors.push_back({{"file", files[i].filename().string()}, {"message", res.error}});
      continue;
    }
    ++ok;
    for (const auto& w : res.warnings) io.err << "gen-labels: " << res.image_id << ": " << w << "\n";
    images.push_back({{"image_id", res.image_id},
                      {"width", res.width},
                      {"height", res.height},
                      {"positive_pixels", res.positive},
                      {"ignored_pixels", res.ignored},
                      {"warnings", res.warnings}});
  }
  const json summary = {{"r_a", opt.schedule.r_a},
                        {"r_b", opt.schedule.r_b},
                        {"max_epoch", opt.schedule.max_epoch},
                        {"epoch", opt.epoch},
                        {"shrink_ratio", schedule_ratio(opt.schedule, opt.epoch)},
                        {"images", images},
                        {"errors", errors}};
  write_file_atomic(opt.out / "summary.json", summary.dump(2) + "\n");
  io.out << "gen-labels: " << ok << "/" << files.size() << " images, shrink ratio "
         << schedule_ratio(opt.schedule, opt.epoch) << "\n";
  return errors.empty() ? 0 : 1;
}

}  // namespace rsca::cli
