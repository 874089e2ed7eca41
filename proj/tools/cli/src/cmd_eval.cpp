#include <iomanip>
#include <map>

#include "rsca/errors.hpp"
#include "rsca/eval.hpp"
#include "rsca/formats.hpp"
#include "rsca_cli/commands.hpp"
#include "rsca_cli/fsutil.hpp"

namespace rsca::cli {

int cmd_eval(const EvalOptions& opt, Streams io) {
  if (!(opt.iou_thresh > 0.0 && opt.iou_thresh <= 1.0)) throw ParameterError("--iou-thresh must lie in (0, 1]");
  std::vector<fs::path> ann_files;
  if (fs::is_directory(opt.annotations)) {
    ann_files = list_files(opt.annotations, {".json", ".txt"});
  } else if (fs::is_regular_file(opt.annotations)) {
    ann_files.push_back(opt.annotations);
  } else {
    throw FormatError("eval: no such file or directory: " + opt.annotations.string());
  }
  if (ann_files.empty()) throw FormatError("eval: no annotations in " + opt.annotations.string());

  std::map<std::string, std::vector<Detection>> dets;
  for (auto& img : parse_detection_json(read_text_file(opt.detections))) {
    auto& slot = dets[img.image_id];
    slot.insert(slot.end(), img.detections.begin(), img.detections.end());
  }

  std::vector<ImageAnnotation> anns(ann_files.size());
  std::vector<std::pair<std::string, MatchResult>> per_image(ann_files.size());
  parallel_for(ann_files.size(), opt.jobs, [&](std::size_t i) {
    anns[i] = load_annotation(ann_files[i]);
    const auto truths = anns[i].truths();
    const auto it = dets.find(anns[i].image_id);
    const std::span<const Detection> d = it == dets.end() ? std::span<const Detection>{} : it->second;
    per_image[i] = {anns[i].image_id, match(d, truths, opt.iou_thresh)};
  });
  for (const auto& [id, unused] : dets) {
    const bool known = std::any_of(anns.begin(), anns.end(), [&](const auto& a) { return a.image_id == id; });
    if (!known) io.err << "eval: detections for '" << id << "' have no annotation; skipped\n";
  }

  std::vector<MatchResult> results;
  for (const auto& p : per_image) results.push_back(p.second);
  const MatchResult total = aggregate(results);

  if (!opt.out.empty()) write_file_atomic(opt.out, to_metrics_json(total, per_image));

  io.out << std::left << std::setw(24) << "image" << std::right << std::setw(6) << "TP" << std::setw(6) << "FP"
         << std::setw(6) << "FN" << std::setw(11) << "Precision" << std::setw(9) << "Recall" << std::setw(11)
         << "F-measure" << "\n";
  auto row = [&](const std::string& name, const MatchResult& m) {
    io.out << std::left << std::setw(24) << name << std::right << std::setw(6) << m.tp << std::setw(6) << m.fp
           << std::setw(6) << m.fn << std::fixed << std::setprecision(4) << std::setw(11) << m.precision
           << std::setw(9) << m.recall << std::setw(11) << m.f_measure << std::defaultfloat << "\n";
  };
  for (const auto& [id, m] : per_image) row(id, m);
  row("TOTAL", total);
  return 0;
}

}  // namespace rsca::cli
