#include "rsca_cli/app.hpp"

#include <CLI11.hpp>

#include <sstream>

#include "rsca/errors.hpp"
#include "rsca/gradcheck.hpp"
#include "rsca_cli/commands.hpp"

namespace rsca::cli {

namespace {

void add_seed(CLI::App* cmd, std::uint64_t& seed, CLI::Option*& flag) {
  flag = cmd->add_option("--seed", seed, "RNG seed (falls back to RSCA_SEED, then 0)");
}

std::uint64_t seed_from(const CLI::Option* flag, std::uint64_t value) {
  return resolve_seed(flag->count() > 0 ? std::optional<std::uint64_t>(value) : std::nullopt);
}

void parse_color(const std::string& text, std::uint8_t (&rgb)[3]) {
  std::istringstream ss(text);
  for (int i = 0; i < 3; ++i) {
    int v = -1;
    ss >> v;
    if (!ss || v < 0 || v > 255) throw ParameterError("--color expects R,G,B with components in 0-255");
    rgb[i] = static_cast<std::uint8_t>(v);
    if (i < 2 && ss.get() != ',') throw ParameterError("--color expects R,G,B");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene-text spine labelling, LCAU decoding, detection and evaluation"};
  app.require_subcommand(1);
  Streams io{out, err};

  GenLabelsOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-labels", "Rasterise shrunk text-spine training masks");
  gen_cmd->add_option("--annotations", gen.annotations, "Directory of .json / CTW1500 .txt annotations")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--r-a", gen.schedule.r_a, "Shrink ratio at epoch 0")->capture_default_str();
  gen_cmd->add_option("--r-b", gen.schedule.r_b, "Shrink ratio at max epoch")->capture_default_str();
  gen_cmd->add_option("--max-epoch", gen.schedule.max_epoch, "Schedule length")->capture_default_str();
  gen_cmd->add_option("--epoch", gen.epoch, "Epoch to generate labels for")->capture_default_str();
  gen_cmd->add_option("--width", gen.width, "Override image width");
  gen_cmd->add_option("--height", gen.height, "Override image height");
  gen_cmd->add_option("--jobs", gen.jobs, "Worker threads")->capture_default_str();

  DetectOptions det;
  std::uint64_t det_seed = 0;
  CLI::Option* det_seed_flag = nullptr;
  auto* det_cmd = app.add_subcommand("detect", "Probability maps or images to polygon detections");
  det_cmd->add_option("--prob-maps", det.prob_maps, "GRD1 map or directory of maps");
  det_cmd->add_option("--image", det.image, "PNG / PPM image to decode");
  det_cmd->add_option("--decoder", det.decoder, "Decoder directory written by init-decoder");
  det_cmd->add_option("--out", det.out, "Detection JSON")->required();
  det_cmd->add_option("--size", det.size, "Network input side: 640, 800 or custom")->capture_default_str();
  det_cmd->add_option("--custom-size", det.custom_size, "Side for --size custom (multiple of 32)");
  det_cmd->add_option("--orig-width", det.orig_width, "Original image width for map inputs");
  det_cmd->add_option("--orig-height", det.orig_height, "Original image height for map inputs");
  det_cmd->add_option("--bin-thresh", det.params.bin_thresh, "Binarisation threshold")->capture_default_str();
  det_cmd->add_option("--d-ts", det.params.d_ts, "Dilation ratio")->capture_default_str();
  det_cmd->add_option("--min-area", det.params.min_area, "Minimum polygon area (map px^2)")->capture_default_str();
  det_cmd->add_option("--approx-eps", det.params.approx_eps_frac, "Simplification tolerance / contour length")
      ->capture_default_str();
  det_cmd->add_option("--score-thresh", det.params.score_thresh, "Minimum mean region probability")
      ->capture_default_str();
  det_cmd->add_option("--contour-offset", det.params.contour_offset, "Outward push of the traced contour (map px)")
      ->capture_default_str();
  det_cmd->add_option("--jobs", det.jobs, "Worker threads")->capture_default_str();
  add_seed(det_cmd, det_seed, det_seed_flag);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Precision / recall / F-measure of detections");
  eval_cmd->add_option("--detections", ev.detections, "Detection JSON")->required();
  eval_cmd->add_option("--annotations", ev.annotations, "Annotation file or directory")->required();
  eval_cmd->add_option("--iou-thresh", ev.iou_thresh, "Match threshold")->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Metrics JSON");
  eval_cmd->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str();

  GradcheckCmdOptions gc;
  CLI::Option* gc_seed_flag = nullptr;
  std::uint64_t gc_seed = 0;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference checks of every backward pass");
  std::string op_names;
  for (GradOp op : kAllGradOps) op_names += std::string(op_names.empty() ? "" : ", ") + std::string(to_string(op));
  gc_cmd->add_option("--op", gc.ops, "Operator(s) to check: all, " + op_names);
  gc_cmd->add_option("--trials", gc.trials, "Random instances per operator")->capture_default_str();
  gc_cmd->add_flag("--inject-bug", gc.inject_bug, "Perturb analytic gradients (must fail)");
  add_seed(gc_cmd, gc_seed, gc_seed_flag);

  OverlayOptions ov;
  std::string color = "255,0,0";
  auto* ov_cmd = app.add_subcommand("overlay", "Stroke polygons over an image");
  ov_cmd->add_option("--image", ov.image, "PNG / PPM image")->required();
  ov_cmd->add_option("--polygons", ov.polygons, "Detection or annotation JSON")->required();
  ov_cmd->add_option("--out", ov.out, "Output .png or .ppm")->required();
  ov_cmd->add_option("--image-id", ov.image_id, "Entry to draw from a multi-image detection file");
  ov_cmd->add_option("--color", color, "Stroke colour R,G,B")->capture_default_str();
  ov_cmd->add_option("--thickness", ov.thickness, "Stroke width in pixels")->capture_default_str();

  InitDecoderOptions idec;
  std::string upsampler = "lcau";
  std::string placement = "all";
  CLI::Option* id_seed_flag = nullptr;
  std::uint64_t id_seed = 0;
  auto* id_cmd = app.add_subcommand("init-decoder", "Write seeded decoder parameters");
  id_cmd->add_option("--out", idec.out, "Output directory")->required();
  id_cmd->add_option("--channels", idec.config.channels, "Pyramid channels")->capture_default_str();
  id_cmd->add_option("--upsampler", upsampler, "nearest, bilinear, deconv, pixel-shuffle or lcau")
      ->capture_default_str();
  id_cmd->add_option("--placement", placement, "LCAU stages: fpn or all")->capture_default_str();
  id_cmd->add_option("--lcau-k", idec.config.lcau_k, "LCAU kernel size")->capture_default_str();
  add_seed(id_cmd, id_seed, id_seed_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen_cmd) return cmd_gen_labels(gen, io);
    if (*det_cmd) {
      det.seed = seed_from(det_seed_flag, det_seed);
      return cmd_detect(det, io);
    }
    if (*eval_cmd) return cmd_eval(ev, io);
    if (*gc_cmd) {
      gc.seed = seed_from(gc_seed_flag, gc_seed);
      return cmd_gradcheck(gc, io);
    }
    if (*ov_cmd) {
      parse_color(color, ov.color);
      return cmd_overlay(ov, io);
    }
    if (*id_cmd) {
      idec.config.upsampler = parse_upsampler_kind(upsampler);
      idec.config.placement = parse_lcau_placement(placement);
      idec.seed = seed_from(id_seed_flag, id_seed);
      return cmd_init_decoder(idec, io);
    }
  } catch (const std::exception& e) {
    err << "rsca: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rsca::cli
