#include "rsca/gradcheck.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rsca/decoder.hpp"
#include "rsca/errors.hpp"
#include "rsca/grid_ops.hpp"
#include "rsca/lcau.hpp"
#include "rsca/losses.hpp"
#include "rsca/upsampler.hpp"

namespace rsca {

std::string_view to_string(GradOp op) {
  switch (op) {
    case GradOp::Conv:
      return "conv";
    case GradOp::Nearest:
      return "nearest";
    case GradOp::Bilinear:
      return "bilinear";
    case GradOp::Softmax:
      return "softmax";
    case GradOp::Deconv:
      return "deconv";
    case GradOp::PixelShuffle:
      return "pixel-shuffle";
    case GradOp::Sigmoid:
      return "sigmoid";
    case GradOp::Reassembly:
      return "reassembly";
    case GradOp::Lcau:
      return "lcau";
    case GradOp::Decoder:
      return "decoder";
    case GradOp::Bce:
      return "bce";
  }
  return "unknown";
}

GradOp parse_grad_op(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (GradOp op : kAllGradOps) {
    if (lower == to_string(op)) return op;
  }
  throw ParameterError("unknown gradcheck op '" + std::string(name) + "'");
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw ShapeError("max_relative_error: length mismatch");
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  if (scale == 0.0) return 0.0;
  return diff / scale;
}

std::vector<double> central_difference(const std::function<double()>& f, std::span<double> x,
                                       std::span<const std::size_t> coords, double step) {
  std::vector<double> out;
  out.reserve(coords.size());
  for (std::size_t i : coords) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f();
    x[i] = orig - step;
    const double down = f();
    x[i] = orig;
    out.push_back((up - down) / (2.0 * step));
  }
  return out;
}

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Grid random_grid(Rng& rng, Shape s, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Grid g(s);
  for (auto& v : g.data()) v = dist(rng);
  return g;
}

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

double weighted_sum(const Grid& g, const Grid& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * weights[i];
  return s;
}

// A tensor under test: live values (perturbed by the finite differences) and
// the analytic cotangent computed at the unperturbed point.
struct Probe {
  std::span<double> values;
  std::vector<double> analytic;
};

class Checker {
 public:
  Checker(const GradCheckOptions& opt, Rng& rng) : opt_(opt), rng_(rng) {}

  double run(const std::function<double()>& loss, std::vector<Probe>& probes, std::size_t max_coords = 0) {
    if (max_coords == 0) max_coords = opt_.max_coords;
    double worst = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      auto& probe = probes[p];
      if (probe.values.empty()) continue;
      std::vector<std::size_t> coords(probe.values.size());
      std::iota(coords.begin(), coords.end(), 0);
      if (coords.size() > max_coords) {
        std::shuffle(coords.begin(), coords.end(), rng_);
        coords.resize(max_coords);
        std::sort(coords.begin(), coords.end());
      }
      const auto numeric = central_difference(loss, probe.values, coords, opt_.step);
      std::vector<double> analytic;
      analytic.reserve(coords.size());
      for (std::size_t i : coords) {
        double a = probe.analytic[i];
        if (opt_.inject_bug && p == 0) a *= 1.01;
        analytic.push_back(a);
      }
      worst = std::max(worst, max_relative_error(analytic, numeric));
    }
    return worst;
  }

 private:
  const GradCheckOptions& opt_;
  Rng& rng_;
};

std::vector<double> as_vector(const Grid& g) { return {g.data().begin(), g.data().end()}; }

double trial_conv(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 6), pick(rng, 1, 6)};
  const std::size_t cout = pick(rng, 1, 3);
  Grid x = random_grid(rng, s);
  Grid w = random_grid(rng, {cout, s.c, 3, 3});
  std::vector<double> b = random_vec(rng, cout);
  const Grid gw = random_grid(rng, {s.n, cout, s.h, s.w});
  const auto g = conv3x3_backward(gw, x, w);
  std::vector<Probe> probes{{x.data(), as_vector(g.input)}, {w.data(), as_vector(g.weights)}, {b, g.bias}};
  return chk.run([&] { return weighted_sum(conv3x3_forward(x, w, b), gw); }, probes);
}

double trial_nearest(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 6), pick(rng, 1, 6)};
  const int r = static_cast<int>(pick(rng, 1, 3));
  Grid x = random_grid(rng, s);
  const auto ur = static_cast<std::size_t>(r);
  const Grid gw = random_grid(rng, {s.n, s.c, s.h * ur, s.w * ur});
  std::vector<Probe> probes{{x.data(), as_vector(nearest_upsample_backward(gw, r))}};
  return chk.run([&] { return weighted_sum(nearest_upsample(x, r), gw); }, probes);
}

double trial_bilinear(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 6), pick(rng, 1, 6)};
  const int r = static_cast<int>(pick(rng, 1, 3));
  Grid x = random_grid(rng, s);
  const auto ur = static_cast<std::size_t>(r);
  const Grid gw = random_grid(rng, {s.n, s.c, s.h * ur, s.w * ur});
  std::vector<Probe> probes{{x.data(), as_vector(bilinear_upsample_backward(gw, s, r))}};
  return chk.run([&] { return weighted_sum(bilinear_upsample(x, r), gw); }, probes);
}

double trial_softmax(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 5), pick(rng, 1, 6), pick(rng, 1, 6)};
  Grid x = random_grid(rng, s, -3.0, 3.0);
  const Grid gw = random_grid(rng, s);
  std::vector<Probe> probes{{x.data(), as_vector(channel_softmax_backward(gw, channel_softmax(x)))}};
  return chk.run([&] { return weighted_sum(channel_softmax(x), gw); }, probes);
}

double trial_deconv(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 3), pick(rng, 1, 4), pick(rng, 1, 4)};
  const int r = static_cast<int>(pick(rng, 1, 3));
  const auto k = static_cast<std::size_t>(2 * r);
  const std::size_t cout = pick(rng, 1, 3);
  Grid x = random_grid(rng, s);
  Grid w = random_grid(rng, {s.c, cout, k, k});
  std::vector<double> b = random_vec(rng, cout);
  const auto ur = static_cast<std::size_t>(r);
  const Grid gw = random_grid(rng, {s.n, cout, s.h * ur, s.w * ur});
  const auto g = deconv_upsample_backward(gw, x, w, r);
  std::vector<Probe> probes{{x.data(), as_vector(g.input)}, {w.data(), as_vector(g.weights)}, {b, g.bias}};
  return chk.run([&] { return weighted_sum(deconv_upsample(x, w, b, r), gw); }, probes);
}

double trial_pixel_shuffle(Checker& chk, Rng& rng) {
  const int r = static_cast<int>(pick(rng, 1, 2));
  const auto rr = static_cast<std::size_t>(r * r);
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 2) * rr, pick(rng, 1, 5), pick(rng, 1, 5)};
  Grid x = random_grid(rng, s);
  const auto ur = static_cast<std::size_t>(r);
  const Grid gw = random_grid(rng, {s.n, s.c / rr, s.h * ur, s.w * ur});
  std::vector<Probe> probes{{x.data(), as_vector(pixel_unshuffle(gw, r))}};
  return chk.run([&] { return weighted_sum(pixel_shuffle(x, r), gw); }, probes);
}

double trial_sigmoid(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 6), pick(rng, 1, 6)};
  Grid x = random_grid(rng, s, -4.0, 4.0);
  const Grid gw = random_grid(rng, s);
  std::vector<Probe> probes{{x.data(), as_vector(sigmoid_backward(gw, sigmoid(x)))}};
  return chk.run([&] { return weighted_sum(sigmoid(x), gw); }, probes);
}

double trial_reassembly(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 5), pick(rng, 1, 5)};
  const int r = static_cast<int>(pick(rng, 1, 2));
  const int k = static_cast<int>(2 * pick(rng, 0, 2) + 1);
  const auto ur = static_cast<std::size_t>(r);
  Grid x = random_grid(rng, s);
  Grid w = random_grid(rng, {s.n, static_cast<std::size_t>(k * k), s.h * ur, s.w * ur}, 0.0, 1.0);
  const Grid gw = random_grid(rng, {s.n, s.c, s.h * ur, s.w * ur});
  const auto g = local_reassembly_backward(gw, x, w, r, k);
  std::vector<Probe> probes{{x.data(), as_vector(g.input)}, {w.data(), as_vector(g.weights)}};
  return chk.run([&] { return weighted_sum(local_reassembly(x, w, r, k), gw); }, probes);
}

double trial_lcau(Checker& chk, Rng& rng) {
  const Shape s{pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 6), pick(rng, 1, 6)};
  const int r = static_cast<int>(pick(rng, 1, 3));
  const int k = static_cast<int>(2 * pick(rng, 0, 2) + 1);
  LcauParams p = LcauParams::zeros(s.c, r, k);
  p.gen_weights = random_grid(rng, p.gen_weights.shape());
  p.gen_bias = random_vec(rng, p.taps());
  Grid x = random_grid(rng, s);
  const auto ur = static_cast<std::size_t>(r);
  const Grid gw = random_grid(rng, {s.n, s.c, s.h * ur, s.w * ur});
  const auto g = lcau_backward(gw, lcau_forward(x, p).saved);
  std::vector<Probe> probes{{x.data(), as_vector(g.input)},
                            {p.gen_weights.data(), as_vector(g.gen_weights)},
                            {p.gen_bias, g.gen_bias}};
  return chk.run([&] { return weighted_sum(lcau_forward(x, p).output, gw); }, probes);
}

// Each decode is comparatively expensive; sample a few cells per tensor.
constexpr std::size_t kDecoderCoords = 12;

double trial_decoder(Checker& chk, Rng& rng, std::uint64_t seed) {
  // every upsampler kind, plus LCAU restricted to the lateral stages
  double worst = 0.0;
  std::vector<DecoderConfig> configs;
  for (UpsamplerKind kind : kAllUpsamplerKinds) {
    DecoderConfig cfg;
    cfg.channels = 2;
    cfg.upsampler = kind;
    cfg.lcau_k = 3;
    configs.push_back(cfg);
  }
  DecoderConfig fpn = configs.back();
  fpn.placement = LcauPlacement::FpnOnly;
  configs.push_back(fpn);

  for (const auto& cfg : configs) {
    DecoderParams params = DecoderParams::init(cfg, seed);
    const std::size_t h = 8;
    const std::size_t w = 8;
    Pyramid pyr{random_grid(rng, {1, cfg.channels, h, w}), random_grid(rng, {1, cfg.channels, h / 2, w / 2}),
                random_grid(rng, {1, cfg.channels, h / 4, w / 4}), random_grid(rng, {1, cfg.channels, h / 8, w / 8})};
    auto rec = decode_record(pyr, params);
    const Grid gw = random_grid(rng, rec.prob.shape());
    const auto g = decode_backward(gw, rec.tape, params);
    std::vector<Probe> probes{{pyr.c2.data(), as_vector(g.pyramid.c2)},
                              {pyr.c3.data(), as_vector(g.pyramid.c3)},
                              {pyr.c4.data(), as_vector(g.pyramid.c4)},
                              {pyr.c5.data(), as_vector(g.pyramid.c5)},
                              {params.fuse_weights.data(), as_vector(g.params.fuse_weights)},
                              {params.head_weights.data(), as_vector(g.params.head_weights)}};
    if (auto* l = std::get_if<LcauParams>(&params.c5_up.back())) {
      probes.push_back({l->gen_weights.data(), as_vector(std::get<LcauParams>(g.params.c5_up.back()).gen_weights)});
    }
    if (auto* l = std::get_if<LcauParams>(&params.final_up)) {
      probes.push_back({l->gen_bias, std::get<LcauParams>(g.params.final_up).gen_bias});
    }
    worst = std::max(worst, chk.run([&] { return weighted_sum(decode(pyr, params), gw); }, probes, kDecoderCoords));
  }
  return worst;
}

// Checked through the logit, as the loss is used behind the sigmoid head.
double trial_bce(Checker& chk, Rng& rng) {
  const std::size_t h = pick(rng, 1, 6);
  const std::size_t w = pick(rng, 1, 6);
  Grid logits = random_grid(rng, {1, 1, h, w}, -3.0, 3.0);
  LabelMask target{Grid({1, 1, h, w}), Grid({1, 1, h, w})};
  std::uniform_int_distribution<int> cls(0, 5);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const int c = cls(rng);
    if (c == 0) {
      target.ignore[i] = 1.0;
    } else if (c <= 2) {
      target.mask[i] = 1.0;
    }
  }
  const Grid pred = sigmoid(logits);
  std::vector<Probe> probes{{logits.data(), as_vector(sigmoid_backward(bce_loss_grad(pred, target), pred))}};
  return chk.run([&] { return bce_loss(sigmoid(logits), target).total; }, probes);
}

}  // namespace

GradCheckReport run_gradcheck(GradOp op, const GradCheckOptions& options) {
  GradCheckReport rep;
  rep.op = op;
  rep.trials = std::max(options.trials, 0);
  for (int t = 0; t < rep.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(options.seed, static_cast<std::uint64_t>(op) * 100003ULL + t);
    Rng rng(trial_seed);
    Checker chk(options, rng);
    double err = 0.0;
    switch (op) {
      case GradOp::Conv:
        err = trial_conv(chk, rng);
        break;
      case GradOp::Nearest:
        err = trial_nearest(chk, rng);
        break;
      case GradOp::Bilinear:
        err = trial_bilinear(chk, rng);
        break;
      case GradOp::Softmax:
        err = trial_softmax(chk, rng);
        break;
      case GradOp::Deconv:
        err = trial_deconv(chk, rng);
        break;
      case GradOp::PixelShuffle:
        err = trial_pixel_shuffle(chk, rng);
        break;
      case GradOp::Sigmoid:
        err = trial_sigmoid(chk, rng);
        break;
      case GradOp::Reassembly:
        err = trial_reassembly(chk, rng);
        break;
      case GradOp::Lcau:
        err = trial_lcau(chk, rng);
        break;
      case GradOp::Decoder:
        err = trial_decoder(chk, rng, trial_seed);
        break;
      case GradOp::Bce:
        err = trial_bce(chk, rng);
        break;
    }
    rep.worst_error = std::max(rep.worst_error, err);
  }
  rep.passed = rep.worst_error <= options.tolerance;
  return rep;
}

}  // namespace rsca
