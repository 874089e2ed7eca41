#include "rsca/decoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "rsca/errors.hpp"
#include "rsca/grid_io.hpp"
#include "rsca/grid_ops.hpp"

namespace rsca {

std::string_view to_string(LcauPlacement p) { return p == LcauPlacement::All ? "all" : "fpn"; }

LcauPlacement parse_lcau_placement(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "all") return LcauPlacement::All;
  if (lower == "fpn" || lower == "fpn-only" || lower == "fpnonly") return LcauPlacement::FpnOnly;
  throw ParameterError("unknown LCAU placement '" + std::string(name) + "'");
}

void DecoderConfig::validate() const {
  if (channels == 0) throw ParameterError("decoder channels must be positive");
  if (lcau_k < 1 || lcau_k % 2 == 0) throw ParameterError("LCAU window side must be odd and positive");
}

UpsamplerKind DecoderConfig::lateral_kind() const { return upsampler; }

UpsamplerKind DecoderConfig::final_kind() const {
  if (upsampler == UpsamplerKind::Lcau && placement == LcauPlacement::FpnOnly) return UpsamplerKind::Nearest;
  return upsampler;
}

void Pyramid::validate(std::size_t channels) const {
  const std::array<const Grid*, 4> levels{&c2, &c3, &c4, &c5};
  const Shape& base = c2.shape();
  if (base.h == 0 || base.w == 0) throw ShapeError("pyramid: empty C2");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const Shape& s = levels[i]->shape();
    const std::size_t div = std::size_t{1} << i;
    if (s.n != base.n || s.c != channels || base.h % div != 0 || base.w % div != 0 || s.h != base.h / div ||
        s.w != base.w / div) {
      throw ShapeError("pyramid: level C" + std::to_string(i + 2) + " has shape " + to_string(s) +
                       ", expected extents C2 / " + std::to_string(div) + " with " + std::to_string(channels) +
                       " channels");
    }
  }
}

DecoderParams DecoderParams::init(const DecoderConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t c = config.channels;
  DecoderParams p;
  p.config = config;
  std::uint64_t stream = 0;
  auto stage = [&](int r, UpsamplerKind kind) {
    return make_upsampler_params(kind, c, r, derive_seed(seed, stream++), config.lcau_k);
  };
  for (int i = 0; i < 1; ++i) p.c3_up.push_back(stage(2, config.lateral_kind()));
  for (int i = 0; i < 2; ++i) p.c4_up.push_back(stage(2, config.lateral_kind()));
  for (int i = 0; i < 3; ++i) p.c5_up.push_back(stage(2, config.lateral_kind()));
  p.fuse_weights = init_weights({c, 4 * c, 3, 3}, 4 * c * 9, derive_seed(seed, stream++));
  p.fuse_bias.assign(c, 0.0);
  p.final_up = stage(4, config.final_kind());
  p.head_weights = init_weights({1, c, 3, 3}, c * 9, derive_seed(seed, stream++));
  p.head_bias.assign(1, 0.0);
  return p;
}

namespace {

Grid run_chain(const Grid& input, UpsamplerKind kind, const std::vector<UpsamplerParams>& stages,
               std::vector<UpsampleTape>& tapes) {
  Grid x = input;
  for (const auto& sp : stages) {
    auto rec = upsample_record(kind, x, 2, sp);
    tapes.push_back(std::move(rec.tape));
    x = std::move(rec.output);
  }
  return x;
}

Grid backprop_chain(Grid grad, const std::vector<UpsampleTape>& tapes, const std::vector<UpsamplerParams>& stages,
                    std::vector<UpsamplerParams>& stage_grads) {
  stage_grads.resize(stages.size());
  for (std::size_t i = tapes.size(); i-- > 0;) {
    auto g = upsample_backward(grad, tapes[i], stages[i]);
    stage_grads[i] = std::move(g.params);
    grad = std::move(g.input);
  }
  return grad;
}

}  // namespace

DecodeResult decode_record(const Pyramid& pyramid, const DecoderParams& params) {
  const DecoderConfig& cfg = params.config;
  pyramid.validate(cfg.channels);
  DecodeResult res;
  DecoderTape& t = res.tape;
  const UpsamplerKind lateral = cfg.lateral_kind();
  const std::array<Grid, 4> parts{pyramid.c2, run_chain(pyramid.c3, lateral, params.c3_up, t.c3),
                                  run_chain(pyramid.c4, lateral, params.c4_up, t.c4),
                                  run_chain(pyramid.c5, lateral, params.c5_up, t.c5)};
  t.concat = concat_channels(parts);
  t.fused = conv3x3_forward(t.concat, params.fuse_weights, params.fuse_bias);
  auto up = upsample_record(cfg.final_kind(), t.fused, 4, params.final_up);
  t.final_up = std::move(up.tape);
  t.upsampled = std::move(up.output);
  t.prob = sigmoid(conv3x3_forward(t.upsampled, params.head_weights, params.head_bias));
  res.prob = t.prob;
  return res;
}

Grid decode(const Pyramid& pyramid, const DecoderParams& params) { return decode_record(pyramid, params).prob; }

DecoderGrads decode_backward(const Grid& grad_prob, const DecoderTape& tape, const DecoderParams& params) {
  if (grad_prob.shape() != tape.prob.shape()) throw ShapeError("decode_backward: grad shape mismatch");
  DecoderGrads g;
  g.params.config = params.config;

  const Grid grad_logits = sigmoid_backward(grad_prob, tape.prob);
  auto head = conv3x3_backward(grad_logits, tape.upsampled, params.head_weights);
  g.params.head_weights = std::move(head.weights);
  g.params.head_bias = std::move(head.bias);

  auto up = upsample_backward(head.input, tape.final_up, params.final_up);
  g.params.final_up = std::move(up.params);

  auto fuse = conv3x3_backward(up.input, tape.concat, params.fuse_weights);
  g.params.fuse_weights = std::move(fuse.weights);
  g.params.fuse_bias = std::move(fuse.bias);

  const std::size_t c = params.config.channels;
  const std::array<std::size_t, 4> widths{c, c, c, c};
  auto split = split_channels(fuse.input, widths);
  g.pyramid.c2 = std::move(split[0]);
  g.pyramid.c3 = backprop_chain(std::move(split[1]), tape.c3, params.c3_up, g.params.c3_up);
  g.pyramid.c4 = backprop_chain(std::move(split[2]), tape.c4, params.c4_up, g.params.c4_up);
  g.pyramid.c5 = backprop_chain(std::move(split[3]), tape.c5, params.c5_up, g.params.c5_up);
  return g;
}

namespace {

Grid strided_conv_tanh(const Grid& input, const Grid& weights) {
  const Shape& in = input.shape();
  const std::size_t cout = weights.shape().n;
  const std::size_t oh = in.h / 2;
  const std::size_t ow = in.w / 2;
  Grid out({in.n, cout, oh, ow});
  const auto ih = static_cast<std::ptrdiff_t>(in.h);
  const auto iw = static_cast<std::ptrdiff_t>(in.w);
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < cout; ++co) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
          double acc = 0.0;
          for (std::size_t ci = 0; ci < in.c; ++ci) {
            for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
              const std::ptrdiff_t sy = 2 * static_cast<std::ptrdiff_t>(y) + ky - 1;
              if (sy < 0 || sy >= ih) continue;
              for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
                const std::ptrdiff_t sx = 2 * static_cast<std::ptrdiff_t>(x) + kx - 1;
                if (sx < 0 || sx >= iw) continue;
                acc += weights.at(co, ci, static_cast<std::size_t>(ky), static_cast<std::size_t>(kx)) *
                       input.at(n, ci, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
              }
            }
          }
          out.at(n, co, y, x) = std::tanh(acc);
        }
      }
    }
  }
  return out;
}

}  // namespace

Pyramid synth_pyramid(const Grid& image, std::size_t channels, std::uint64_t seed) {
  const Shape& s = image.shape();
  if (channels == 0) throw ParameterError("synth_pyramid: channels must be positive");
  if (s.h == 0 || s.w == 0 || s.h % 32 != 0 || s.w % 32 != 0) {
    throw ShapeError("synth_pyramid: image extents must be positive multiples of 32, got " + to_string(s));
  }
  std::array<Grid, 5> stages;
  Grid x = image;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::size_t cin = x.shape().c;
    const Grid w = init_weights({channels, cin, 3, 3}, cin * 9, derive_seed(seed, 1000 + i));
    x = strided_conv_tanh(x, w);
    stages[i] = x;
  }
  return {std::move(stages[1]), std::move(stages[2]), std::move(stages[3]), std::move(stages[4])};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using TensorVisitor = std::function<void(const std::string& name, Grid* grid, std::vector<double>* bias)>;

void visit_upsampler(const std::string& prefix, UpsamplerParams& p, const TensorVisitor& fn) {
  if (auto* d = std::get_if<DeconvParams>(&p)) {
    fn(prefix + ".weights", &d->weights, nullptr);
    fn(prefix + ".bias", nullptr, &d->bias);
  } else if (auto* s = std::get_if<PixelShuffleParams>(&p)) {
    fn(prefix + ".expand_weights", &s->expand_weights, nullptr);
    fn(prefix + ".expand_bias", nullptr, &s->expand_bias);
  } else if (auto* l = std::get_if<LcauParams>(&p)) {
    fn(prefix + ".gen_weights", &l->gen_weights, nullptr);
    fn(prefix + ".gen_bias", nullptr, &l->gen_bias);
  }
}

void visit_params(DecoderParams& p, const TensorVisitor& fn) {
  for (std::size_t i = 0; i < p.c3_up.size(); ++i) visit_upsampler("c3_up." + std::to_string(i), p.c3_up[i], fn);
  for (std::size_t i = 0; i < p.c4_up.size(); ++i) visit_upsampler("c4_up." + std::to_string(i), p.c4_up[i], fn);
  for (std::size_t i = 0; i < p.c5_up.size(); ++i) visit_upsampler("c5_up." + std::to_string(i), p.c5_up[i], fn);
  fn("fuse.weights", &p.fuse_weights, nullptr);
  fn("fuse.bias", nullptr, &p.fuse_bias);
  visit_upsampler("final_up", p.final_up, fn);
  fn("head.weights", &p.head_weights, nullptr);
  fn("head.bias", nullptr, &p.head_bias);
}

std::string file_for(const std::string& name) {
  std::string f = name;
  std::replace(f.begin(), f.end(), '.', '_');
  return f + ".grd";
}

nlohmann::json lcau_descriptors(DecoderParams& p) {
  nlohmann::json out = nlohmann::json::array();
  auto add = [&](const std::string& name, const UpsamplerParams& up) {
    if (const auto* l = std::get_if<LcauParams>(&up)) {
      out.push_back({{"name", name}, {"r", l->r}, {"k", l->k}, {"C", l->channels()}});
    }
  };
  for (std::size_t i = 0; i < p.c3_up.size(); ++i) add("c3_up." + std::to_string(i), p.c3_up[i]);
  for (std::size_t i = 0; i < p.c4_up.size(); ++i) add("c4_up." + std::to_string(i), p.c4_up[i]);
  for (std::size_t i = 0; i < p.c5_up.size(); ++i) add("c5_up." + std::to_string(i), p.c5_up[i]);
  add("final_up", p.final_up);
  return out;
}

}  // namespace

void save_decoder(const DecoderParams& params, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DecoderParams copy = params;
  nlohmann::json tensors = nlohmann::json::array();
  visit_params(copy, [&](const std::string& name, Grid* grid, std::vector<double>* bias) {
    const std::string file = file_for(name);
    const Grid g = grid != nullptr ? *grid : Grid({1, 1, 1, bias->size()}, *bias);
    save_grd1(dir / file, g);
    const Shape& s = g.shape();
    tensors.push_back({{"name", name}, {"file", file}, {"shape", {s.n, s.c, s.h, s.w}}});
  });
  const DecoderConfig& cfg = params.config;
  nlohmann::json manifest{{"format", "rsca-decoder"},
                          {"version", 1},
                          {"channels", cfg.channels},
                          {"upsampler", std::string(to_string(cfg.upsampler))},
                          {"placement", std::string(to_string(cfg.placement))},
                          {"lcau_k", cfg.lcau_k},
                          {"lcau", lcau_descriptors(copy)},
                          {"tensors", tensors}};
  std::ofstream os(dir / "manifest.json", std::ios::trunc);
  if (!os) throw FormatError("cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << '\n';
}

DecoderParams load_decoder(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw FormatError("decoder bundle: missing " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    is >> manifest;
    if (manifest.at("format") != "rsca-decoder") throw FormatError("decoder bundle: unexpected format tag");
    DecoderConfig cfg;
    cfg.channels = manifest.at("channels").get<std::size_t>();
    cfg.upsampler = parse_upsampler_kind(manifest.at("upsampler").get<std::string>());
    cfg.placement = parse_lcau_placement(manifest.at("placement").get<std::string>());
    cfg.lcau_k = manifest.at("lcau_k").get<int>();
    DecoderParams params = DecoderParams::init(cfg, 0);

    std::unordered_map<std::string, std::string> files;
    for (const auto& t : manifest.at("tensors")) files[t.at("name").get<std::string>()] = t.at("file").get<std::string>();
    visit_params(params, [&](const std::string& name, Grid* grid, std::vector<double>* bias) {
      auto it = files.find(name);
      if (it == files.end()) throw FormatError("decoder bundle: missing tensor " + name);
      Grid g = load_grd1(dir / it->second);
      if (grid != nullptr) {
        if (g.shape() != grid->shape()) {
          throw FormatError("decoder bundle: tensor " + name + " has shape " + to_string(g.shape()) + ", expected " +
                            to_string(grid->shape()));
        }
        *grid = std::move(g);
      } else {
        if (g.size() != bias->size()) throw FormatError("decoder bundle: bias " + name + " has wrong length");
        bias->assign(g.data().begin(), g.data().end());
      }
    });
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("decoder bundle: malformed manifest: ") + e.what());
  }
}

}  // namespace rsca
