#include "rsca/upsampler.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "rsca/errors.hpp"
#include "rsca/grid_ops.hpp"

namespace rsca {
namespace {

template <typename T>
const T& require_params(const UpsamplerParams& params, UpsamplerKind kind, int r) {
  const T* p = std::get_if<T>(&params);
  if (p == nullptr) {
    throw ParameterError("upsample: " + std::string(to_string(kind)) + " requires parameters");
  }
  if (p->r != r) {
    throw ParameterError("upsample: parameters built for r=" + std::to_string(p->r) + ", called with r=" +
                         std::to_string(r));
  }
  return *p;
}

}  // namespace

std::string_view to_string(UpsamplerKind kind) {
  switch (kind) {
    case UpsamplerKind::Nearest:
      return "nearest";
    case UpsamplerKind::Bilinear:
      return "bilinear";
    case UpsamplerKind::Deconvolution:
      return "deconv";
    case UpsamplerKind::PixelShuffle:
      return "pixel-shuffle";
    case UpsamplerKind::Lcau:
      return "lcau";
  }
  return "unknown";
}

UpsamplerKind parse_upsampler_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "nearest") return UpsamplerKind::Nearest;
  if (lower == "bilinear") return UpsamplerKind::Bilinear;
  if (lower == "deconv" || lower == "deconvolution") return UpsamplerKind::Deconvolution;
  if (lower == "pixel-shuffle" || lower == "pixelshuffle" || lower == "pixel_shuffle") {
    return UpsamplerKind::PixelShuffle;
  }
  if (lower == "lcau") return UpsamplerKind::Lcau;
  throw ParameterError("unknown upsampler kind '" + std::string(name) + "'");
}

DeconvParams DeconvParams::random(std::size_t channels, int r, std::uint64_t seed) {
  if (r < 1) throw ParameterError("deconv: r must be >= 1");
  const auto k = static_cast<std::size_t>(2 * r);
  DeconvParams p;
  p.r = r;
  p.weights = init_weights({channels, channels, k, k}, channels * k * k, seed);
  p.bias.assign(channels, 0.0);
  return p;
}

PixelShuffleParams PixelShuffleParams::random(std::size_t channels, int r, std::uint64_t seed) {
  if (r < 1) throw ParameterError("pixel shuffle: r must be >= 1");
  const auto rr = static_cast<std::size_t>(r * r);
  PixelShuffleParams p;
  p.r = r;
  p.expand_weights = init_weights({channels * rr, channels, 3, 3}, channels * 9, seed);
  p.expand_bias.assign(channels * rr, 0.0);
  return p;
}

UpsamplerParams make_upsampler_params(UpsamplerKind kind, std::size_t channels, int r, std::uint64_t seed,
                                      int lcau_k) {
  switch (kind) {
    case UpsamplerKind::Nearest:
    case UpsamplerKind::Bilinear:
      return std::monostate{};
    case UpsamplerKind::Deconvolution:
      return DeconvParams::random(channels, r, seed);
    case UpsamplerKind::PixelShuffle:
      return PixelShuffleParams::random(channels, r, seed);
    case UpsamplerKind::Lcau:
      return LcauParams::random(channels, r, lcau_k, seed);
  }
  return std::monostate{};
}

Grid upsample(UpsamplerKind kind, const Grid& input, int r, const UpsamplerParams& params) {
  return upsample_record(kind, input, r, params).output;
}

UpsampleRecord upsample_record(UpsamplerKind kind, const Grid& input, int r, const UpsamplerParams& params) {
  UpsampleRecord rec;
  rec.tape.kind = kind;
  rec.tape.r = r;
  rec.tape.input = input;
  switch (kind) {
    case UpsamplerKind::Nearest:
      rec.output = nearest_upsample(input, r);
      break;
    case UpsamplerKind::Bilinear:
      rec.output = bilinear_upsample(input, r);
      break;
    case UpsamplerKind::Deconvolution: {
      const auto& p = require_params<DeconvParams>(params, kind, r);
      rec.output = deconv_upsample(input, p.weights, p.bias, r);
      break;
    }
    case UpsamplerKind::PixelShuffle: {
      const auto& p = require_params<PixelShuffleParams>(params, kind, r);
      rec.tape.expanded = conv3x3_forward(input, p.expand_weights, p.expand_bias);
      rec.output = pixel_shuffle(rec.tape.expanded, r);
      break;
    }
    case UpsamplerKind::Lcau: {
      const auto& p = require_params<LcauParams>(params, kind, r);
      auto res = lcau_forward(input, p);
      rec.output = std::move(res.output);
      rec.tape.lcau = std::move(res.saved);
      break;
    }
  }
  return rec;
}

UpsampleGrads upsample_backward(const Grid& grad_out, const UpsampleTape& tape, const UpsamplerParams& params) {
  switch (tape.kind) {
    case UpsamplerKind::Nearest:
      return {nearest_upsample_backward(grad_out, tape.r), std::monostate{}};
    case UpsamplerKind::Bilinear:
      return {bilinear_upsample_backward(grad_out, tape.input.shape(), tape.r), std::monostate{}};
    case UpsamplerKind::Deconvolution: {
      const auto& p = require_params<DeconvParams>(params, tape.kind, tape.r);
      auto g = deconv_upsample_backward(grad_out, tape.input, p.weights, tape.r);
      return {std::move(g.input), DeconvParams{std::move(g.weights), std::move(g.bias), tape.r}};
    }
    case UpsamplerKind::PixelShuffle: {
      const auto& p = require_params<PixelShuffleParams>(params, tape.kind, tape.r);
      const Grid grad_expanded = pixel_unshuffle(grad_out, tape.r);
      auto g = conv3x3_backward(grad_expanded, tape.input, p.expand_weights);
      return {std::move(g.input), PixelShuffleParams{std::move(g.weights), std::move(g.bias), tape.r}};
    }
    case UpsamplerKind::Lcau: {
      if (!tape.lcau) throw ParameterError("upsample_backward: LCAU tape lacks saved context");
      auto g = lcau_backward(grad_out, *tape.lcau);
      LcauParams pg = tape.lcau->params;
      pg.gen_weights = std::move(g.gen_weights);
      pg.gen_bias = std::move(g.gen_bias);
      return {std::move(g.input), std::move(pg)};
    }
  }
  throw ParameterError("upsample_backward: unknown kind");
}

}  // namespace rsca
