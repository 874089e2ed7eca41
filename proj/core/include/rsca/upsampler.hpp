#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "rsca/grid.hpp"
#include "rsca/lcau.hpp"

namespace rsca {

enum class UpsamplerKind { Nearest, Bilinear, Deconvolution, PixelShuffle, Lcau };

inline constexpr std::array<UpsamplerKind, 5> kAllUpsamplerKinds{
    UpsamplerKind::Nearest, UpsamplerKind::Bilinear, UpsamplerKind::Deconvolution,
    UpsamplerKind::PixelShuffle, UpsamplerKind::Lcau};

std::string_view to_string(UpsamplerKind kind);
/// Accepts "nearest", "bilinear", "deconv", "pixel-shuffle", "lcau" (case-insensitive).
UpsamplerKind parse_upsampler_kind(std::string_view name);

/// Transposed 2r x 2r convolution, C -> C channels.
struct DeconvParams {
  Grid weights;  ///< [C, C, 2r, 2r]
  std::vector<double> bias;
  int r = 2;

  static DeconvParams random(std::size_t channels, int r, std::uint64_t seed);
};

/// 3x3 convolution expanding C -> C r^2 channels, followed by depth-to-space.
struct PixelShuffleParams {
  Grid expand_weights;  ///< [C r^2, C, 3, 3]
  std::vector<double> expand_bias;
  int r = 2;

  static PixelShuffleParams random(std::size_t channels, int r, std::uint64_t seed);
};

/// Nearest and Bilinear carry no parameters (monostate).
using UpsamplerParams = std::variant<std::monostate, DeconvParams, PixelShuffleParams, LcauParams>;

/// Seeded parameters of the right alternative for `kind`; biases start at zero.
UpsamplerParams make_upsampler_params(UpsamplerKind kind, std::size_t channels, int r, std::uint64_t seed,
                                      int lcau_k = 5);

/// Dispatches to the operator for `kind`. Deconvolution, PixelShuffle and
/// Lcau require the matching params alternative (ParameterError otherwise).
Grid upsample(UpsamplerKind kind, const Grid& input, int r, const UpsamplerParams& params = {});

struct UpsampleTape {
  UpsamplerKind kind = UpsamplerKind::Nearest;
  int r = 1;
  Grid input;
  Grid expanded;                   // PixelShuffle: pre-shuffle activations
  std::optional<LcauSaved> lcau;   // Lcau only
};

struct UpsampleRecord {
  Grid output;
  UpsampleTape tape;
};

UpsampleRecord upsample_record(UpsamplerKind kind, const Grid& input, int r, const UpsamplerParams& params = {});

struct UpsampleGrads {
  Grid input;
  UpsamplerParams params;  ///< same alternative as the forward params, holding cotangents
};

UpsampleGrads upsample_backward(const Grid& grad_out, const UpsampleTape& tape, const UpsamplerParams& params);

}  // namespace rsca
