#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "rsca/grid.hpp"
#include "rsca/upsampler.hpp"

namespace rsca {

/// Which stages use LCAU when the decoder's upsampler is Lcau: only the
/// lateral pyramid-to-C2 stages, or those plus the final x4 decode.
enum class LcauPlacement { FpnOnly, All };

std::string_view to_string(LcauPlacement p);
LcauPlacement parse_lcau_placement(std::string_view name);

struct DecoderConfig {
  std::size_t channels = 64;
  UpsamplerKind upsampler = UpsamplerKind::Lcau;
  LcauPlacement placement = LcauPlacement::All;
  int lcau_k = 5;

  void validate() const;
  UpsamplerKind lateral_kind() const;
  UpsamplerKind final_kind() const;
};

/// Backbone features at strides 4, 8, 16 and 32, all with the same channel count.
struct Pyramid {
  Grid c2;
  Grid c3;
  Grid c4;
  Grid c5;

  /// Throws ShapeError unless every level has `channels` channels and each
  /// level's extents are exactly half of the previous one.
  void validate(std::size_t channels) const;
};

/// Decoder weights. Biases start at zero so an all-zero pyramid decodes to
/// the constant sigmoid(head_bias).
struct DecoderParams {
  DecoderConfig config;
  std::vector<UpsamplerParams> c3_up;  ///< one x2 stage
  std::vector<UpsamplerParams> c4_up;  ///< two x2 stages
  std::vector<UpsamplerParams> c5_up;  ///< three x2 stages
  Grid fuse_weights;                   ///< [C, 4C, 3, 3]
  std::vector<double> fuse_bias;
  UpsamplerParams final_up;            ///< x4 to input resolution
  Grid head_weights;                   ///< [1, C, 3, 3]
  std::vector<double> head_bias;

  static DecoderParams init(const DecoderConfig& config, std::uint64_t seed);
};

struct DecoderTape {
  std::vector<UpsampleTape> c3;
  std::vector<UpsampleTape> c4;
  std::vector<UpsampleTape> c5;
  Grid concat;
  Grid fused;
  UpsampleTape final_up;
  Grid upsampled;
  Grid prob;
};

struct DecodeResult {
  Grid prob;  ///< [n, 1, H, W], strictly inside (0, 1)
  DecoderTape tape;
};

/// C3 / C4 / C5 are brought to C2 scale by chained x2 stages, concatenated
/// with C2 (4C channels), fused back to C channels by a 3x3 convolution,
/// upsampled x4 and projected to one sigmoid channel.
DecodeResult decode_record(const Pyramid& pyramid, const DecoderParams& params);
Grid decode(const Pyramid& pyramid, const DecoderParams& params);

struct DecoderGrads {
  Pyramid pyramid;
  DecoderParams params;
};

DecoderGrads decode_backward(const Grid& grad_prob, const DecoderTape& tape, const DecoderParams& params);

/// Stand-in backbone: five seeded stride-2 3x3 convolutions with tanh,
/// keeping the outputs of stages 2-5. image: [n, c, H, W] with H, W % 32 == 0.
Pyramid synth_pyramid(const Grid& image, std::size_t channels, std::uint64_t seed);

/// Directory of GRD1 tensors plus manifest.json.
void save_decoder(const DecoderParams& params, const std::filesystem::path& dir);
DecoderParams load_decoder(const std::filesystem::path& dir);

}  // namespace rsca
