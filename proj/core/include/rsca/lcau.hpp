#pragma once

#include <cstdint>
#include <vector>

#include "rsca/grid.hpp"

namespace rsca {

/// Local context-aware upsampling.
///
/// A 3x3 convolution on the low-resolution map predicts k*k logits per cell,
/// those logits are nearest-upsampled by r and softmax-normalised over the
/// channel axis, and every high-resolution output pixel is the weighted sum
/// of the k x k low-resolution window centred on its source cell.
/// Out-of-range window taps read zero.
struct LcauParams {
  Grid gen_weights;               ///< [k*k, C, 3, 3]
  std::vector<double> gen_bias;   ///< k*k
  int r = 2;                      ///< upsample rate
  int k = 5;                      ///< local window side, odd

  std::size_t channels() const { return gen_weights.shape().c; }
  std::size_t taps() const { return static_cast<std::size_t>(k) * static_cast<std::size_t>(k); }

  /// Throws ParameterError / ShapeError on a malformed configuration.
  void validate() const;

  static LcauParams zeros(std::size_t channels, int r = 2, int k = 5);
  static LcauParams random(std::size_t channels, int r, int k, std::uint64_t seed);
};

/// [n, C, h, w] -> [n, k*k, r h, r w]; each kernel sums to one.
Grid lcau_weights(const Grid& input, const LcauParams& params);

/// Weighted gather of k x k source windows. weights: [n, k*k, r h, r w].
Grid local_reassembly(const Grid& input, const Grid& weights, int r, int k);

struct ReassemblyGrads {
  Grid input;
  Grid weights;
};

ReassemblyGrads local_reassembly_backward(const Grid& grad_out, const Grid& input, const Grid& weights, int r,
                                          int k);

/// Everything the backward pass needs; immutable once produced.
struct LcauSaved {
  Grid input;
  Grid weights;  ///< normalised kernels
  LcauParams params;
};

struct LcauResult {
  Grid output;
  LcauSaved saved;
};

LcauResult lcau_forward(const Grid& input, const LcauParams& params);

struct LcauGrads {
  Grid input;
  Grid gen_weights;
  std::vector<double> gen_bias;
};

/// Cotangents through both the reassembly path and the weight-generation
/// path (softmax, nearest upsample, convolution).
LcauGrads lcau_backward(const Grid& grad_out, const LcauSaved& saved);

}  // namespace rsca
