#pragma once

#include <span>
#include <vector>

#include "rsca/grid.hpp"

namespace rsca {

// Primitive operators composed by the upsampling pipeline. Every forward
// has a matching backward that maps the output cotangent to input (and
// parameter) cotangents. All functions are pure.

// ---------------------------------------------------------------------------
// 3x3 convolution, stride 1, zero padding 1.

/// weights: [C_out, C_in, 3, 3]; bias: C_out entries.
Grid conv3x3_forward(const Grid& input, const Grid& weights, std::span<const double> bias);

struct Conv3x3Grads {
  Grid input;
  Grid weights;
  std::vector<double> bias;
};

Conv3x3Grads conv3x3_backward(const Grid& grad_out, const Grid& input, const Grid& weights);

// ---------------------------------------------------------------------------
// Nearest-neighbour upsampling: out[y, x] = in[y / r, x / r].

Grid nearest_upsample(const Grid& input, int r);
/// Sums each r x r output block back onto its source cell.
Grid nearest_upsample_backward(const Grid& grad_out, int r);

// ---------------------------------------------------------------------------
// Bilinear upsampling, align_corners = false, edge-clamped source coordinates.

Grid bilinear_upsample(const Grid& input, int r);
Grid bilinear_upsample_backward(const Grid& grad_out, const Shape& input_shape, int r);

// ---------------------------------------------------------------------------
// Softmax over the channel axis at each (n, y, x).

Grid channel_softmax(const Grid& input);
/// Takes the forward *output*, not the logits.
Grid channel_softmax_backward(const Grid& grad_out, const Grid& softmax_out);

// ---------------------------------------------------------------------------
// Transposed convolution with kernel 2r x 2r and stride r. The full
// (h + 1) r output is cropped by floor(r / 2) at the top-left so the result
// is exactly (r h, r w).

/// weights: [C_in, C_out, 2r, 2r]; bias: C_out entries.
Grid deconv_upsample(const Grid& input, const Grid& weights, std::span<const double> bias, int r);

struct DeconvGrads {
  Grid input;
  Grid weights;
  std::vector<double> bias;
};

DeconvGrads deconv_upsample_backward(const Grid& grad_out, const Grid& input, const Grid& weights,
                                     int r);

// ---------------------------------------------------------------------------
// Depth-to-space: [n, c r^2, h, w] -> [n, c, r h, r w].
// out[c, y r + i, x r + j] = in[c r^2 + i r + j, y, x].

Grid pixel_shuffle(const Grid& input, int r);
/// Inverse permutation, which is also the backward pass of pixel_shuffle.
Grid pixel_unshuffle(const Grid& input, int r);

// ---------------------------------------------------------------------------
// Elementwise helpers used by the decoder head.

Grid sigmoid(const Grid& input);
Grid sigmoid_backward(const Grid& grad_out, const Grid& sigmoid_out);

/// Concatenates along the channel axis. All parts share n, h, w.
Grid concat_channels(std::span<const Grid> parts);
/// Splits a channel-concatenated grid back into parts of the given widths.
std::vector<Grid> split_channels(const Grid& input, std::span<const std::size_t> widths);

}  // namespace rsca
