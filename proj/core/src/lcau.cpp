#include "rsca/lcau.hpp"

#include <string>

#include "rsca/errors.hpp"
#include "rsca/grid_ops.hpp"

namespace rsca {
namespace {

void check_reassembly(const Shape& in, const Shape& ws, int r, int k) {
  if (r < 1) throw ParameterError("local_reassembly: r must be >= 1");
  if (k < 1 || k % 2 == 0) throw ParameterError("local_reassembly: k must be odd and positive");
  const auto ur = static_cast<std::size_t>(r);
  const auto kk = static_cast<std::size_t>(k * k);
  const Shape expected{in.n, kk, in.h * ur, in.w * ur};
  if (ws != expected) {
    throw ShapeError("local_reassembly: weights " + to_string(ws) + " expected " + to_string(expected));
  }
}

}  // namespace

void LcauParams::validate() const {
  if (r < 1) throw ParameterError("LCAU: upsample rate must be >= 1");
  if (k < 1 || k % 2 == 0) throw ParameterError("LCAU: window side k must be odd and positive");
  const Shape& s = gen_weights.shape();
  if (s.n != taps() || s.h != 3 || s.w != 3) {
    throw ShapeError("LCAU: generator weights " + to_string(s) + " must be [k*k, C, 3, 3]");
  }
  if (gen_bias.size() != taps()) throw ShapeError("LCAU: generator bias must have k*k entries");
}

LcauParams LcauParams::zeros(std::size_t channels, int r, int k) {
  LcauParams p;
  p.r = r;
  p.k = k;
  if (k < 1 || k % 2 == 0) throw ParameterError("LCAU: window side k must be odd and positive");
  p.gen_weights = Grid({p.taps(), channels, 3, 3});
  p.gen_bias.assign(p.taps(), 0.0);
  p.validate();
  return p;
}

LcauParams LcauParams::random(std::size_t channels, int r, int k, std::uint64_t seed) {
  LcauParams p = zeros(channels, r, k);
  p.gen_weights = init_weights(p.gen_weights.shape(), channels * 9, seed);
  return p;
}

Grid lcau_weights(const Grid& input, const LcauParams& params) {
  params.validate();
  if (input.shape().c != params.channels()) {
    throw ShapeError("LCAU: input has " + std::to_string(input.shape().c) + " channels, parameters expect " +
                     std::to_string(params.channels()));
  }
  const Grid logits = conv3x3_forward(input, params.gen_weights, params.gen_bias);
  return channel_softmax(nearest_upsample(logits, params.r));
}

Grid local_reassembly(const Grid& input, const Grid& weights, int r, int k) {
  const Shape& in = input.shape();
  check_reassembly(in, weights.shape(), r, k);
  const auto ur = static_cast<std::size_t>(r);
  const std::ptrdiff_t half = k / 2;
  const auto ih = static_cast<std::ptrdiff_t>(in.h);
  const auto iw = static_cast<std::ptrdiff_t>(in.w);
  Grid out({in.n, in.c, in.h * ur, in.w * ur});
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t y = 0; y < in.h * ur; ++y) {
      const auto sy = static_cast<std::ptrdiff_t>(y / ur);
      for (std::size_t x = 0; x < in.w * ur; ++x) {
        const auto sx = static_cast<std::ptrdiff_t>(x / ur);
        std::size_t tap = 0;
        for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
          for (std::ptrdiff_t dx = -half; dx <= half; ++dx, ++tap) {
            const std::ptrdiff_t yy = sy + dy;
            const std::ptrdiff_t xx = sx + dx;
            if (yy < 0 || yy >= ih || xx < 0 || xx >= iw) continue;
            const double wv = weights.at(n, tap, y, x);
            for (std::size_t c = 0; c < in.c; ++c) {
              out.at(n, c, y, x) += wv * input.at(n, c, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
            }
          }
        }
      }
    }
  }
  return out;
}

ReassemblyGrads local_reassembly_backward(const Grid& grad_out, const Grid& input, const Grid& weights, int r,
                                          int k) {
  const Shape& in = input.shape();
  check_reassembly(in, weights.shape(), r, k);
  const auto ur = static_cast<std::size_t>(r);
  if (grad_out.shape() != Shape{in.n, in.c, in.h * ur, in.w * ur}) {
    throw ShapeError("local_reassembly_backward: grad_out shape mismatch");
  }
  const std::ptrdiff_t half = k / 2;
  const auto ih = static_cast<std::ptrdiff_t>(in.h);
  const auto iw = static_cast<std::ptrdiff_t>(in.w);
  ReassemblyGrads g{zeros_like(input), zeros_like(weights)};
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t y = 0; y < in.h * ur; ++y) {
      const auto sy = static_cast<std::ptrdiff_t>(y / ur);
      for (std::size_t x = 0; x < in.w * ur; ++x) {
        const auto sx = static_cast<std::ptrdiff_t>(x / ur);
        std::size_t tap = 0;
        for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
          for (std::ptrdiff_t dx = -half; dx <= half; ++dx, ++tap) {
            const std::ptrdiff_t yy = sy + dy;
            const std::ptrdiff_t xx = sx + dx;
            if (yy < 0 || yy >= ih || xx < 0 || xx >= iw) continue;
            const auto uy = static_cast<std::size_t>(yy);
            const auto ux = static_cast<std::size_t>(xx);
            const double wv = weights.at(n, tap, y, x);
            double acc = 0.0;
            for (std::size_t c = 0; c < in.c; ++c) {
              const double go = grad_out.at(n, c, y, x);
              acc += go * input.at(n, c, uy, ux);
              g.input.at(n, c, uy, ux) += go * wv;
            }
            g.weights.at(n, tap, y, x) = acc;
          }
        }
      }
    }
  }
  return g;
}

LcauResult lcau_forward(const Grid& input, const LcauParams& params) {
  Grid weights = lcau_weights(input, params);
  Grid output = local_reassembly(input, weights, params.r, params.k);
  return {std::move(output), LcauSaved{input, std::move(weights), params}};
}

LcauGrads lcau_backward(const Grid& grad_out, const LcauSaved& saved) {
  const LcauParams& p = saved.params;
  auto reassembly = local_reassembly_backward(grad_out, saved.input, saved.weights, p.r, p.k);
  const Grid grad_up = channel_softmax_backward(reassembly.weights, saved.weights);
  const Grid grad_logits = nearest_upsample_backward(grad_up, p.r);
  auto conv = conv3x3_backward(grad_logits, saved.input, p.gen_weights);
  reassembly.input += conv.input;
  return {std::move(reassembly.input), std::move(conv.weights), std::move(conv.bias)};
}

}  // namespace rsca
