#include "rsca/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsca/errors.hpp"

namespace rsca {
namespace {

void require_rate(int r, const char* op) {
  if (r < 1) throw ParameterError(std::string(op) + ": upsample rate must be >= 1");
}

struct BilinearTap {
  std::size_t i0;
  std::size_t i1;
  double frac;
};

// align_corners = false: src = (dst + 0.5) / r - 0.5, clamped at 0 and at the last cell.
std::vector<BilinearTap> bilinear_taps(std::size_t in_extent, int r) {
  std::vector<BilinearTap> taps(in_extent * static_cast<std::size_t>(r));
  for (std::size_t o = 0; o < taps.size(); ++o) {
    double src = (static_cast<double>(o) + 0.5) / r - 0.5;
    src = std::max(src, 0.0);
    auto i0 = static_cast<std::size_t>(std::floor(src));
    i0 = std::min(i0, in_extent - 1);
    const std::size_t i1 = std::min(i0 + 1, in_extent - 1);
    taps[o] = {i0, i1, src - static_cast<double>(i0)};
  }
  return taps;
}

}  // namespace

Grid conv3x3_forward(const Grid& input, const Grid& weights, std::span<const double> bias) {
  const Shape& in = input.shape();
  const Shape& ws = weights.shape();
  if (ws.h != 3 || ws.w != 3) throw ShapeError("conv3x3: kernel must be 3x3, got " + to_string(ws));
  if (ws.c != in.c) {
    throw ShapeError("conv3x3: weights expect " + std::to_string(ws.c) + " input channels, got " +
                     std::to_string(in.c));
  }
  if (bias.size() != ws.n) throw ShapeError("conv3x3: bias length must equal output channels");

  const std::size_t cout = ws.n;
  Grid out({in.n, cout, in.h, in.w});
  const auto h = static_cast<std::ptrdiff_t>(in.h);
  const auto w = static_cast<std::ptrdiff_t>(in.w);
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < cout; ++co) {
      auto dst = out.plane(n, co);
      std::fill(dst.begin(), dst.end(), bias[co]);
      for (std::size_t ci = 0; ci < in.c; ++ci) {
        const auto src = input.plane(n, ci);
        for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
          for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
            const double k = weights.at(co, ci, static_cast<std::size_t>(ky), static_cast<std::size_t>(kx));
            if (k == 0.0) continue;
            const std::ptrdiff_t dy = ky - 1;
            const std::ptrdiff_t dx = kx - 1;
            const std::ptrdiff_t y0 = std::max<std::ptrdiff_t>(0, -dy);
            const std::ptrdiff_t y1 = std::min(h, h - dy);
            const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, -dx);
            const std::ptrdiff_t x1 = std::min(w, w - dx);
            for (std::ptrdiff_t y = y0; y < y1; ++y) {
              double* row = dst.data() + y * w;
              const double* srow = src.data() + (y + dy) * w + dx;
              for (std::ptrdiff_t x = x0; x < x1; ++x) row[x] += k * srow[x];
            }
          }
        }
      }
    }
  }
  return out;
}

Conv3x3Grads conv3x3_backward(const Grid& grad_out, const Grid& input, const Grid& weights) {
  const Shape& in = input.shape();
  const Shape& ws = weights.shape();
  if (ws.h != 3 || ws.w != 3 || ws.c != in.c) throw ShapeError("conv3x3_backward: weight shape mismatch");
  const Shape expected{in.n, ws.n, in.h, in.w};
  if (grad_out.shape() != expected) {
    throw ShapeError("conv3x3_backward: grad_out " + to_string(grad_out.shape()) + " expected " +
                     to_string(expected));
  }

  Conv3x3Grads g{zeros_like(input), zeros_like(weights), std::vector<double>(ws.n, 0.0)};
  const auto h = static_cast<std::ptrdiff_t>(in.h);
  const auto w = static_cast<std::ptrdiff_t>(in.w);
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < ws.n; ++co) {
      const auto go = grad_out.plane(n, co);
      for (double v : go) g.bias[co] += v;
      for (std::size_t ci = 0; ci < in.c; ++ci) {
        const auto src = input.plane(n, ci);
        auto gin = g.input.plane(n, ci);
        for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
          for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
            const auto uky = static_cast<std::size_t>(ky);
            const auto ukx = static_cast<std::size_t>(kx);
            const double k = weights.at(co, ci, uky, ukx);
            const std::ptrdiff_t dy = ky - 1;
            const std::ptrdiff_t dx = kx - 1;
            const std::ptrdiff_t y0 = std::max<std::ptrdiff_t>(0, -dy);
            const std::ptrdiff_t y1 = std::min(h, h - dy);
            const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, -dx);
            const std::ptrdiff_t x1 = std::min(w, w - dx);
            double acc = 0.0;
            for (std::ptrdiff_t y = y0; y < y1; ++y) {
              const double* grow = go.data() + y * w;
              const double* srow = src.data() + (y + dy) * w + dx;
              double* girow = gin.data() + (y + dy) * w + dx;
              for (std::ptrdiff_t x = x0; x < x1; ++x) {
                acc += grow[x] * srow[x];
                girow[x] += grow[x] * k;
              }
            }
            g.weights.at(co, ci, uky, ukx) += acc;
          }
        }
      }
    }
  }
  return g;
}

Grid nearest_upsample(const Grid& input, int r) {
  require_rate(r, "nearest_upsample");
  const Shape& s = input.shape();
  const auto ur = static_cast<std::size_t>(r);
  Grid out({s.n, s.c, s.h * ur, s.w * ur});
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (std::size_t y = 0; y < s.h * ur; ++y) {
        for (std::size_t x = 0; x < s.w * ur; ++x) out.at(n, c, y, x) = input.at(n, c, y / ur, x / ur);
      }
    }
  }
  return out;
}

Grid nearest_upsample_backward(const Grid& grad_out, int r) {
  require_rate(r, "nearest_upsample_backward");
  const Shape& s = grad_out.shape();
  const auto ur = static_cast<std::size_t>(r);
  if (s.h % ur != 0 || s.w % ur != 0) throw ShapeError("nearest_upsample_backward: extents not divisible by r");
  Grid g({s.n, s.c, s.h / ur, s.w / ur});
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (std::size_t y = 0; y < s.h; ++y) {
        for (std::size_t x = 0; x < s.w; ++x) g.at(n, c, y / ur, x / ur) += grad_out.at(n, c, y, x);
      }
    }
  }
  return g;
}

Grid bilinear_upsample(const Grid& input, int r) {
  require_rate(r, "bilinear_upsample");
  const Shape& s = input.shape();
  const auto ur = static_cast<std::size_t>(r);
  Grid out({s.n, s.c, s.h * ur, s.w * ur});
  if (s.size() == 0) return out;
  const auto ty = bilinear_taps(s.h, r);
  const auto tx = bilinear_taps(s.w, r);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (std::size_t y = 0; y < ty.size(); ++y) {
        const auto& a = ty[y];
        for (std::size_t x = 0; x < tx.size(); ++x) {
          const auto& b = tx[x];
          const double top = (1.0 - b.frac) * input.at(n, c, a.i0, b.i0) + b.frac * input.at(n, c, a.i0, b.i1);
          const double bot = (1.0 - b.frac) * input.at(n, c, a.i1, b.i0) + b.frac * input.at(n, c, a.i1, b.i1);
          out.at(n, c, y, x) = (1.0 - a.frac) * top + a.frac * bot;
        }
      }
    }
  }
  return out;
}

Grid bilinear_upsample_backward(const Grid& grad_out, const Shape& input_shape, int r) {
  require_rate(r, "bilinear_upsample_backward");
  const auto ur = static_cast<std::size_t>(r);
  const Shape expected{input_shape.n, input_shape.c, input_shape.h * ur, input_shape.w * ur};
  if (grad_out.shape() != expected) throw ShapeError("bilinear_upsample_backward: grad_out shape mismatch");
  Grid g(input_shape);
  if (input_shape.size() == 0) return g;
  const auto ty = bilinear_taps(input_shape.h, r);
  const auto tx = bilinear_taps(input_shape.w, r);
  for (std::size_t n = 0; n < expected.n; ++n) {
    for (std::size_t c = 0; c < expected.c; ++c) {
      for (std::size_t y = 0; y < ty.size(); ++y) {
        const auto& a = ty[y];
        for (std::size_t x = 0; x < tx.size(); ++x) {
          const auto& b = tx[x];
          const double v = grad_out.at(n, c, y, x);
          g.at(n, c, a.i0, b.i0) += v * (1.0 - a.frac) * (1.0 - b.frac);
          g.at(n, c, a.i0, b.i1) += v * (1.0 - a.frac) * b.frac;
          g.at(n, c, a.i1, b.i0) += v * a.frac * (1.0 - b.frac);
          g.at(n, c, a.i1, b.i1) += v * a.frac * b.frac;
        }
      }
    }
  }
  return g;
}

Grid channel_softmax(const Grid& input) {
  const Shape& s = input.shape();
  if (s.c == 0) throw ShapeError("channel_softmax: need at least one channel");
  Grid out(s);
  const std::size_t hw = s.plane();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t p = 0; p < hw; ++p) {
      const std::size_t base = n * s.c * hw + p;
      double m = input[base];
      for (std::size_t c = 1; c < s.c; ++c) m = std::max(m, input[base + c * hw]);
      double sum = 0.0;
      for (std::size_t c = 0; c < s.c; ++c) {
        const double e = std::exp(input[base + c * hw] - m);
        out[base + c * hw] = e;
        sum += e;
      }
      for (std::size_t c = 0; c < s.c; ++c) out[base + c * hw] /= sum;
    }
  }
  return out;
}

Grid channel_softmax_backward(const Grid& grad_out, const Grid& softmax_out) {
  const Shape& s = softmax_out.shape();
  if (grad_out.shape() != s) throw ShapeError("channel_softmax_backward: shape mismatch");
  Grid g(s);
  const std::size_t hw = s.plane();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t p = 0; p < hw; ++p) {
      const std::size_t base = n * s.c * hw + p;
      double dot = 0.0;
      for (std::size_t c = 0; c < s.c; ++c) dot += grad_out[base + c * hw] * softmax_out[base + c * hw];
      for (std::size_t c = 0; c < s.c; ++c) {
        const std::size_t i = base + c * hw;
        g[i] = softmax_out[i] * (grad_out[i] - dot);
      }
    }
  }
  return g;
}

namespace {

void check_deconv(const Shape& in, const Shape& ws, std::size_t bias_len, int r) {
  require_rate(r, "deconv_upsample");
  const auto k = static_cast<std::size_t>(2 * r);
  if (ws.h != k || ws.w != k) {
    throw ShapeError("deconv_upsample: kernel must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (ws.n != in.c) throw ShapeError("deconv_upsample: weights expect " + std::to_string(ws.n) + " input channels");
  if (bias_len != ws.c) throw ShapeError("deconv_upsample: bias length must equal output channels");
}

}  // namespace

Grid deconv_upsample(const Grid& input, const Grid& weights, std::span<const double> bias, int r) {
  const Shape& in = input.shape();
  const Shape& ws = weights.shape();
  check_deconv(in, ws, bias.size(), r);
  const auto ur = static_cast<std::ptrdiff_t>(r);
  const std::ptrdiff_t k = 2 * ur;
  const std::ptrdiff_t crop = ur / 2;
  const auto oh = static_cast<std::ptrdiff_t>(in.h) * ur;
  const auto ow = static_cast<std::ptrdiff_t>(in.w) * ur;
  Grid out({in.n, ws.c, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < ws.c; ++co) {
      auto dst = out.plane(n, co);
      std::fill(dst.begin(), dst.end(), bias[co]);
      for (std::size_t ci = 0; ci < in.c; ++ci) {
        for (std::size_t iy = 0; iy < in.h; ++iy) {
          for (std::size_t ix = 0; ix < in.w; ++ix) {
            const double v = input.at(n, ci, iy, ix);
            for (std::ptrdiff_t ky = 0; ky < k; ++ky) {
              const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(iy) * ur + ky - crop;
              if (y < 0 || y >= oh) continue;
              for (std::ptrdiff_t kx = 0; kx < k; ++kx) {
                const std::ptrdiff_t x = static_cast<std::ptrdiff_t>(ix) * ur + kx - crop;
                if (x < 0 || x >= ow) continue;
                dst[static_cast<std::size_t>(y * ow + x)] +=
                    v * weights.at(ci, co, static_cast<std::size_t>(ky), static_cast<std::size_t>(kx));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

DeconvGrads deconv_upsample_backward(const Grid& grad_out, const Grid& input, const Grid& weights, int r) {
  const Shape& in = input.shape();
  const Shape& ws = weights.shape();
  check_deconv(in, ws, ws.c, r);
  const auto ur = static_cast<std::ptrdiff_t>(r);
  const std::ptrdiff_t k = 2 * ur;
  const std::ptrdiff_t crop = ur / 2;
  const auto oh = static_cast<std::ptrdiff_t>(in.h) * ur;
  const auto ow = static_cast<std::ptrdiff_t>(in.w) * ur;
  const Shape expected{in.n, ws.c, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
  if (grad_out.shape() != expected) throw ShapeError("deconv_upsample_backward: grad_out shape mismatch");

  DeconvGrads g{zeros_like(input), zeros_like(weights), std::vector<double>(ws.c, 0.0)};
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < ws.c; ++co) {
      const auto go = grad_out.plane(n, co);
      for (double v : go) g.bias[co] += v;
      for (std::size_t ci = 0; ci < in.c; ++ci) {
        for (std::size_t iy = 0; iy < in.h; ++iy) {
          for (std::size_t ix = 0; ix < in.w; ++ix) {
            const double v = input.at(n, ci, iy, ix);
            double acc = 0.0;
            for (std::ptrdiff_t ky = 0; ky < k; ++ky) {
              const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(iy) * ur + ky - crop;
              if (y < 0 || y >= oh) continue;
              for (std::ptrdiff_t kx = 0; kx < k; ++kx) {
                const std::ptrdiff_t x = static_cast<std::ptrdiff_t>(ix) * ur + kx - crop;
                if (x < 0 || x >= ow) continue;
                const double gv = go[static_cast<std::size_t>(y * ow + x)];
                const auto uky = static_cast<std::size_t>(ky);
                const auto ukx = static_cast<std::size_t>(kx);
                acc += gv * weights.at(ci, co, uky, ukx);
                g.weights.at(ci, co, uky, ukx) += gv * v;
              }
            }
            g.input.at(n, ci, iy, ix) += acc;
          }
        }
      }
    }
  }
  return g;
}

Grid pixel_shuffle(const Grid& input, int r) {
  require_rate(r, "pixel_shuffle");
  const Shape& s = input.shape();
  const auto ur = static_cast<std::size_t>(r);
  const std::size_t rr = ur * ur;
  if (s.c % rr != 0) {
    throw ShapeError("pixel_shuffle: " + std::to_string(s.c) + " channels not divisible by r^2 = " +
                     std::to_string(rr));
  }
  const std::size_t c_out = s.c / rr;
  Grid out({s.n, c_out, s.h * ur, s.w * ur});
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < c_out; ++c) {
      for (std::size_t i = 0; i < ur; ++i) {
        for (std::size_t j = 0; j < ur; ++j) {
          const std::size_t src_c = c * rr + i * ur + j;
          for (std::size_t y = 0; y < s.h; ++y) {
            for (std::size_t x = 0; x < s.w; ++x) out.at(n, c, y * ur + i, x * ur + j) = input.at(n, src_c, y, x);
          }
        }
      }
    }
  }
  return out;
}

Grid pixel_unshuffle(const Grid& input, int r) {
  require_rate(r, "pixel_unshuffle");
  const Shape& s = input.shape();
  const auto ur = static_cast<std::size_t>(r);
  if (s.h % ur != 0 || s.w % ur != 0) throw ShapeError("pixel_unshuffle: extents not divisible by r");
  const std::size_t rr = ur * ur;
  const std::size_t h = s.h / ur;
  const std::size_t w = s.w / ur;
  Grid out({s.n, s.c * rr, h, w});
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (std::size_t i = 0; i < ur; ++i) {
        for (std::size_t j = 0; j < ur; ++j) {
          const std::size_t dst_c = c * rr + i * ur + j;
          for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) out.at(n, dst_c, y, x) = input.at(n, c, y * ur + i, x * ur + j);
          }
        }
      }
    }
  }
  return out;
}

Grid sigmoid(const Grid& input) {
  Grid out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double v = input[i];
    // split on sign so exp never overflows
    if (v >= 0) {
      out[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      out[i] = e / (1.0 + e);
    }
  }
  return out;
}

Grid sigmoid_backward(const Grid& grad_out, const Grid& sigmoid_out) {
  if (grad_out.shape() != sigmoid_out.shape()) throw ShapeError("sigmoid_backward: shape mismatch");
  Grid g(grad_out.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_out[i] * sigmoid_out[i] * (1.0 - sigmoid_out[i]);
  return g;
}

Grid concat_channels(std::span<const Grid> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  Shape s = parts.front().shape();
  std::size_t channels = 0;
  for (const auto& p : parts) {
    const Shape& ps = p.shape();
    if (ps.n != s.n || ps.h != s.h || ps.w != s.w) {
      throw ShapeError("concat_channels: " + to_string(ps) + " incompatible with " + to_string(s));
    }
    channels += ps.c;
  }
  s.c = channels;
  Grid out(s);
  for (std::size_t n = 0; n < s.n; ++n) {
    std::size_t c0 = 0;
    for (const auto& p : parts) {
      for (std::size_t c = 0; c < p.shape().c; ++c) {
        const auto src = p.plane(n, c);
        std::copy(src.begin(), src.end(), out.plane(n, c0 + c).begin());
      }
      c0 += p.shape().c;
    }
  }
  return out;
}

std::vector<Grid> split_channels(const Grid& input, std::span<const std::size_t> widths) {
  const Shape& s = input.shape();
  std::size_t total = 0;
  for (auto w : widths) total += w;
  if (total != s.c) throw ShapeError("split_channels: widths do not sum to channel count");
  std::vector<Grid> parts;
  parts.reserve(widths.size());
  std::size_t c0 = 0;
  for (auto wc : widths) {
    Grid part({s.n, wc, s.h, s.w});
    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t c = 0; c < wc; ++c) {
        const auto src = input.plane(n, c0 + c);
        std::copy(src.begin(), src.end(), part.plane(n, c).begin());
      }
    }
    parts.push_back(std::move(part));
    c0 += wc;
  }
  return parts;
}

}  // namespace rsca
