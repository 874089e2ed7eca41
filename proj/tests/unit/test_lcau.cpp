#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rsca/errors.hpp"
#include "rsca/gradcheck.hpp"
#include "rsca/grid_ops.hpp"
#include "rsca/lcau.hpp"

using namespace rsca;

namespace {

Grid one_hot_centre(std::size_t n, int k, std::size_t h, std::size_t w) {
  const auto taps = static_cast<std::size_t>(k * k);
  Grid g({n, taps, h, w});
  for (std::size_t b = 0; b < n; ++b) {
    for (double& v : g.plane(b, taps / 2)) v = 1.0;
  }
  return g;
}

Grid normalised_random_weights(std::size_t n, int k, std::size_t h, std::size_t w, std::uint64_t seed) {
  return channel_softmax(random_uniform({n, static_cast<std::size_t>(k * k), h, w}, -2, 2, seed));
}

double weighted(const Grid& g, const Grid& cot) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * cot[i];
  return s;
}

}  // namespace

TEST_SUITE("lcau weights") {
  TEST_CASE("zero parameters give uniform 1/k^2 kernels") {
    const Grid w = lcau_weights(random_uniform({1, 3, 4, 4}, -1, 1, 1), LcauParams::zeros(3, 2, 5));
    CHECK(w.shape() == Shape{1, 25, 8, 8});
    for (double v : w.data()) CHECK(v == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
  }

  TEST_CASE("bias 40 on the centre tap saturates to one-hot") {
    LcauParams p = LcauParams::zeros(2, 2, 5);
    p.gen_bias[12] = 40.0;
    const Grid w = lcau_weights(random_uniform({1, 2, 3, 3}, -1, 1, 2), p);
    for (double v : w.plane(0, 12)) CHECK(v >= 1.0 - 1e-6);
  }

  TEST_CASE("kernels sum to one everywhere and repeat within each r x r block") {
    const LcauParams p = LcauParams::random(3, 3, 5, 4);
    const Grid w = lcau_weights(random_uniform({2, 3, 4, 5}, -1, 1, 3), p);
    const Shape s = w.shape();
    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t y = 0; y < s.h; ++y) {
        for (std::size_t x = 0; x < s.w; ++x) {
          double sum = 0.0;
          for (std::size_t t = 0; t < s.c; ++t) {
            sum += w.at(n, t, y, x);
            CHECK(w.at(n, t, y, x) == w.at(n, t, y - y % 3, x - x % 3));
          }
          CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("channel mismatch is a shape error") {
    CHECK_THROWS_AS(lcau_weights(Grid({1, 2, 3, 3}), LcauParams::zeros(3)), ShapeError);
  }

  TEST_CASE("even k is rejected") { CHECK_THROWS(LcauParams::zeros(2, 2, 4).validate()); }
}

TEST_SUITE("local reassembly") {
  TEST_CASE("uniform weights on a constant interior reproduce the constant") {
    const Grid in({1, 2, 7, 7}, 3.5);
    const Grid w({1, 9, 14, 14}, 1.0 / 9.0);
    const Grid out = local_reassembly(in, w, 2, 3);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t y = 2; y < 12; ++y) {
        for (std::size_t x = 2; x < 12; ++x) CHECK(out.at(0, c, y, x) == doctest::Approx(3.5).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("one-hot centre weights are bit-identical to nearest upsampling") {
    for (int k : {1, 3, 5}) {
      for (int r : {1, 2, 3}) {
        const Grid in = random_uniform({2, 3, 4, 5}, -1, 1, static_cast<std::uint64_t>(k * 10 + r));
        const auto ur = static_cast<std::size_t>(r);
        const Grid out = local_reassembly(in, one_hot_centre(2, k, 4 * ur, 5 * ur), r, k);
        CHECK(out == nearest_upsample(in, r));
      }
    }
  }

  TEST_CASE("random 1x2x3x3, r = 2, k = 3 matches the nested-loop oracle bit-exactly") {
    const Grid in = random_uniform({1, 2, 3, 3}, -1, 1, 5);
    const Grid w = normalised_random_weights(1, 3, 6, 6, 6);
    CHECK(local_reassembly(in, w, 2, 3) == oracle::reassembly(in, w, 2, 3));
  }

  TEST_CASE("inconsistent weight extents are a shape error") {
    CHECK_THROWS_AS(local_reassembly(Grid({1, 1, 3, 3}), Grid({1, 9, 5, 6}), 2, 3), ShapeError);
    CHECK_THROWS_AS(local_reassembly(Grid({1, 1, 3, 3}), Grid({1, 8, 6, 6}), 2, 3), ShapeError);
  }

  TEST_CASE("outputs stay inside the range of each source window") {
    const Grid in = random_uniform({1, 2, 5, 5}, -1, 1, 7);
    const Grid w = normalised_random_weights(1, 3, 10, 10, 8);
    const Grid out = local_reassembly(in, w, 2, 3);
    for (std::size_t c = 0; c < 2; ++c) {
      // interior positions only: at the border the zero padding joins the window
      for (std::size_t y = 2; y < 8; ++y) {
        for (std::size_t x = 2; x < 8; ++x) {
          double lo = 1e9, hi = -1e9;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const double v = in.at(0, c, static_cast<std::size_t>(static_cast<int>(y / 2) + dy),
                                     static_cast<std::size_t>(static_cast<int>(x / 2) + dx));
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          CHECK(out.at(0, c, y, x) >= lo - 1e-12);
          CHECK(out.at(0, c, y, x) <= hi + 1e-12);
        }
      }
    }
  }
}

TEST_SUITE("lcau forward") {
  TEST_CASE("zero parameters equal the box-filtered nearest upsample") {
    const Grid in = random_uniform({2, 3, 5, 4}, -1, 1, 9);
    const Grid out = lcau_forward(in, LcauParams::zeros(3, 2, 5)).output;
    const Grid ref = oracle::box_filtered_nearest(in, 2, 5);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i] - ref[i]) <= 1e-12);
  }

  TEST_CASE("r = 1 with a saturating centre bias reproduces the input") {
    LcauParams p = LcauParams::zeros(2, 1, 3);
    p.gen_bias[4] = 40.0;
    const Grid in = random_uniform({1, 2, 4, 4}, -1, 1, 10);
    const Grid out = lcau_forward(in, p).output;
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(std::abs(out[i] - in[i]) <= 1e-5);
  }

  TEST_CASE("1x64x20x20 with r = 2 gives 1x64x40x40") {
    const Grid out = lcau_forward(Grid({1, 64, 20, 20}), LcauParams::zeros(64, 2, 5)).output;
    CHECK(out.shape() == Shape{1, 64, 40, 40});
  }

  TEST_CASE("identical seeds give bit-identical parameters, outputs and gradients") {
    const Grid in = random_uniform({1, 3, 4, 4}, -1, 1, 11);
    const LcauParams a = LcauParams::random(3, 2, 5, 12);
    const LcauParams b = LcauParams::random(3, 2, 5, 12);
    CHECK(a.gen_weights == b.gen_weights);
    CHECK(a.gen_bias == b.gen_bias);
    const auto fa = lcau_forward(in, a);
    const auto fb = lcau_forward(in, b);
    CHECK(fa.output == fb.output);
    const Grid cot = random_uniform(fa.output.shape(), -1, 1, 13);
    const auto ga = lcau_backward(cot, fa.saved);
    const auto gb = lcau_backward(cot, fb.saved);
    CHECK(ga.input == gb.input);
    CHECK(ga.gen_weights == gb.gen_weights);
    CHECK(ga.gen_bias == gb.gen_bias);
  }
}

TEST_SUITE("lcau backward") {
  TEST_CASE("zero cotangent gives zero gradients") {
    const auto f = lcau_forward(random_uniform({1, 2, 3, 3}, -1, 1, 14), LcauParams::random(2, 2, 3, 15));
    const auto g = lcau_backward(Grid(f.output.shape()), f.saved);
    for (double v : g.input.data()) CHECK(v == 0.0);
    for (double v : g.gen_weights.data()) CHECK(v == 0.0);
    for (double v : g.gen_bias) CHECK(v == 0.0);
  }

  TEST_CASE("frozen weights: reassembly input gradient matches finite differences") {
    Grid in = random_uniform({1, 2, 4, 4}, -1, 1, 16);
    const Grid w = normalised_random_weights(1, 3, 8, 8, 17);
    const Grid cot = random_uniform({1, 2, 8, 8}, -1, 1, 18);
    const auto g = local_reassembly_backward(cot, in, w, 2, 3);
    std::vector<std::size_t> all(in.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto num = central_difference([&] { return weighted(local_reassembly(in, w, 2, 3), cot); }, in.data(), all, 1e-3);
    CHECK(max_relative_error(g.input.data(), num) <= 1e-4);
  }

  TEST_CASE("full path on 1x2x3x3, r = 2, k = 3 matches finite differences for all three gradients") {
    Grid in = random_uniform({1, 2, 3, 3}, -1, 1, 19);
    LcauParams p = LcauParams::random(2, 2, 3, 20);
    p.gen_bias = random_uniform(9, -1, 1, 21);
    const Grid cot = random_uniform({1, 2, 6, 6}, -1, 1, 22);
    const auto g = lcau_backward(cot, lcau_forward(in, p).saved);
    auto loss = [&] { return weighted(lcau_forward(in, p).output, cot); };
    auto check = [&](std::span<double> x, std::span<const double> analytic) {
      std::vector<std::size_t> all(x.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const auto num = central_difference(loss, x, all, 1e-3);
      CHECK(max_relative_error(analytic, num) <= 1e-4);
    };
    check(in.data(), g.input.data());
    check(p.gen_weights.data(), g.gen_weights.data());
    check(p.gen_bias, g.gen_bias);
  }

  TEST_CASE("mismatched cotangent is a shape error") {
    const auto f = lcau_forward(Grid({1, 2, 3, 3}), LcauParams::zeros(2, 2, 3));
    CHECK_THROWS_AS(lcau_backward(Grid({1, 2, 5, 6}), f.saved), ShapeError);
  }
}
