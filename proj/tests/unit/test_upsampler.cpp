#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsca/errors.hpp"
#include "rsca/gradcheck.hpp"
#include "rsca/grid_ops.hpp"
#include "rsca/upsampler.hpp"

using namespace rsca;

TEST_CASE("names round-trip and unknown names are rejected") {
  for (UpsamplerKind k : kAllUpsamplerKinds) CHECK(parse_upsampler_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_upsampler_kind("carafe"), ParameterError);
}

TEST_CASE("nearest dispatch equals nearest_upsample") {
  const Grid in = random_uniform({1, 3, 4, 4}, -1, 1, 1);
  CHECK(upsample(UpsamplerKind::Nearest, in, 2) == nearest_upsample(in, 2));
  CHECK(upsample(UpsamplerKind::Bilinear, in, 2) == bilinear_upsample(in, 2));
}

TEST_CASE("every kind yields the same output shape for the same r") {
  const Grid in = random_uniform({2, 4, 3, 5}, -1, 1, 2);
  for (int r : {1, 2, 4}) {
    for (UpsamplerKind k : kAllUpsamplerKinds) {
      const auto params = make_upsampler_params(k, 4, r, 3);
      const Grid out = upsample(k, in, r, params);
      CHECK(out.shape() == Shape{2, 4, 3 * static_cast<std::size_t>(r), 5 * static_cast<std::size_t>(r)});
      CHECK(out.all_finite());
    }
  }
}

TEST_CASE("zero-parameter LCAU differs from nearest by exactly a k x k box filter") {
  const Grid in = random_uniform({1, 3, 5, 5}, -1, 1, 4);
  const Grid lcau = upsample(UpsamplerKind::Lcau, in, 2, LcauParams::zeros(3, 2, 5));
  const Grid ref = oracle::box_filtered_nearest(in, 2, 5);
  for (std::size_t i = 0; i < lcau.size(); ++i) CHECK(std::abs(lcau[i] - ref[i]) <= 1e-12);
}

TEST_CASE("kinds with learnable parameters require them") {
  const Grid in({1, 2, 2, 2});
  CHECK_THROWS_AS(upsample(UpsamplerKind::Deconvolution, in, 2), ParameterError);
  CHECK_THROWS_AS(upsample(UpsamplerKind::PixelShuffle, in, 2), ParameterError);
  CHECK_THROWS_AS(upsample(UpsamplerKind::Lcau, in, 2), ParameterError);
  CHECK_THROWS_AS(upsample(UpsamplerKind::Lcau, in, 3, LcauParams::zeros(2, 2, 3)), ParameterError);
}

TEST_CASE("recorded backward matches finite differences for every kind") {
  for (UpsamplerKind k : kAllUpsamplerKinds) {
    CAPTURE(to_string(k));
    Grid in = random_uniform({1, 2, 3, 3}, -1, 1, 5);
    const auto params = make_upsampler_params(k, 2, 2, 6, 3);
    const auto rec = upsample_record(k, in, 2, params);
    const Grid cot = random_uniform(rec.output.shape(), -1, 1, 7);
    const auto g = upsample_backward(cot, rec.tape, params);
    auto loss = [&] {
      const Grid out = upsample(k, in, 2, params);
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * cot[i];
      return s;
    };
    std::vector<std::size_t> all(in.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto num = central_difference(loss, in.data(), all, 1e-3);
    CHECK(max_relative_error(g.input.data(), num) <= 1e-4);
  }
}
