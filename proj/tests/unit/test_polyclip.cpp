#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsca/eval.hpp"
#include "rsca/polyclip.hpp"

using namespace rsca;

namespace {

Ring square(double x, double y, double s) { return {{x, y}, {x + s, y}, {x + s, y + s}, {x, y + s}}; }

double region_area(const Region& r) {
  double a = 0.0;
  for (const auto& o : r.outers) a += signed_area(o);
  for (const auto& h : r.holes) a += signed_area(h);
  return a;
}

}  // namespace

TEST_CASE("unit squares offset by half a side") {
  const std::vector<Ring> a{square(0, 0, 1)};
  const std::vector<Ring> b{square(0.5, 0, 1)};
  CHECK(boolean_area(a, b, BoolOp::Intersection) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(boolean_area(a, b, BoolOp::Union) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(boolean_area(a, b, BoolOp::Difference) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(boolean_area(a, b, BoolOp::Xor) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical and disjoint operands") {
  const std::vector<Ring> a{square(0, 0, 2)};
  const std::vector<Ring> far{square(5, 5, 1)};
  CHECK(boolean_area(a, a, BoolOp::Intersection) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(boolean_area(a, a, BoolOp::Union) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(boolean_area(a, far, BoolOp::Intersection) == 0.0);
  CHECK(boolean_area(a, far, BoolOp::Union) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("edge-sharing squares merge into one outline") {
  const std::vector<Ring> a{square(0, 0, 1)};
  const std::vector<Ring> b{square(1, 0, 1)};
  const Region u = boolean_op(a, b, BoolOp::Union);
  REQUIRE(u.outers.size() == 1);
  CHECK(u.holes.empty());
  CHECK(u.outers[0].size() == 4);
  CHECK(region_area(u) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(boolean_area(a, b, BoolOp::Intersection) == 0.0);
}

TEST_CASE("difference of nested squares leaves a clockwise hole") {
  const std::vector<Ring> outer{square(0, 0, 10)};
  const std::vector<Ring> inner{square(3, 3, 2)};
  const Region d = boolean_op(outer, inner, BoolOp::Difference);
  REQUIRE(d.outers.size() == 1);
  REQUIRE(d.holes.size() == 1);
  CHECK(signed_area(d.outers[0]) > 0);
  CHECK(signed_area(d.holes[0]) < 0);
  CHECK(region_area(d) == doctest::Approx(96.0).epsilon(1e-12));
}

TEST_CASE("fill rules on overlapping windings") {
  const std::vector<Ring> twice{square(0, 0, 2), square(0, 0, 2)};
  CHECK(region_area(resolve(twice, FillRule::NonZero)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(region_area(resolve(twice, FillRule::EvenOdd)) == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<Ring> bowtie{{{0, 0}, {2, 2}, {2, 0}, {0, 2}}};
  const Region r = resolve(bowtie, FillRule::EvenOdd);
  CHECK(r.outers.size() == 2);
  CHECK(region_area(r) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(resolve(bowtie, FillRule::Positive).outers.size() == 1);
}

TEST_CASE("random convex intersections agree with point sampling") {
  oracle::Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    const Polygon a = oracle::convex_fixture(rng, {100, 100}, 20, 60);
    const Polygon b = oracle::convex_fixture(rng, {120, 110}, 20, 60);
    CHECK(std::abs(polygon_iou(a, b) - oracle::raster_iou(a, b, 400)) <= 0.01);
  }
}
