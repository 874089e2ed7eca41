#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsca/errors.hpp"
#include "rsca/geometry.hpp"

using namespace rsca;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) { return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}); }

bool same_rect(const Polygon& p, double x0, double y0, double x1, double y1, double tol) {
  if (p.size() != 4) return false;
  for (const Point& v : p.vertices()) {
    const bool xs = std::abs(v.x - x0) <= tol || std::abs(v.x - x1) <= tol;
    const bool ys = std::abs(v.y - y0) <= tol || std::abs(v.y - y1) <= tol;
    if (!xs || !ys) return false;
  }
  return std::abs(area(p) - (x1 - x0) * (y1 - y0)) <= tol * 100;
}

}  // namespace

TEST_SUITE("polygon measures") {
  TEST_CASE("unit and 10x10 squares") {
    CHECK(area(rect(0, 0, 1, 1)) == 1.0);
    CHECK(perimeter(rect(0, 0, 1, 1)) == 4.0);
    CHECK(area(rect(0, 0, 10, 10)) == 100.0);
    CHECK(perimeter(rect(0, 0, 10, 10)) == 40.0);
  }

  TEST_CASE("random simple decagons agree with fan triangulation") {
    oracle::Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      const Polygon p = oracle::star_polygon(rng, {50, 50}, 10, 5, 40);
      CHECK(std::abs(area(p) - oracle::fan_area(p.vertices())) <= 1e-9);
    }
  }

  TEST_CASE("orientation is normalised to counter-clockwise") {
    const Polygon cw({{0, 0}, {0, 2}, {2, 2}, {2, 0}});
    CHECK(signed_area(cw.vertices()) > 0.0);
  }

  TEST_CASE("duplicate and closing vertices are dropped") {
    const Polygon p({{0, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}});
    CHECK(p.size() == 4);
  }

  TEST_CASE("degenerate input is a geometry error") {
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}}), GeometryError);
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {2, 2}}), GeometryError);
    CHECK_THROWS_AS(Polygon({{0, 0}, {0, 0}, {0, 0}, {1, 0}}), GeometryError);
  }

  TEST_CASE("simplicity test") {
    CHECK(is_simple(rect(0, 0, 3, 2).vertices()));
    const Ring bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
    CHECK_FALSE(is_simple(bowtie));
  }
}

TEST_SUITE("shrink offset") {
  TEST_CASE("D = A / L (1 - r^2)") {
    const Polygon sq = rect(0, 0, 10, 10);
    CHECK(shrink_offset(sq, 1.0) == 0.0);
    CHECK(shrink_offset(sq, 0.4) == doctest::Approx(2.1).epsilon(1e-15));
    CHECK(shrink_offset(sq, 0.5) == doctest::Approx(1.875).epsilon(1e-15));
  }

  TEST_CASE("ratio outside (0, 1] is a parameter error") {
    CHECK_THROWS_AS(shrink_offset(rect(0, 0, 1, 1), 0.0), ParameterError);
    CHECK_THROWS_AS(shrink_offset(rect(0, 0, 1, 1), 1.2), ParameterError);
  }

  TEST_CASE("monotone decreasing in r") {
    const Polygon p = rect(0, 0, 30, 7);
    double prev = shrink_offset(p, 0.01);
    for (double r = 0.02; r <= 1.0; r += 0.01) {
      const double d = shrink_offset(p, r);
      CHECK(d < prev);
      prev = d;
    }
  }
}

TEST_SUITE("offset polygon") {
  TEST_CASE("10x10 square shrunk by 2.1 is the centred 5.8x5.8 square") {
    const auto out = offset_polygon(rect(0, 0, 10, 10), -2.1);
    REQUIRE(out.size() == 1);
    CHECK(same_rect(out[0], 2.1, 2.1, 7.9, 7.9, 1e-12));
    CHECK(area(out[0]) == doctest::Approx(33.64).epsilon(1e-12));
  }

  TEST_CASE("shrinking by half the side or more removes the square") {
    CHECK(offset_polygon(rect(0, 0, 10, 10), -5.0).empty());
    CHECK(offset_polygon(rect(0, 0, 10, 10), -6.0).empty());
  }

  TEST_CASE("zero offset returns the polygon unchanged") {
    const Polygon p = rect(1, 2, 5, 9);
    const auto out = offset_polygon(p, 0.0);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == p);
  }

  TEST_CASE("outward offset of a square mitres its corners") {
    const auto out = offset_polygon(rect(0, 0, 10, 10), 2.0);
    REQUIRE(out.size() == 1);
    CHECK(same_rect(out[0], -2, -2, 12, 12, 1e-12));
  }

  TEST_CASE("acute corners are bevelled beyond the miter limit") {
    const Polygon tri({{0, 0}, {40, 0}, {0, 8}});
    const auto out = offset_polygon(tri, 1.0);
    REQUIRE(out.size() == 1);
    CHECK(out[0].size() > 3);
  }

  TEST_CASE("concave L-shape offsets both ways") {
    const Polygon l({{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}});
    const auto in = offset_polygon(l, -1.0);
    REQUIRE(in.size() == 1);
    CHECK(area(in[0]) == doctest::Approx(28.0).epsilon(1e-9));
    const auto out = offset_polygon(l, 1.0);
    REQUIRE(out.size() == 1);
    CHECK(area(out[0]) > area(l));
  }

  TEST_CASE("a dumbbell pinches into two components") {
    const Polygon db({{0, 0}, {10, 0}, {10, 4}, {20, 4}, {20, 0}, {30, 0}, {30, 10}, {20, 10}, {20, 6}, {10, 6}, {10, 10}, {0, 10}});
    const auto out = offset_polygon(db, -1.5);
    REQUIRE(out.size() == 2);
    CHECK(area(out[0]) == doctest::Approx(49.0).epsilon(1e-9));
    CHECK(area(out[1]) == doctest::Approx(49.0).epsilon(1e-9));
  }

  TEST_CASE("convex round trip recovers area within 2%") {
    oracle::Rng rng(2);
    for (int i = 0; i < 40; ++i) {
      const Polygon p = oracle::convex_fixture(rng, {200, 200}, 30, 150);
      for (double d : {1.0, 3.0, 8.0}) {
        const auto grown = offset_polygon(p, d);
        REQUIRE(grown.size() == 1);
        const auto back = offset_polygon(grown[0], -d);
        REQUIRE(back.size() == 1);
        CHECK(std::abs(area(back[0]) - area(p)) <= 0.02 * area(p));
      }
    }
  }

  TEST_CASE("inward never grows, outward never shrinks, outputs simple and counter-clockwise") {
    oracle::Rng rng(3);
    for (int i = 0; i < 60; ++i) {
      const Polygon p = oracle::star_polygon(rng, {100, 100}, 4 + static_cast<std::size_t>(i % 12), 10, 80);
      for (double d : {-6.0, -2.0, -0.5, 0.5, 2.0, 6.0}) {
        for (const auto& q : offset_polygon(p, d)) {
          CHECK(is_simple(q.vertices()));
          CHECK(signed_area(q.vertices()) > 0.0);
          if (d < 0) CHECK(area(q) <= area(p) + 1e-9);
          if (d > 0) CHECK(area(q) >= area(p) - 1e-9);
        }
      }
    }
  }
}

TEST_SUITE("repair") {
  TEST_CASE("a bow-tie splits into two triangles") {
    const Ring bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
    const auto parts = repair_polygon(bowtie);
    REQUIRE(parts.size() == 2);
    CHECK(area(parts[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(area(parts[1]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_SUITE("schedule") {
  TEST_CASE("endpoints and midpoint") {
    const ShrinkSchedule s{0.4, 0.6, 1200};
    CHECK(schedule_ratio(s, 0) == 0.4);
    CHECK(schedule_ratio(s, 1200) == 0.6);
    CHECK(schedule_ratio(s, 600) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("epochs beyond the end are clamped") {
    const ShrinkSchedule s{0.4, 0.6, 100};
    CHECK(schedule_ratio(s, 5000) == 0.6);
  }

  TEST_CASE("exactly linear") {
    const ShrinkSchedule s{0.3, 0.9, 1000};
    for (int e1 = 0; e1 <= 1000; e1 += 37) {
      for (int e2 = e1 % 2; e2 <= 1000; e2 += 58) {
        CHECK(std::abs(schedule_ratio(s, e1) + schedule_ratio(s, e2) - 2 * schedule_ratio(s, (e1 + e2) / 2)) <= 1e-12);
      }
    }
  }

  TEST_CASE("invalid schedules are rejected") {
    CHECK_THROWS_AS((ShrinkSchedule{0.0, 0.5, 10}.validate()), ParameterError);
    CHECK_THROWS_AS((ShrinkSchedule{0.5, 1.5, 10}.validate()), ParameterError);
    CHECK_THROWS_AS((ShrinkSchedule{0.5, 0.6, 0}.validate()), ParameterError);
  }

  TEST_CASE("r = 1 leaves the polygon unchanged") {
    const Polygon p = rect(3, 4, 20, 11);
    const auto out = shrink_for_epoch(p, ShrinkSchedule{1.0, 1.0, 10}, 5);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == p);
  }

  TEST_CASE("square at r = 0.4 chains to the 5.8 square") {
    const auto out = shrink_for_epoch(rect(0, 0, 10, 10), ShrinkSchedule{0.4, 0.6, 100}, 0);
    REQUIRE(out.size() == 1);
    CHECK(same_rect(out[0], 2.1, 2.1, 7.9, 7.9, 1e-12));
  }

  TEST_CASE("spine area is non-decreasing in epoch on convex polygons") {
    oracle::Rng rng(4);
    const ShrinkSchedule s{0.4, 0.6, 50};
    for (int i = 0; i < 20; ++i) {
      const Polygon p = oracle::convex_fixture(rng, {100, 100}, 20, 90);
      double prev = 0.0;
      for (int e = 0; e <= 50; ++e) {
        double a = 0.0;
        for (const auto& q : shrink_for_epoch(p, s, e)) a += area(q);
        CHECK(a >= prev - 1e-9);
        prev = a;
      }
    }
  }
}
