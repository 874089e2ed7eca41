#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "rsca/eval.hpp"
#include "rsca/geometry.hpp"

namespace {

rsca::Polygon wavy(std::size_t n, double phase) {
  rsca::Ring pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    const double rad = 100 + 15 * std::sin(5 * t + phase);
    pts.push_back({200 + rad * std::cos(t), 200 + rad * std::sin(t)});
  }
  return rsca::Polygon(pts);
}

void BM_ShrinkOffset(benchmark::State& state) {
  const rsca::Polygon p = wavy(static_cast<std::size_t>(state.range(0)), 0.0);
  const double d = rsca::shrink_offset(p, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(rsca::offset_polygon(p, -d));
}
BENCHMARK(BM_ShrinkOffset)->Arg(4)->Arg(14)->Arg(64)->Arg(256);

void BM_PolygonIou(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const rsca::Polygon a = wavy(n, 0.0);
  const rsca::Polygon b = wavy(n, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(rsca::polygon_iou(a, b));
}
BENCHMARK(BM_PolygonIou)->Arg(14)->Arg(64);

}  // namespace
