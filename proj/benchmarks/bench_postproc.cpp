#include <benchmark/benchmark.h>

#include <cmath>

#include "rsca/labelgen.hpp"
#include "rsca/postproc.hpp"

namespace {

rsca::Grid text_map(std::size_t side) {
  std::vector<rsca::Polygon> spines;
  for (std::size_t y = 20; y + 30 < side; y += 60) {
    for (std::size_t x = 20; x + 80 < side; x += 120) {
      const double x0 = static_cast<double>(x);
      const double y0 = static_cast<double>(y);
      spines.emplace_back(rsca::Ring{{x0, y0}, {x0 + 80, y0 + 4}, {x0 + 80, y0 + 20}, {x0, y0 + 16}});
    }
  }
  return rsca::rasterize(spines, side, side).mask;
}

void BM_Detect(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const rsca::Grid map = text_map(side);
  std::size_t found = 0;
  for (auto _ : state) {
    const auto dets = rsca::detect(map, rsca::DetectParams{}, static_cast<double>(side), static_cast<double>(side));
    found = dets.size();
    benchmark::DoNotOptimize(dets);
  }
  state.counters["detections"] = static_cast<double>(found);
}
BENCHMARK(BM_Detect)->Arg(640)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ConnectedComponents(benchmark::State& state) {
  const rsca::BitMask mask = rsca::binarize(text_map(640), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(rsca::connected_components(mask));
}
BENCHMARK(BM_ConnectedComponents)->Unit(benchmark::kMillisecond);

}  // namespace
