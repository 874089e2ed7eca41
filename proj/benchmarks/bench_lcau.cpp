#include <benchmark/benchmark.h>

#include "rsca/grid_ops.hpp"
#include "rsca/lcau.hpp"

namespace {

void BM_LcauForward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto side = static_cast<std::size_t>(state.range(1));
  const rsca::Grid in = rsca::random_uniform({1, c, side, side}, -1, 1, 1);
  const rsca::LcauParams params = rsca::LcauParams::random(c, 2, 5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rsca::lcau_forward(in, params).output);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(4 * side * side));
}
BENCHMARK(BM_LcauForward)->Args({16, 40})->Args({64, 40})->Args({64, 80})->Unit(benchmark::kMillisecond);

void BM_LcauBackward(benchmark::State& state) {
  const rsca::Grid in = rsca::random_uniform({1, 16, 40, 40}, -1, 1, 1);
  const auto fwd = rsca::lcau_forward(in, rsca::LcauParams::random(16, 2, 5, 2));
  const rsca::Grid cot = rsca::random_uniform(fwd.output.shape(), -1, 1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(rsca::lcau_backward(cot, fwd.saved));
}
BENCHMARK(BM_LcauBackward)->Unit(benchmark::kMillisecond);

void BM_NearestVsBilinear(benchmark::State& state) {
  const rsca::Grid in = rsca::random_uniform({1, 64, 40, 40}, -1, 1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(state.range(0) == 0 ? rsca::nearest_upsample(in, 2) : rsca::bilinear_upsample(in, 2));
  }
}
BENCHMARK(BM_NearestVsBilinear)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
