#include <benchmark/benchmark.h>

#include "rsca/decoder.hpp"

namespace {

void BM_Decode(benchmark::State& state) {
  rsca::DecoderConfig cfg;
  cfg.channels = 8;
  cfg.upsampler = static_cast<rsca::UpsamplerKind>(state.range(0));
  const auto side = static_cast<std::size_t>(state.range(1));
  const rsca::Grid image = rsca::random_uniform({1, 3, side, side}, 0, 1, 1);
  const rsca::Pyramid pyr = rsca::synth_pyramid(image, cfg.channels, 2);
  const rsca::DecoderParams params = rsca::DecoderParams::init(cfg, 3);
  for (auto _ : state) benchmark::DoNotOptimize(rsca::decode(pyr, params));
  state.SetLabel(std::string(rsca::to_string(cfg.upsampler)));
}
BENCHMARK(BM_Decode)
    ->ArgsProduct({{0, 1, 2, 3, 4}, {160}})
    ->Args({4, 640})
    ->Unit(benchmark::kMillisecond);

}  // namespace
