#include <benchmark/benchmark.h>

#include "bcd/filters.hpp"
#include "bcd/mbi.hpp"
#include "bcd/median.hpp"
#include "bcd/synthetic.hpp"

namespace {

bcd::RasterImage scene(int size, int bands, int bit_depth) {
  bcd::synthetic::BenchSceneParams p;
  p.width = size;
  p.height = size;
  p.bands = bands;
  p.bit_depth = bit_depth;
  return bcd::synthetic::bench_scene(p);
}

// Args: window, bit depth, method.
void BM_Median(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  const bcd::Band band = scene(512, 1, static_cast<int>(state.range(1))).band(0);
  const auto method = static_cast<bcd::MedianMethod>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(bcd::median_filter(band, window, method));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(band.size()));
}
BENCHMARK(BM_Median)
    ->ArgNames({"window", "bits", "method"})
    ->ArgsProduct({{3, 6, 12, 24},
                   {8, 12},
                   {static_cast<int>(bcd::MedianMethod::kAuto),
                    static_cast<int>(bcd::MedianMethod::kSlidingHistogram),
                    static_cast<int>(bcd::MedianMethod::kConstantTime)}})
    ->Unit(benchmark::kMillisecond);

void BM_Mfbi(benchmark::State& state) {
  const auto img = scene(static_cast<int>(state.range(0)), 4, 8);
  for (auto _ : state) benchmark::DoNotOptimize(bcd::mfbi(img));
}
BENCHMARK(BM_Mfbi)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Mbi(benchmark::State& state) {
  const auto img = scene(static_cast<int>(state.range(0)), 4, 8);
  for (auto _ : state) benchmark::DoNotOptimize(bcd::mbi(img));
}
BENCHMARK(BM_Mbi)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
