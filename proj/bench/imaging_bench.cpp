// Serial reference kernels against the OpenMP ones on a 1600x1600 raster,
// the capture resolution of the source corpus.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "surgscan/imaging.hpp"
#include "surgscan/imaging_reference.hpp"

using namespace surgscan::imaging;

namespace {

const Raster& input() {
  static const Raster img = [] {
    Raster r(1600, 1600);
    std::mt19937_64 gen(1);
    for (auto& v : r.data()) v = static_cast<std::uint8_t>(gen());
    return r;
  }();
  return img;
}

void set_threads(benchmark::State& state) { omp_set_num_threads(static_cast<int>(state.range(0))); }

void BM_UnsharpSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::unsharp_mask(input(), 2.0, 1.0));
}
void BM_UnsharpParallel(benchmark::State& state) {
  set_threads(state);
  for (auto _ : state) benchmark::DoNotOptimize(unsharp_mask(input(), 2.0, 1.0));
}

void BM_NoiseSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::add_gaussian_noise(input(), 10.0, 7));
}
void BM_NoiseParallel(benchmark::State& state) {
  set_threads(state);
  for (auto _ : state) benchmark::DoNotOptimize(add_gaussian_noise(input(), 10.0, 7));
}

void BM_RotateSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::rotate_arbitrary(input(), 12.5));
}
void BM_RotateParallel(benchmark::State& state) {
  set_threads(state);
  for (auto _ : state) benchmark::DoNotOptimize(rotate_arbitrary(input(), 12.5));
}

void BM_ResizeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::resize_preserve_aspect(input(), 640));
}
void BM_ResizeParallel(benchmark::State& state) {
  set_threads(state);
  for (auto _ : state) benchmark::DoNotOptimize(resize_preserve_aspect(input(), 640));
}

}  // namespace

BENCHMARK(BM_UnsharpSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnsharpParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_NoiseSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RotateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RotateParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ResizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResizeParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
