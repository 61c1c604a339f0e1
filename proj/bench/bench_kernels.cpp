// Serial reference kernels against their OpenMP versions.
//   bench_kernels --benchmark_filter=Conv

#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "ganspec/detector.hpp"
#include "ganspec/fft.hpp"
#include "ganspec/harness.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/serial.hpp"

using namespace ganspec;

namespace {

RealTensor noise(int side, int channels, std::uint64_t seed) {
  Rng rng(seed);
  RealTensor t(side, side, channels);
  for (double& v : t.data()) v = rng.uniform();
  return t;
}

Kernel2D kernel(int size) {
  Rng rng(7);
  Kernel2D k(size, size);
  for (double& t : k.taps()) t = rng.uniform(-1, 1);
  return k;
}

std::vector<Complex> complex_noise(int side) {
  Rng rng(3);
  std::vector<Complex> v(static_cast<std::size_t>(side) * side);
  for (auto& x : v) x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return v;
}

template <bool Parallel>
void BM_Conv2d(benchmark::State& state) {
  const RealTensor img = noise(static_cast<int>(state.range(0)), 3, 1);
  const Kernel2D k = kernel(5);
  for (auto _ : state) {
    RealTensor out = Parallel ? conv2d(img, k, Padding::kCircular) : serial::conv2d(img, k, Padding::kCircular);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * img.size());
}

template <bool Parallel>
void BM_Fft2d(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const std::vector<Complex> src = complex_noise(side);
  std::vector<Complex> buf;
  for (auto _ : state) {
    buf = src;
    if (Parallel) {
      fft2d_inplace(buf, side, side, false);
    } else {
      serial::fft2d_inplace(buf, side, side, false);
    }
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_Resize(benchmark::State& state) {
  const RealTensor img = noise(256, 3, 2);
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    RealTensor out = Parallel ? resize_bilinear(img, side, side) : serial::resize_bilinear(img, side, side);
    benchmark::DoNotOptimize(out.data().data());
  }
}

// Batch feature extraction is parallel over images; one thread is the serial
// baseline.
void BM_FeatureBatch(benchmark::State& state) {
  Rng rng(5);
  const auto corpus = synth_corpus(32, 128, rng);
  const FeatureConfig fc;
  const int threads = static_cast<int>(state.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (auto _ : state) {
    auto rows = extract_features_batch(corpus, fc);
    benchmark::DoNotOptimize(rows.data());
  }
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * corpus.size());
}

}  // namespace

BENCHMARK(BM_Conv2d<false>)->Name("Conv2d/serial")->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Conv2d<true>)->Name("Conv2d/omp")->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Fft2d<false>)->Name("Fft2d/serial")->Arg(128)->Arg(224)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Fft2d<true>)->Name("Fft2d/omp")->Arg(128)->Arg(224)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Resize<false>)->Name("Resize/serial")->Arg(150)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Resize<true>)->Name("Resize/omp")->Arg(150)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FeatureBatch)->Name("FeatureBatch/threads")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
