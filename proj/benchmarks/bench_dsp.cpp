#include <benchmark/benchmark.h>

#include <random>

#include "vdn/controller.hpp"
#include "vdn/fft.hpp"
#include "vdn/link.hpp"
#include "vdn/medium.hpp"
#include "vdn/modem.hpp"
#include "vdn/transducer.hpp"

using namespace vdn;

static void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<dsp::Complex> data(n);
  for (auto& x : data) x = g(rng);
  for (auto _ : state) {
    auto copy = data;
    dsp::fft_inplace(copy);
    benchmark::DoNotOptimize(copy.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

static void BM_Propagate(benchmark::State& state) {
  const Waveform tone = synthesize(ToneSpec{3000.0, 102.4, 1.0}, kDefaultSimRateHz);
  const MediumSpec medium{};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(propagate(tone, medium, TapPoint{0.0}, TapPoint{550.0}, ++seed));
}
BENCHMARK(BM_Propagate);

static void BM_Receive(benchmark::State& state) {
  const Waveform tone = synthesize(ToneSpec{3000.0, 102.4 * static_cast<double>(state.range(0)), 1.0}, kDefaultSimRateHz);
  const Waveform rx = sample(propagate(tone, MediumSpec{}, TapPoint{0.0}, TapPoint{550.0}, 7), AdcSpec{});
  const Alphabet alphabet{};
  for (auto _ : state) benchmark::DoNotOptimize(vibration_receive(rx, alphabet));
}
BENCHMARK(BM_Receive)->Arg(1)->Arg(4);

static void BM_FrameRoundTrip(benchmark::State& state) {
  const Alphabet alphabet{};
  std::vector<std::uint8_t> payload(static_cast<std::size_t>(state.range(0)), 0x5a);
  for (auto _ : state) {
    const auto symbols = frame_encode(payload, alphabet);
    benchmark::DoNotOptimize(frame_decode(std::span<const Symbol>(symbols), alphabet));
  }
}
BENCHMARK(BM_FrameRoundTrip)->Arg(4)->Arg(32);
BENCHMARK_MAIN();
