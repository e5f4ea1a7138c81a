// Serial reference kernels against their OpenMP counterparts.
#include "rogue/ansatz.hpp"
#include "rogue/poly.hpp"
#include "rogue/wavefield.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace rogue;

// Order-3 xi with mu, nu symbolic: a realistic operand for the residual.
const Poly& xi3() {
  static const Poly xi = build_xi(3, AnsatzMode::solved, Params{}).xi;
  return xi;
}

void BM_MulSerial(benchmark::State& state) {
  const Poly& a = xi3();
  Poly b = a * a;
  for (auto _ : state) benchmark::DoNotOptimize(mul_serial(a, b));
}

void BM_MulPacked(benchmark::State& state) {
  const Poly& a = xi3();
  Poly b = a * a;
  for (auto _ : state) benchmark::DoNotOptimize(mul(a, b));
}

const WaveModel& model2() {
  static const WaveModel m(2, Params{});
  return m;
}

void BM_GridSerial(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_grid_serial(model2(), {-5, 5, n}, {-5, 5, n}, 0));
}

void BM_GridParallel(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_grid(model2(), {-5, 5, n}, {-5, 5, n}, 0));
}

}  // namespace

BENCHMARK(BM_MulSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MulPacked)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
