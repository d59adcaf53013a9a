// Serial reference vs OpenMP kernels. Run with --workers-style control via
// OMP_NUM_THREADS; on one core the parallel rows measure scheduling overhead.

#include <benchmark/benchmark.h>

#include <cmath>

#include "replab/entropy.hpp"
#include "replab/orbits.hpp"
#include "replab/repeller.hpp"

namespace {

using replab::Execution;

const replab::MapSystem& doubling() {
  static const replab::MapSystem map = replab::make_builtin("doubling");
  return map;
}

const replab::Orbit& doubling_orbit() {
  static const replab::Orbit orbit = replab::typical_orbit(doubling(), 20000, 7);
  return orbit;
}

void windows(benchmark::State& state, Execution mode) {
  replab::GoodSetOptions opt;
  opt.windows = 500;
  opt.potentials = {replab::Potential::coordinate()};
  opt.mode = mode;
  for (auto _ : state) {
    auto good = replab::evaluate_good_set(doubling(), doubling_orbit(), std::log(2.0), 0.15, 0.1, opt);
    benchmark::DoNotOptimize(good.rho);
  }
}

void greedy_indexed(benchmark::State& state, Execution mode) {
  const auto& pool = doubling_orbit().points;
  std::span<const double> head(pool.data(), 4000);
  for (auto _ : state) {
    auto set = replab::greedy_separated(doubling(), head, 6, 1.0 / 64, mode);
    benchmark::DoNotOptimize(set.points.size());
  }
}

void greedy_reference(benchmark::State& state) {
  const auto& pool = doubling_orbit().points;
  std::span<const double> head(pool.data(), 4000);
  for (auto _ : state) {
    auto set = replab::greedy_separated_reference(doubling(), head, 6, 1.0 / 64);
    benchmark::DoNotOptimize(set.points.size());
  }
}

void periodic_sums(benchmark::State& state, Execution mode) {
  static const auto tripling = replab::make_builtin("tripling");
  static const auto ifs = replab::full_shift_ifs(tripling, 2, std::log(3.0), 0.1);
  replab::PressureOptions opt;
  opt.mode = mode;
  const auto phi = replab::Potential::coordinate();
  for (auto _ : state) {
    auto p = replab::pressure_estimate(ifs, phi, 3, opt);
    benchmark::DoNotOptimize(p.value);
  }
}

}  // namespace

BENCHMARK_CAPTURE(windows, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(windows, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(greedy_indexed, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(greedy_indexed, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(greedy_reference)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(periodic_sums, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(periodic_sums, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
