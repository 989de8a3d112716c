// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emgame/closed_form.hpp"
#include "emgame/kernels.hpp"

namespace {

using namespace emgame;
namespace ks = kernels::serial;
namespace kp = kernels::parallel;

GameSpec random_spec(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> b(0.5, 3.0), d(0.0, 1.0);
  std::vector<PlayerParams> players;
  for (std::size_t i = 0; i < n; ++i) players.push_back({"p" + std::to_string(i), b(rng), d(rng)});
  return {players, 0.0, 2.0, 0.5};
}

template <bool Parallel>
void BM_CoalitionValues(benchmark::State& state) {
  const auto spec = random_spec(static_cast<std::size_t>(state.range(0)));
  const auto nash = nash_controls(spec);
  const auto coop = cooperative_controls(spec);
  for (auto _ : state) {
    auto v = Parallel ? kp::coalition_values(spec, nash, coop)
                      : ks::coalition_values(spec, nash, coop);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * (int64_t{1} << state.range(0)));
}

template <bool Parallel>
void BM_Shapley(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<AffinePayoff> values(std::size_t{1} << n, AffinePayoff{1.0, -0.5});
  values[0] = {};
  for (auto _ : state) {
    auto v = Parallel ? kp::shapley(values, n) : ks::shapley(values, n);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void BM_StockSensitivity(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  const double h = 1.0 / static_cast<double>(out.size());
  for (auto _ : state) {
    Parallel ? kp::stock_sensitivity(0.3, h, out) : ks::stock_sensitivity(0.3, h, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_AscentStep(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const double h = 1.0 / static_cast<double>(steps);
  std::vector<double> sens(steps), row(steps, 0.5);
  ks::stock_sensitivity(0.3, h, sens);
  for (auto _ : state) {
    std::fill(row.begin(), row.end(), 0.5);
    const double change = Parallel ? kp::ascent_step(row, 1.0, 0.7, sens, h, 0.5)
                                   : ks::ascent_step(row, 1.0, 0.7, sens, h, 0.5);
    benchmark::DoNotOptimize(change);
  }
}

template <bool Parallel>
void BM_StepPayoffs(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const double h = 1.0 / static_cast<double>(steps);
  std::vector<double> row(steps, 0.4), total(steps, 1.1), stock(steps, 2.0), out(steps);
  for (auto _ : state) {
    Parallel ? kp::step_payoffs(1.0, 0.3, 0.2, h, row, total, stock, out)
             : ks::step_payoffs(1.0, 0.3, 0.2, h, row, total, stock, out);
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_CoalitionValues<false>)->DenseRange(10, 14, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoalitionValues<true>)->DenseRange(10, 14, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Shapley<false>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Shapley<true>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StockSensitivity<false>)->Arg(10000)->Arg(1 << 20);
BENCHMARK(BM_StockSensitivity<true>)->Arg(10000)->Arg(1 << 20);
BENCHMARK(BM_AscentStep<false>)->Arg(10000)->Arg(1 << 20);
BENCHMARK(BM_AscentStep<true>)->Arg(10000)->Arg(1 << 20);
BENCHMARK(BM_StepPayoffs<false>)->Arg(10000)->Arg(1 << 20);
BENCHMARK(BM_StepPayoffs<true>)->Arg(10000)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
