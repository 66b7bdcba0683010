// Serial reference loops against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "strata/cli.hpp"
#include "strata/trend_arima.hpp"

namespace {

std::vector<strata::cli::SeriesInput> synthetic_batch(std::size_t count, std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<strata::cli::SeriesInput> out(count);
  const strata::Micros day = strata::kMicrosPerDay;
  for (std::size_t s = 0; s < count; ++s) {
    out[s].id = {std::to_string(s)};
    for (std::size_t i = 0; i < n; ++i) {
      const double v = 20.0 + 0.02 * static_cast<double>(i) + 3.0 * std::sin(2.0 * M_PI * static_cast<double>(i) / 7.0) +
                       noise(rng);
      out[s].raw.points.push_back({static_cast<strata::Micros>(i) * day + 1640995200LL * 1000000, v});
    }
  }
  return out;
}

std::vector<double> ar1(std::size_t n) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> e(0.0, 1.0);
  std::vector<double> x(n);
  for (std::size_t i = 1; i < n; ++i) x[i] = 0.7 * x[i - 1] + e(rng);
  return x;
}

void BM_BatchFit(benchmark::State& state) {
  const auto inputs = synthetic_batch(64, 365);
  strata::cli::RunConfig rc;
  rc.horizon = 30;
  const auto workers = static_cast<std::size_t>(state.range(0));
  const auto sched = workers == 1 ? strata::cli::Scheduling::Serial : strata::cli::Scheduling::Dynamic;
  for (auto _ : state) benchmark::DoNotOptimize(strata::cli::fit_batch(inputs, rc, true, workers, sched));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inputs.size()));
}

void BM_AutoArimaCandidates(benchmark::State& state) {
  const auto x = ar1(1024);
  strata::AutoArimaOptions opts;
  opts.max_order = 5;
  const auto exec = state.range(0) ? strata::Execution::Parallel : strata::Execution::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(strata::fit_candidates(x, opts, exec));
}

}  // namespace

BENCHMARK(BM_BatchFit)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AutoArimaCandidates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
