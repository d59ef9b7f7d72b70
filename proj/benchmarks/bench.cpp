#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cdmacap/channel.hpp"
#include "cdmacap/multicell.hpp"
#include "cdmacap/rng.hpp"
#include "cdmacap/twocell.hpp"

using namespace cdmacap;

static void BM_SampleRho(benchmark::State& state) {
  const auto profile = DelayProfile::uniform(static_cast<int>(state.range(0)));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_rho(profile, rng));
}
BENCHMARK(BM_SampleRho)->Arg(1)->Arg(4)->Arg(8);

static void BM_KappaCdf(benchmark::State& state) {
  const int paths = static_cast<int>(state.range(0));
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kappa_cdf(x, paths));
    x = x < 5 ? x * 1.01 : 0.3;
  }
}
BENCHMARK(BM_KappaCdf)->Arg(2)->Arg(8)->Arg(64);

static void BM_SolvePowers(benchmark::State& state) {
  const double K = SystemParams{}.pole_capacity();
  CrossTierInterference i{1.2, 0.8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_powers(20, 19, i, K));
    i.into_macro += 1e-9;
  }
}
BENCHMARK(BM_SolvePowers);

// Dense solve for L + M bases with a random sparse-ish coupling.
static void BM_SolvePowerSystem(benchmark::State& state) {
  const int bases = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  Eigen::MatrixXd g(bases, bases);
  for (int r = 0; r < bases; ++r)
    for (int c = 0; c < bases; ++c) g(r, c) = r == c ? 0.0 : u(rng);
  const std::vector<int> counts(static_cast<std::size_t>(bases), 10);
  const double K = SystemParams{}.pole_capacity();
  for (auto _ : state) benchmark::DoNotOptimize(solve_power_system(counts, g, K));
}
BENCHMARK(BM_SolvePowerSystem)->Arg(2)->Arg(13)->Arg(81);

static void BM_OutagePlacement(benchmark::State& state) {
  SystemParams p;
  McBudget b;
  b.placements = 1;
  b.fading_draws = static_cast<int>(state.range(0));
  const auto profile = DelayProfile::uniform(2);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(outage_probability_mc(p, 40, b.fading_draws > 1 ? &profile : nullptr, b, ++seed));
}
BENCHMARK(BM_OutagePlacement)->Arg(1)->Arg(200);

BENCHMARK_MAIN();
