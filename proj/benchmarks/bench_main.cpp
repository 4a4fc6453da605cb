#include <benchmark/benchmark.h>

#include <vector>

#include "tonealloc/bs_agent.hpp"
#include "tonealloc/oracle.hpp"
#include "tonealloc/protocol.hpp"
#include "tonealloc/scenario_io.hpp"
#include "tonealloc/user_agent.hpp"

namespace tonealloc {
namespace {

void BM_BestResponse(benchmark::State& state) {
  const Link link{2.5, 1.0, 0.05, 30.0};
  double lambda = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(per_tone_best_response(1.0, lambda, 0.02, link));
    lambda = lambda < 1.0 ? lambda * 1.01 : 0.1;
  }
}
BENCHMARK(BM_BestResponse);

void BM_PowerPriceSearch(benchmark::State& state) {
  const std::size_t N = state.range(0);
  const Scenario s = generate_random_scenario(7, 1, N);
  const UserParams u = user_params(s, 0);
  const std::vector<double> mu(N, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(power_price_bisection(u, mu));
}
BENCHMARK(BM_PowerPriceSearch)->Arg(4)->Arg(16)->Arg(64);

void BM_ScheduleRound(benchmark::State& state) {
  const Scenario s = generate_random_scenario(7, state.range(0), state.range(1));
  World w = make_world(s, {});
  for (auto _ : state) benchmark::DoNotOptimize(schedule_round(w));
}
BENCHMARK(BM_ScheduleRound)->Args({2, 4})->Args({4, 8})->Args({8, 32});

void BM_RecoverAllocation(benchmark::State& state) {
  const Scenario s = generate_random_scenario(7, state.range(0), state.range(1));
  const RunResult run = run_until_converged(s, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(recover_allocation(s, run.final_prices));
  }
}
BENCHMARK(BM_RecoverAllocation)->Args({2, 4})->Args({4, 8})->Args({8, 32});

void BM_RunUntilConverged(benchmark::State& state) {
  const Scenario s = generate_random_scenario(7, state.range(0), state.range(1));
  RunConfig c;
  c.reduced = state.range(2) != 0;
  c.record_dual = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_until_converged(s, c));
}
BENCHMARK(BM_RunUntilConverged)
    ->Args({2, 4, 1})
    ->Args({4, 8, 1})
    ->Args({4, 8, 0})
    ->Unit(benchmark::kMillisecond);

void BM_DualOracle(benchmark::State& state) {
  const Scenario s = generate_random_scenario(7, state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dual_oracle_solve(s));
}
BENCHMARK(BM_DualOracle)->Args({4, 8})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tonealloc

BENCHMARK_MAIN();
