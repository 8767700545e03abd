// Serial reference vs OpenMP estimator on the same seeds.
#include <benchmark/benchmark.h>

#include "tailsum/montecarlo.hpp"

namespace {

using tailsum::Estimator;

void run_case(benchmark::State& state, Estimator estimator, bool parallel) {
  const auto spec = tailsum::ModelSpec::lognormal(2, 0.9);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    tailsum::MCEstimate e;
    if (parallel) {
      tailsum::MCOptions opts;
      opts.n = n;
      opts.seed = 7;
      opts.estimator = estimator;
      e = tailsum::estimate(spec, 100.0, opts);
    } else {
      e = tailsum::reference::estimate_serial(spec, 100.0, n, 7, estimator);
    }
    benchmark::DoNotOptimize(e.value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_CrudeSerial(benchmark::State& s) { run_case(s, Estimator::crude, false); }
void BM_CrudeOpenMP(benchmark::State& s) { run_case(s, Estimator::crude, true); }
void BM_ConditionalSerial(benchmark::State& s) { run_case(s, Estimator::conditional_max, false); }
void BM_ConditionalOpenMP(benchmark::State& s) { run_case(s, Estimator::conditional_max, true); }
void BM_RadialSerial(benchmark::State& s) { run_case(s, Estimator::conditional_radial, false); }
void BM_RadialOpenMP(benchmark::State& s) { run_case(s, Estimator::conditional_radial, true); }

BENCHMARK(BM_CrudeSerial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrudeOpenMP)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConditionalSerial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConditionalOpenMP)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadialSerial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadialOpenMP)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
