#include <benchmark/benchmark.h>

#include "slrd/montecarlo.hpp"
#include "slrd/theta.hpp"

using namespace slrd;

namespace {

const CoefficientModel& model() {
  static const CoefficientModel m = CoefficientModel::isotropic(2, 1.5);
  return m;
}

template <class F>
void run_theta(benchmark::State& state, F f) {
  const double lambda = static_cast<double>(state.range(0));
  const SiteSet sites = enumerate_sites(RegionPrototype::cube(2), lambda);
  const IntBox w = default_window(2, lambda, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(f(model(), sites, w).values.data());
  state.counters["cells"] = static_cast<double>(w.cell_count());
}

void BM_ThetaDirectSerial(benchmark::State& state) { run_theta(state, theta_direct); }
void BM_ThetaDirectParallel(benchmark::State& state) { run_theta(state, theta_direct_parallel); }
void BM_ThetaFft(benchmark::State& state) {
  run_theta(state, [](const CoefficientModel& m, const SiteSet& s, const IntBox& w) { return theta_fft(m, s, w); });
}

void BM_SampleSums(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  const ThetaField th = theta_fft(model(), enumerate_sites(RegionPrototype::cube(2), lambda), default_window(2, lambda, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_sums(th, {Innovation::rademacher}, 64, 1).data());
}

}  // namespace

BENCHMARK(BM_ThetaDirectSerial)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaDirectParallel)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaFft)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSums)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
