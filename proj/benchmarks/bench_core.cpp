#include <benchmark/benchmark.h>

#include "antic/diagnostics.hpp"
#include "antic/dynamics.hpp"
#include "antic/integrator.hpp"
#include "antic/numeric.hpp"

using namespace antic;

namespace {

SwarmState make_state(int n, int d) {
  Rng rng(1234);
  SwarmState s(n, d);
  for (auto& v : s.x) v = 2.0 * rng.normal();
  for (auto& v : s.v) v = rng.normal();
  return s;
}

void BM_acceleration_at(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SwarmState s = make_state(n, 2);
  const Model m = AtModel{PowerLawPotential{1.0, 0.3}, 0.5};
  std::vector<double> out(s.x.size());
  for (auto _ : state) {
    acceleration(m, s, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_acceleration_at)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_acceleration_phiu_hessian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SwarmState s = make_state(n, 2);
  const Model m = PhiUModel{
      PowerLawPotential{1.0, 0.3},
      Kernel{HessianKernel{PowerLawPotential{1.0, 0.3}, KernelEvalPoint::anticipated}}, 0.5};
  std::vector<double> out(s.x.size());
  for (auto _ : state) {
    acceleration(m, s, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_acceleration_phiu_hessian)->Arg(32)->Arg(128);

void BM_rk4_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SwarmState s = make_state(n, 2);
  const Model m = AtModel{PowerLawPotential{1.0, 0.3}, 0.5};
  for (auto _ : state) {
    s = step(m, s, 1e-3);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_rk4_step)->Arg(32)->Arg(128);

void BM_diagnostics_row(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SwarmState s = make_state(n, 2);
  const Model m = AtModel{PowerLawPotential{1.0, 0.3}, 0.5};
  for (auto _ : state) {
    const DiagnosticsRow row = make_row(s, m);
    benchmark::DoNotOptimize(&row);
  }
}
BENCHMARK(BM_diagnostics_row)->Arg(32)->Arg(128);

void BM_means_check(benchmark::State& state) {
  Rng rng(9);
  const int n = 12, d = 3;
  std::vector<double> z(static_cast<std::size_t>(n) * d);
  for (auto& v : z) v = rng.normal();
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (auto& v : c) v = rng.uniform(0.5, 2.0);
  for (auto _ : state) {
    const MeansCheckResult res = check_means_inequality(z, n, d, c, 0.5, 2.0);
    benchmark::DoNotOptimize(&res);
  }
}
BENCHMARK(BM_means_check);

}  // namespace

BENCHMARK_MAIN();
