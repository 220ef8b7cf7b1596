#include <benchmark/benchmark.h>

#include <vector>

#include "polystar/eos.hpp"
#include "polystar/gravity.hpp"
#include "polystar/hydro1d.hpp"
#include "polystar/kinetic.hpp"
#include "polystar/steady.hpp"

using namespace polystar;

static void BM_ShootPolytrope(benchmark::State& state) {
  const auto eos = Eos::polytrope(1.0, 5.0 / 3.0);
  steady::ShootOptions o;
  o.interior_cells = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(steady::shoot(eos, 1.0, o).M);
}
BENCHMARK(BM_ShootPolytrope)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_ShootTwoPower(benchmark::State& state) {
  const auto eos = Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0);
  steady::ShootOptions o;
  o.interior_cells = 1024;
  for (auto _ : state) benchmark::DoNotOptimize(steady::shoot(eos, 1.0, o).M);
}
BENCHMARK(BM_ShootTwoPower)->Unit(benchmark::kMillisecond);

static void BM_PotentialOf(benchmark::State& state) {
  steady::ShootOptions o;
  o.interior_cells = std::size_t(state.range(0));
  const auto p = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0, o);
  const auto rho = p.density();
  for (auto _ : state) benchmark::DoNotOptimize(gravity::potential_of(rho));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PotentialOf)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

static void BM_HydroStep(benchmark::State& state) {
  const auto eq = hydro1d::discrete_equilibrium(Eos::polytrope(1.0, 2.0), 1.0,
                                                std::size_t(state.range(0)));
  const auto s0 = hydro1d::from_profile(eq);
  const double dt = hydro1d::cfl_dt(s0, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(hydro1d::step(s0, dt).t);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HydroStep)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oN);

static void BM_Legendre(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  std::vector<double> x(n), h(n), lam(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 5.0 * double(i) / double(n - 1);
    h[i] = x[i] * x[i];
    lam[i] = 10.0 * double(i) / double(n - 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kinetic::legendre(x, h, lam).h_star.back());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Legendre)->RangeMultiplier(4)->Range(1024, 65536)->Complexity(benchmark::oN);
BENCHMARK_MAIN();
