#include <cmath>

#include <benchmark/benchmark.h>

#include "ddelast/experiments.hpp"
#include "ddelast/oracle.hpp"
#include "ddelast/solvers.hpp"

namespace {

using namespace ddelast;

BenchmarkSpec nonlinear_spec() {
  BenchmarkSpec spec;
  spec.alpha = 1;
  return spec;
}

Dataset benchmark_data(const BenchmarkSpec& spec, std::size_t points) {
  return generate_linear(spec.modulus, points, 1.5 * reference_strain_max(spec));
}

void BM_AssembleKkt(benchmark::State& state) {
  const BenchmarkSpec spec = nonlinear_spec();
  const Structure bar = build_manufactured_bar(spec, static_cast<std::size_t>(state.range(0)));
  const Dataset data = benchmark_data(spec, 65);
  const std::vector<DataPoint> assigned(bar.n_elements(), data[40]);
  const State q = State::zeros(bar);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_kkt(bar, q, assigned, bar.reference_load(), {1, spec.modulus, 1e-5}));
  }
}
BENCHMARK(BM_AssembleKkt)->Arg(8)->Arg(32)->Arg(128);

void BM_NewtonNonlinear(benchmark::State& state) {
  const BenchmarkSpec spec = nonlinear_spec();
  const Structure bar = build_manufactured_bar(spec, static_cast<std::size_t>(state.range(0)));
  const Dataset data = benchmark_data(spec, 65);
  SolverConfig config;
  config.alpha = 1;
  const double c = objective_weight(config, data);
  const auto assigned = assigned_points(initialize_data(bar, data, config, c, bar.reference_load()), data);
  for (auto _ : state) {
    benchmark::DoNotOptimize(newton_solve(bar, State::zeros(bar), assigned, bar.reference_load(), config, c));
  }
}
BENCHMARK(BM_NewtonNonlinear)->Arg(8)->Arg(32)->Arg(128);

void BM_LoadStepping(benchmark::State& state, SolverKind kind) {
  const BenchmarkSpec spec = nonlinear_spec();
  const Structure bar = build_manufactured_bar(spec, static_cast<std::size_t>(state.range(0)));
  const Dataset data = benchmark_data(spec, 65);
  SolverConfig config;
  config.alpha = 1;
  config.load_factors.clear();
  for (int j = 1; j <= 10; ++j) config.load_factors.push_back(j / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_structure(bar, data, config, kind));
}
BENCHMARK_CAPTURE(BM_LoadStepping, adm, SolverKind::kAdm)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LoadStepping, go_adm, SolverKind::kGoAdm)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const Structure bar = build_bar(1.0, static_cast<std::size_t>(state.range(0)), 1e-3, BarSupports::kFixedFree,
                                  BarLoads{{}, 5e4});
  const Dataset data = generate_linear(1e9, 9, 0.1);
  SolverConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_global(bar, data, config, bar.reference_load()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(std::pow(9.0, static_cast<double>(state.range(0)))));
}
BENCHMARK(BM_Oracle)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
