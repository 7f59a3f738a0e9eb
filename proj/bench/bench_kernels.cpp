// Serial reference vs OpenMP kernels.  Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "milne/scenarios.hpp"

using namespace milne;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_characteristics(benchmark::State& st) {
  auto fields = make_fields("lapse_perturbation", 1e-3);
  ParticleEnsemble ens = make_random_ensemble(static_cast<int>(st.range(1)), 1.0, 1.0, 1);
  ens.project_to_massshell(*fields, make_time_frame(-1.0, 0.0));
  TransportOptions opt;
  opt.h = 1e-2;
  opt.output_every = 1000;
  opt.record_rows = false;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(integrate_characteristics(ens, *fields, -1.0, 0.0, 1.0, opt));
  st.SetItemsProcessed(st.iterations() * st.range(1) * 100);
}
BENCHMARK(BM_characteristics)->ArgsProduct({{0, 1}, {1000, 4000}})->Unit(benchmark::kMillisecond);

void BM_ensemble_moments(benchmark::State& st) {
  ParticleEnsemble ens = make_random_ensemble(static_cast<int>(st.range(1)), 1.0, 1.0, 2);
  BackgroundFields bg;
  const TimeFrame fr = make_time_frame(-1.0, 0.0);
  ens.project_to_massshell(bg, fr);
  const LocalGeometry geom;
  for (auto _ : st) benchmark::DoNotOptimize(moments_from_ensemble(ens, geom, fr, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(1));
}
BENCHMARK(BM_ensemble_moments)->ArgsProduct({{0, 1}, {10000, 100000}})->Unit(benchmark::kMicrosecond);

void BM_mode_sweep(benchmark::State& st) {
  std::vector<double> grid;
  for (int i = 0; i < st.range(1); ++i) grid.push_back(1.0 / 9.0 + 0.05 * i);
  ModeSweepOptions opt;
  opt.integ.Tend = 20.0;
  for (auto _ : st) benchmark::DoNotOptimize(sweep_modes(grid, opt, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(1));
}
BENCHMARK(BM_mode_sweep)->ArgsProduct({{0, 1}, {16, 64}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
