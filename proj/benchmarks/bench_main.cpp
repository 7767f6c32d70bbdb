#include <cmath>

#include <benchmark/benchmark.h>

#include "oscctl/geometry.hpp"
#include "oscctl/momentum.hpp"
#include "oscctl/sim.hpp"
#include "oscctl/terminal.hpp"
#include "oscctl/zones.hpp"

namespace {

using namespace oscctl;

void BM_SupportPair(benchmark::State& state) {
  ZVector z(2);
  z << 1.0, 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(h_support(z));
}
BENCHMARK(BM_SupportPair);

void BM_SupportTriple(benchmark::State& state) {
  ZVector z(3);
  z << 0.5, 0.8, 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(h_support(z));
}
BENCHMARK(BM_SupportTriple)->Unit(benchmark::kMillisecond);

void BM_DualSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> omega;
  for (std::size_t i = 0; i < n; ++i) omega.push_back(1.0 + 0.6 * static_cast<double>(i));
  const OscillatorSystem sys(omega);
  Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 0.5, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_z(sys, e));
}
BENCHMARK(BM_DualSolve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_TimeScale(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const TerminalController ctrl(dim);
  const Eigen::VectorXd xf = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(dim), 0.3, -0.7);
  for (auto _ : state) benchmark::DoNotOptimize(solve_time_scale(ctrl, xf));
}
BENCHMARK(BM_TimeScale)->Arg(2)->Arg(4)->Arg(6);

void BM_ToySimulate(benchmark::State& state) {
  const ControlDesign d = toy_design();
  PhaseState x0(2);
  x0 << 10.0, 0.0;
  for (auto _ : state) {
    Scenario sc(d, x0);
    sc.sample_stride = 1000;
    benchmark::DoNotOptimize(simulate(sc).total_time);
  }
}
BENCHMARK(BM_ToySimulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
