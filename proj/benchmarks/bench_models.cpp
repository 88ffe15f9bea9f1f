// Microbenchmarks for the right-hand sides and integrators of each model.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "cavityxy/collective.hpp"
#include "cavityxy/ensemble.hpp"
#include "cavityxy/motion.hpp"
#include "cavityxy/oracle.hpp"
#include "cavityxy/params.hpp"

namespace {

using namespace cavityxy;
using cd = std::complex<double>;

void EnsembleAdiabaticRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ModelParams p = reference_params();
  ensemble::Model m = ensemble::make_model(p, ensemble::sample_site_couplings(1, n, p));
  ensemble::System sys(m);
  sys.set_segment({1e-6, cd(0.3 * m.chiN(), 0.0), 0.0, true});
  const std::vector<double> y = ensemble::pack(ensemble::product_state(n, 2.0, 0.3));
  std::vector<double> dy(y.size());
  for (auto _ : state) {
    sys(0.0, y, dy);
    benchmark::DoNotOptimize(dy.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(EnsembleAdiabaticRhs)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void CollectiveQuench(benchmark::State& state) {
  collective::Params p;
  p.chiN = -kTwoPi * 2.26e6;
  p.omega = 0.3 * p.chiN;
  const double T = kTwoPi / std::abs(p.chiN);
  for (auto _ : state) {
    const Trajectory tr = collective::integrate_quench(p, collective::south_pole(), 20 * T, T / 64);
    benchmark::DoNotOptimize(tr.z.back());
  }
}
BENCHMARK(CollectiveQuench)->Unit(benchmark::kMicrosecond);

void DickeExact(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const double chiN = -kTwoPi * 2.26e6;
  const double T = kTwoPi / std::abs(chiN);
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(T * i / 50);
  for (auto _ : state) {
    const auto e = oracle::dicke_exact_evolve(N, chiN / N, 0.3 * chiN, 0.0, 0, t);
    benchmark::DoNotOptimize(e.jz.back());
  }
}
BENCHMARK(DickeExact)->Arg(20)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void MotionRhs(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const ModelParams p = reference_params();
  const TrapParams& trap = *p.trap;
  const double omega_T = motion::trap_frequency(trap.V0, trap.recoil_k, trap.mass);
  motion::Model m = motion::make_model(
      p, ensemble::sample_site_couplings(1, 50, p),
      motion::eta_coefficients(omega_T, trap.mass, p.lambda_c, n_max), {}, omega_T);
  const auto pops = motion::thermal_populations(p.temperature, omega_T, n_max);
  motion::System sys(m);
  sys.set_segment({1e-6, cd(0.9 * m.chiN(), 0.0), 0.0, true});
  const std::vector<double> y = motion::pack(motion::thermal_ground_state(m, pops.p));
  std::vector<double> dy(y.size());
  for (auto _ : state) {
    sys(0.0, y, dy);
    benchmark::DoNotOptimize(dy.data());
  }
}
BENCHMARK(MotionRhs)->Arg(4)->Arg(10)->Arg(16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
