// Serial reference versus OpenMP kernel for each parallel hot loop.
// Arg 0 is serial, arg 1 parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "invcog/detection.hpp"
#include "invcog/garp.hpp"
#include "invcog/identification.hpp"
#include "invcog/particle_inverse_filter.hpp"
#include "invcog/simplex.hpp"
#include "invcog/slow_learning.hpp"

using namespace invcog;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_Cascade(benchmark::State& state) {
  CascadeConfig c;
  c.horizon = 2000;
  c.n_mc = 200;
  c.action_noise_var = 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(run_cascade(c, exec_of(state)).mse.back());
}
BENCHMARK(BM_Cascade)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Crb(benchmark::State& state) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(crb(m, a, 1.5, 500, 32, 1, exec_of(state)).inverse_bound);
}
BENCHMARK(BM_Crb)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ParticleFilter(benchmark::State& state) {
  const auto m = LinearGaussianModel::scalar(0.9, 1.5, 1.0, 1.0);
  const ActionModel a{PhiKind::identity, 0.5};
  const auto t = simulate(m, 20, 3);
  const auto adv = simulate_adversary(m, a, t, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(particle_inverse_filter(m, a, t.states, adv.actions, 5000, 1, exec_of(state)).back().mean(0));
}
BENCHMARK(BM_ParticleFilter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_WarshallClosure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  std::mt19937_64 g(4);
  std::bernoulli_distribution coin(2.0 / n);
  BitRelation base(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (coin(g)) base.set(i, j);
  for (auto _ : state) {
    BitRelation r = base;
    if (state.range(0)) r.close_parallel();
    else r.close_serial();
    benchmark::DoNotOptimize(r.test(0, n - 1));
  }
}
BENCHMARK(BM_WarshallClosure)->Args({0, 1000})->Args({1, 1000})->Unit(benchmark::kMillisecond);

void BM_NullCalibration(benchmark::State& state) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const Matrix probes = Matrix::NullaryExpr(50, 2, [&] { return u(g); });
  const auto radar = SyntheticRadar::make(UtilityKind::cobb_douglas, Vector{{0.3, 0.7}});
  for (auto _ : state)
    benchmark::DoNotOptimize(calibrate_threshold(probes, radar, 0.05, 0.05, 199, 1, exec_of(state)).threshold);
}
BENCHMARK(BM_NullCalibration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Simplex(benchmark::State& state) {
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = 300, n = 200;
  const Matrix a = Matrix::NullaryExpr(m, n, [&] { return u(g); });
  const Vector b = Vector::Constant(m, 10.0), c = Vector::NullaryExpr(n, [&] { return u(g); });
  LpOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(a, b, c, opts).objective);
}
BENCHMARK(BM_Simplex)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
