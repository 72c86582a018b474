#include <benchmark/benchmark.h>

#include <random>

#include "rpwy/coherence.hpp"
#include "rpwy/dynamics.hpp"
#include "rpwy/montecarlo.hpp"

namespace {

rpwy::RadicalPairModel model(std::size_t n) {
  rpwy::SampleSpec spec;
  spec.n_nuc = n;
  return rpwy::sample_model(1, 0, spec);
}

void BM_Propagate(benchmark::State& state) {
  const auto m = model(static_cast<std::size_t>(state.range(0)));
  const rpwy::TimeGrid grid;
  for (auto _ : state) {
    auto traj = rpwy::propagate(m, 0.0, grid, {.keep_states = false});
    benchmark::DoNotOptimize(traj.p_singlet.back());
  }
}
BENCHMARK(BM_Propagate)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_RunOne(benchmark::State& state) {
  const auto m = model(static_cast<std::size_t>(state.range(0)));
  const rpwy::TimeGrid grid;
  for (auto _ : state) {
    auto r = rpwy::run_one(m, grid);
    benchmark::DoNotOptimize(r.c_st);
  }
}
BENCHMARK(BM_RunOne)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_BlockCoherence(benchmark::State& state) {
  const auto m = model(static_cast<std::size_t>(state.range(0)));
  const auto traj = rpwy::propagate(m, 0.0, rpwy::TimeGrid{10.0, 1000, 1000});
  rpwy::BlockCoherenceEvaluator eval(traj.basis);
  for (auto _ : state) benchmark::DoNotOptimize(eval(traj.states.back()));
}
BENCHMARK(BM_BlockCoherence)->DenseRange(1, 4);

void BM_DenseCoherence(benchmark::State& state) {
  const auto m = model(static_cast<std::size_t>(state.range(0)));
  const auto traj = rpwy::propagate(m, 0.0, rpwy::TimeGrid{10.0, 1000, 1000});
  const auto rho = traj.state(1);
  const auto q = rpwy::build_singlet_projector(m);
  for (auto _ : state) benchmark::DoNotOptimize(rpwy::st_coherence(rho, q.singlet, q.triplet));
}
BENCHMARK(BM_DenseCoherence)->DenseRange(1, 4);

void BM_MatrixSqrt(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  rpwy::Operator a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {n(gen), n(gen)};
  rpwy::Operator rho = a * a.adjoint();
  rho /= rho.trace().real();
  for (auto _ : state) benchmark::DoNotOptimize(rpwy::matrix_sqrt_psd(rho));
}
BENCHMARK(BM_MatrixSqrt)->RangeMultiplier(2)->Range(8, 64);

}  // namespace

BENCHMARK_MAIN();
