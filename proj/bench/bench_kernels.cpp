#include <benchmark/benchmark.h>
#include <omp.h>

#include "dynsync/estimators.hpp"
#include "dynsync/experiment.hpp"
#include "dynsync/spectral.hpp"
#include "dynsync/synth.hpp"

using namespace dynsync;

namespace {

StrengthTrajectory random_trajectory(int n, int horizon) {
  Rng rng(1);
  StrengthTrajectory z(n, horizon);
  for (double& v : z.values()) v = rng.normal();
  return z;
}

ObservationSet instance(int n, int horizon) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.horizon = horizon;
  cfg.edge_probability = EdgeProbability::constant(0.3);
  cfg.seed = 11;
  return generate_instance(cfg).observations;
}

int max_threads() { return omp_get_num_procs(); }

}  // namespace

// Serial reference projection against the OpenMP kernel.
static void BM_ProjectReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), horizon = static_cast<int>(state.range(1));
  const LowFrequencyProjector projector(n, horizon);
  const auto z = random_trajectory(n, horizon);
  for (auto _ : state) benchmark::DoNotOptimize(projector.project_reference(z, 0.5));
}
BENCHMARK(BM_ProjectReference)->Args({20, 128})->Args({50, 256})->Unit(benchmark::kMicrosecond);

static void BM_ProjectParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), horizon = static_cast<int>(state.range(1));
  const LowFrequencyProjector projector(n, horizon);
  const auto z = random_trajectory(n, horizon);
  omp_set_num_threads(max_threads());
  for (auto _ : state) benchmark::DoNotOptimize(projector.project(z, 0.5));
  state.counters["threads"] = max_threads();
}
BENCHMARK(BM_ProjectParallel)->Args({20, 128})->Args({50, 256})->Unit(benchmark::kMicrosecond);

// Per-step LSQR solves, 1 thread against all threads.
static void BM_NaiveLs(benchmark::State& state) {
  const auto obs = instance(30, 128);
  const int threads = state.range(0) == 0 ? max_threads() : static_cast<int>(state.range(0));
  omp_set_num_threads(threads);
  for (auto _ : state) benchmark::DoNotOptimize(naive_ls(obs));
  state.counters["threads"] = threads;
}
BENCHMARK(BM_NaiveLs)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

static void BM_Dls(benchmark::State& state) {
  const auto obs = instance(30, 128);
  for (auto _ : state) benchmark::DoNotOptimize(dls(obs, 25.0));
}
BENCHMARK(BM_Dls)->Unit(benchmark::kMillisecond);

// Monte Carlo trials, 1 thread against all threads.
static void BM_RateExperiment(benchmark::State& state) {
  RateExperimentConfig cfg;
  cfg.base.n = 15;
  cfg.base.edge_probability = EdgeProbability::constant(0.3);
  cfg.horizons = {16, 32};
  cfg.trials = 8;
  cfg.estimators = {EstimatorSpec{EstimatorKind::Dls, std::nullopt, LambdaRegime::FixedGraph},
                    EstimatorSpec{EstimatorKind::Dproj, std::nullopt, LambdaRegime::Evolving}};
  cfg.threads = state.range(0) == 0 ? max_threads() : static_cast<int>(state.range(0));
  omp_set_num_threads(1);
  for (auto _ : state) benchmark::DoNotOptimize(rate_experiment(cfg));
  state.counters["threads"] = cfg.threads;
}
BENCHMARK(BM_RateExperiment)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
