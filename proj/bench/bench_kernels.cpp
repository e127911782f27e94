// Serial vs OpenMP full-batch kernels on synthetic logistic problems.

#include <benchmark/benchmark.h>

#include <map>

#include "fuvalkit/dataio.hpp"
#include "fuvalkit/kernels.hpp"

namespace {

using fuvalkit::Problem;
using fuvalkit::Vector;

const Problem& problem_for(std::size_t n) {
  static std::map<std::size_t, Problem> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    fuvalkit::SyntheticSpec spec;
    spec.n = n;
    spec.d = 100;
    spec.seed = 42;
    spec.mode = fuvalkit::SyntheticMode::Logistic;
    it = cache.emplace(n, fuvalkit::gen_synthetic(spec).problem).first;
  }
  return it->second;
}

Vector probe_point(std::size_t d) {
  Vector w(d);
  for (std::size_t k = 0; k < d; ++k) w[k] = 0.01 * static_cast<double>(k % 7) - 0.03;
  return w;
}

void BM_ObjectiveSerial(benchmark::State& state) {
  const Problem& p = problem_for(static_cast<std::size_t>(state.range(0)));
  const Vector w = probe_point(p.dim());
  for (auto _ : state) benchmark::DoNotOptimize(fuvalkit::kernels::objective_serial(p, w));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.n()));
}

void BM_ObjectiveOmp(benchmark::State& state) {
  const Problem& p = problem_for(static_cast<std::size_t>(state.range(0)));
  const Vector w = probe_point(p.dim());
  for (auto _ : state) benchmark::DoNotOptimize(fuvalkit::kernels::objective_omp(p, w));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.n()));
}

void BM_GradSerial(benchmark::State& state) {
  const Problem& p = problem_for(static_cast<std::size_t>(state.range(0)));
  const Vector w = probe_point(p.dim());
  Vector g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuvalkit::kernels::objective_and_grad_serial(p, w, g));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.n()));
}

void BM_GradOmp(benchmark::State& state) {
  const Problem& p = problem_for(static_cast<std::size_t>(state.range(0)));
  const Vector w = probe_point(p.dim());
  Vector g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuvalkit::kernels::objective_and_grad_omp(p, w, g));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.n()));
}

}  // namespace

BENCHMARK(BM_ObjectiveSerial)->Arg(1000)->Arg(20000)->Arg(200000);
BENCHMARK(BM_ObjectiveOmp)->Arg(1000)->Arg(20000)->Arg(200000);
BENCHMARK(BM_GradSerial)->Arg(1000)->Arg(20000)->Arg(200000);
BENCHMARK(BM_GradOmp)->Arg(1000)->Arg(20000)->Arg(200000);

BENCHMARK_MAIN();
