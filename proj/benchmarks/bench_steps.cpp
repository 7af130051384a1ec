#include <benchmark/benchmark.h>

#include <memory>

#include "amlnewton/data_io.hpp"
#include "amlnewton/problem.hpp"
#include "amlnewton/solvers.hpp"
#include "amlnewton/transfer.hpp"

using namespace amln;

namespace {

struct Setup {
  GlmProblem f;
  Iterate at;
  SolverConfig cfg;
};

Setup setup(Index n, Algorithm algorithm) {
  GlmProblem f(generate_lowrank(2 * n, n, 10, 4, Loss::Logistic), Loss::Logistic, {0.0, 1e-6, 1e-2});
  Iterate at = evaluate(f, Vector::Zero(n));
  SolverConfig cfg;
  cfg.algorithm = algorithm;
  HierarchySpec spec;
  spec.coarse_dims = equidistant_coarse_dims(n, 5);
  cfg.hierarchy = std::make_shared<LevelHierarchy>(build_hierarchy(n, spec, RngSpec{5, 1}));
  cfg.rsn_dim = n / 10;
  return {std::move(f), std::move(at), std::move(cfg)};
}

void BM_NewtonStep(benchmark::State& state) {
  const auto s = setup(state.range(0), Algorithm::Newton);
  for (auto _ : state) benchmark::DoNotOptimize(newton_step(s.f, s.at, s.cfg));
}
BENCHMARK(BM_NewtonStep)->Arg(100)->Arg(400);

void BM_AmlStep(benchmark::State& state) {
  const auto s = setup(state.range(0), Algorithm::AmlNewton);
  std::mt19937_64 rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(aml_newton_step(s.f, s.at, *s.cfg.hierarchy, s.cfg, rng));
}
BENCHMARK(BM_AmlStep)->Arg(100)->Arg(400);

void BM_RsnStep(benchmark::State& state) {
  const auto s = setup(state.range(0), Algorithm::Rsn);
  std::mt19937_64 rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rsn_step(s.f, s.at, s.cfg.rsn_dim, SketchKind::RowSampling, s.cfg, rng));
  }
}
BENCHMARK(BM_RsnStep)->Arg(100)->Arg(400);

void BM_SolveAml(benchmark::State& state) {
  auto s = setup(state.range(0), Algorithm::AmlNewton);
  s.cfg.grad_tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(solve(s.f, Vector::Zero(state.range(0)), s.cfg));
}
BENCHMARK(BM_SolveAml)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
