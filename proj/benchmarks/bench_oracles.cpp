#include <benchmark/benchmark.h>

#include "amlnewton/data_io.hpp"
#include "amlnewton/problem.hpp"
#include "amlnewton/transfer.hpp"

using namespace amln;

namespace {

GlmProblem make_problem(Index n, Loss loss) {
  return GlmProblem(generate_lowrank(2 * n, n, 10, 1, loss), loss, {1e-3, 1e-6, 1e-2});
}

Vector point(Index n) {
  std::mt19937_64 rng(2);
  return gaussian_vector(n, rng, 0.05);
}

void BM_Gradient(benchmark::State& state) {
  const Index n = state.range(0);
  const auto f = make_problem(n, Loss::Logistic);
  const Vector x = point(n);
  for (auto _ : state) benchmark::DoNotOptimize(f.gradient(x));
}
BENCHMARK(BM_Gradient)->Arg(100)->Arg(400);

void BM_Hessian(benchmark::State& state) {
  const Index n = state.range(0);
  const auto f = make_problem(n, Loss::Logistic);
  const Vector x = point(n);
  for (auto _ : state) benchmark::DoNotOptimize(f.hessian(x));
}
BENCHMARK(BM_Hessian)->Arg(100)->Arg(400);

// Reduced model on a row-sampling operator: fast path vs. restricting the full Hessian.
void BM_ReducedFastPath(benchmark::State& state) {
  const Index n = state.range(0);
  const auto f = make_problem(n, Loss::Poisson);
  const Vector x = point(n);
  const auto op = make_row_sampling(build_uniform_subsets(n, {n / 10}, RngSpec{3, 0})[0], n);
  for (auto _ : state) benchmark::DoNotOptimize(f.reduced(x, op));
}
BENCHMARK(BM_ReducedFastPath)->Arg(100)->Arg(400);

void BM_ReducedViaFullHessian(benchmark::State& state) {
  const Index n = state.range(0);
  const auto f = make_problem(n, Loss::Poisson);
  const Vector x = point(n);
  const auto op = make_row_sampling(build_uniform_subsets(n, {n / 10}, RngSpec{3, 0})[0], n);
  for (auto _ : state) {
    const Matrix h = f.hessian(x);
    benchmark::DoNotOptimize(op.galerkin(h));
    benchmark::DoNotOptimize(op.restrict(f.gradient(x)));
  }
}
BENCHMARK(BM_ReducedViaFullHessian)->Arg(100)->Arg(400);

}  // namespace
