#include <random>

#include <benchmark/benchmark.h>

#include "entlen/araki.hpp"
#include "entlen/gibbs_state.hpp"
#include "entlen/separability.hpp"

using namespace entlen;

namespace {

Sites first_sites(int n) {
  Sites s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
  return s;
}

LocalOperator random_op(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(2, static_cast<std::size_t>(n)));
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  return {2, first_sites(n), 0.5 * (m + m.adjoint())};
}

Interaction tfi(int n) { return builtin_model("tfi", {{"coupling", 1.0}, {"field", 1.0}}, n); }

}  // namespace

static void BM_Embed(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LocalOperator op(2, {1, 3}, random_op(2, 1).matrix());
  const Sites target = first_sites(n);
  for (auto _ : state) benchmark::DoNotOptimize(embed(op, target));
}
BENCHMARK(BM_Embed)->DenseRange(4, 10, 2);

static void BM_PartialTrace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LocalOperator op = random_op(n, 2);
  Sites drop;
  for (int i = 1; i + 1 < n; ++i) drop.push_back(i);
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(op, drop));
}
BENCHMARK(BM_PartialTrace)->DenseRange(4, 10, 2);

static void BM_PartialTranspose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LocalOperator op = random_op(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(partial_transpose(op, {n - 1}));
}
BENCHMARK(BM_PartialTranspose)->DenseRange(4, 10, 2);

static void BM_ExpHermitian(benchmark::State& state) {
  const LocalOperator op = random_op(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(exp_hermitian(op, 0.5));
}
BENCHMARK(BM_ExpHermitian)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_Gibbs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Interaction ia = tfi(n);
  for (auto _ : state) benchmark::DoNotOptimize(gibbs(ia, Interval{0, n}));
}
BENCHMARK(BM_Gibbs)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_Negativity(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  const auto m = ac_marginals(tfi(b + 4), RegionsABC::from_sizes(2, b, 2));
  const Cut cut{{0, 1}, {b + 2, b + 3}};
  for (auto _ : state) benchmark::DoNotOptimize(negativity(m.rho_AC, cut));
}
BENCHMARK(BM_Negativity)->Arg(2)->Arg(4);

static void BM_DeltaK(benchmark::State& state) {
  const Interaction ia = tfi(9);
  const auto reg = RegionsABC::from_sizes(3, 3, 3);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(delta_k(ia, reg, k));
}
BENCHMARK(BM_DeltaK)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_Pipeline(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  const Interaction ia = tfi(b + 2);
  const auto reg = RegionsABC::from_sizes(1, b, 1);
  for (auto _ : state) benchmark::DoNotOptimize(theorem_pipeline(ia, reg));
}
BENCHMARK(BM_Pipeline)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
