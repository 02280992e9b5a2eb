// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP counterparts.
// Set TSEL_THREADS or OMP_NUM_THREADS to pick the thread count.

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <random>
#include <vector>

#include "tsel/kernels.hpp"
#include "tsel/matrix.hpp"

namespace {

namespace k = tsel::kernels;

tsel::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  tsel::Matrix m(rows, cols);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

template <auto Kernel>
void BM_Cosine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = random_matrix(64, 512, 1);
  const auto c = random_matrix(n, 512, 2);
  const auto qn = k::serial::row_norms(q);
  const auto cn = k::serial::row_norms(c);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(q, qn, c, cn));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(64 * n));
}

template <auto Kernel>
void BM_L2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = random_matrix(64, 512, 1);
  const auto c = random_matrix(n, 512, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(q, c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(64 * n));
}

template <auto Kernel>
void BM_Project(benchmark::State& state) {
  const auto in_dim = static_cast<std::size_t>(state.range(0));
  const auto x = random_matrix(16, in_dim, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, 11, 2048));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(16 * in_dim * 2048));
}

template <auto Kernel>
void BM_LogSumExp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto cost = random_matrix(256, n, 4);
  for (double& v : cost.data()) v = v * v;
  std::vector<double> pot(n, 0.0), out(256);
  for (auto _ : state) {
    Kernel(cost, pot, 0.01, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(256 * n));
}

BENCHMARK(BM_Cosine<k::serial::cosine>)->Name("cosine/serial")->Arg(1024)->Arg(8192);
BENCHMARK(BM_Cosine<k::omp::cosine>)->Name("cosine/omp")->Arg(1024)->Arg(8192);
BENCHMARK(BM_L2<k::serial::l2_distance>)->Name("l2/serial")->Arg(1024)->Arg(8192);
BENCHMARK(BM_L2<k::omp::l2_distance>)->Name("l2/omp")->Arg(1024)->Arg(8192);
BENCHMARK(BM_Project<k::serial::rademacher_project>)->Name("project/serial")->Arg(1024)->Arg(8192);
BENCHMARK(BM_Project<k::omp::rademacher_project>)->Name("project/omp")->Arg(1024)->Arg(8192);
BENCHMARK(BM_LogSumExp<k::serial::log_sum_exp_rows>)->Name("lse/serial")->Arg(1024)->Arg(8192);
BENCHMARK(BM_LogSumExp<k::omp::log_sum_exp_rows>)->Name("lse/omp")->Arg(1024)->Arg(8192);

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("TSEL_THREADS")) k::set_max_threads(std::atoi(env));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
