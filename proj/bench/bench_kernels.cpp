#include <benchmark/benchmark.h>

#include "condgeo/kernels.hpp"
#include "condgeo/rng.hpp"

namespace {

using condgeo::Rng;

Eigen::MatrixXd points(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m;
}

const auto sq_cost = [](const auto& a, const auto& b) {
  return (a - b).squaredNorm();
};

void bm_cost_matrix_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = points(n, 3, 1);
  const Eigen::MatrixXd b = points(n, 3, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(condgeo::kernels::serial::cost_matrix(a, b, sq_cost));
  }
}

void bm_cost_matrix_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = points(n, 3, 1);
  const Eigen::MatrixXd b = points(n, 3, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(condgeo::kernels::parallel::cost_matrix(a, b, sq_cost));
  }
}

void bm_sinkhorn_row_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd c =
      condgeo::kernels::serial::cost_matrix(points(n, 3, 1), points(n, 3, 2), sq_cost);
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd logw = Eigen::VectorXd::Constant(n, -std::log(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        condgeo::kernels::serial::sinkhorn_row_update(c, g, logw, 0.1));
  }
}

void bm_sinkhorn_row_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd c =
      condgeo::kernels::serial::cost_matrix(points(n, 3, 1), points(n, 3, 2), sq_cost);
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd logw = Eigen::VectorXd::Constant(n, -std::log(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        condgeo::kernels::parallel::sinkhorn_row_update(c, g, logw, 0.1));
  }
}

void bm_pairwise_sum_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = points(n, 3, 1);
  const Eigen::MatrixXd b = points(n, 3, 2);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(condgeo::kernels::serial::pairwise_norm_sum(a, w, b, w));
  }
}

void bm_pairwise_sum_parallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = points(n, 3, 1);
  const Eigen::MatrixXd b = points(n, 3, 2);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(condgeo::kernels::parallel::pairwise_norm_sum(a, w, b, w));
  }
}

}  // namespace

BENCHMARK(bm_cost_matrix_serial)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(bm_cost_matrix_parallel)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(bm_sinkhorn_row_serial)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(bm_sinkhorn_row_parallel)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(bm_pairwise_sum_serial)->Arg(128)->Arg(512)->Arg(2048);
BENCHMARK(bm_pairwise_sum_parallel)->Arg(128)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
