#include <doctest.h>

#include "condgeo/kernels.hpp"
#include "condgeo/rng.hpp"

using namespace condgeo;

namespace {

Eigen::MatrixXd random_points(Rng& rng, int n, int d) {
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  Rng rng(123u);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 17 + rep * 13;
    const int m = 11 + rep * 7;
    const Eigen::MatrixXd a = random_points(rng, n, 3);
    const Eigen::MatrixXd b = random_points(rng, m, 3);
    const auto sq = [](const auto& x, const auto& y) {
      return (x - y).squaredNorm();
    };

    const Eigen::MatrixXd cs = kernels::serial::cost_matrix(a, b, sq);
    const Eigen::MatrixXd cp = kernels::parallel::cost_matrix(a, b, sq);
    CHECK(cs == cp);

    Eigen::VectorXd g(m), logw(m), f(n), logv(n);
    for (int j = 0; j < m; ++j) {
      g[j] = rng.normal();
      logw[j] = -std::abs(rng.normal()) - 0.5;
    }
    for (int i = 0; i < n; ++i) {
      f[i] = rng.normal();
      logv[i] = -std::abs(rng.normal()) - 0.5;
    }
    CHECK(kernels::serial::sinkhorn_row_update(cs, g, logw, 0.3) ==
          kernels::parallel::sinkhorn_row_update(cs, g, logw, 0.3));
    CHECK(kernels::serial::sinkhorn_col_update(cs, f, logv, 0.3) ==
          kernels::parallel::sinkhorn_col_update(cs, f, logv, 0.3));

    Eigen::VectorXd wa = Eigen::VectorXd::Constant(n, 1.0 / n);
    Eigen::VectorXd wb = Eigen::VectorXd::Constant(m, 1.0 / m);
    CHECK(kernels::serial::pairwise_norm_sum(a, wa, b, wb) ==
          kernels::parallel::pairwise_norm_sum(a, wa, b, wb));
  }
}

TEST_CASE("dispatch honors the runtime switch") {
  const bool before = kernels::use_parallel();
  kernels::set_parallel(false);
  CHECK_FALSE(kernels::use_parallel());
  kernels::set_parallel(true);
  CHECK(kernels::use_parallel());
  kernels::set_parallel(before);
}

TEST_CASE("row update handles zero-weight columns") {
  Eigen::MatrixXd cost(2, 2);
  cost << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd logw(2);
  logw << 0.0, -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd f = kernels::sinkhorn_row_update(cost, g, logw, 0.5);
  CHECK(std::isfinite(f[0]));
  CHECK(std::isfinite(f[1]));
  CHECK(f[0] == doctest::Approx(0.0));  // only the first column contributes
  CHECK(f[1] == doctest::Approx(1.0));
}
