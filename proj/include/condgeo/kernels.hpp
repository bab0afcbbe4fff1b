#ifndef CONDGEO_KERNELS_HPP
#define CONDGEO_KERNELS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace condgeo::kernels {

/// Data-parallel inner loops used by the solvers, each in two builds: a
/// serial reference and an OpenMP version. Both produce bitwise-identical
/// results: every parallel loop writes disjoint slots, and reductions are
/// buffered per slot and folded serially in index order afterwards.
/// `use_parallel()` picks the dispatched flavor (env CONDGEO_SERIAL=1 forces
/// the reference path).

bool use_parallel();
void set_parallel(bool on);

namespace serial {

/// C(i,j) = cost(A.row(i), B.row(j)).
template <typename CostFn>
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            CostFn cost) {
  Eigen::MatrixXd c(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      c(i, j) = cost(a.row(i), b.row(j));
    }
  }
  return c;
}

/// out[i] = -eps * log sum_j exp((g[j] - C(i,j))/eps + logw[j]).
/// Row maxima are subtracted before exponentiation.
Eigen::VectorXd sinkhorn_row_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& logw, double eps);

/// Column version of the update above.
Eigen::VectorXd sinkhorn_col_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& logw, double eps);

/// sum_i wa[i] * sum_j wb[j] * |a_i - b_j| with the inner sum serial in j
/// and the outer fold serial in i.
double pairwise_norm_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& wa,
                         const Eigen::MatrixXd& b, const Eigen::VectorXd& wb);

}  // namespace serial

namespace parallel {

template <typename CostFn>
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            CostFn cost) {
  Eigen::MatrixXd c(a.rows(), b.rows());
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      c(i, j) = cost(a.row(i), b.row(j));
    }
  }
  return c;
}

Eigen::VectorXd sinkhorn_row_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& logw, double eps);

Eigen::VectorXd sinkhorn_col_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& logw, double eps);

double pairwise_norm_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& wa,
                         const Eigen::MatrixXd& b, const Eigen::VectorXd& wb);

}  // namespace parallel

// Dispatched entry points.

template <typename CostFn>
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            CostFn cost) {
  return use_parallel() ? parallel::cost_matrix(a, b, cost)
                        : serial::cost_matrix(a, b, cost);
}

Eigen::VectorXd sinkhorn_row_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& logw, double eps);

Eigen::VectorXd sinkhorn_col_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& logw, double eps);

double pairwise_norm_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& wa,
                         const Eigen::MatrixXd& b, const Eigen::VectorXd& wb);

}  // namespace condgeo::kernels

#endif  // CONDGEO_KERNELS_HPP
