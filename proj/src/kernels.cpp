#include "condgeo/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace condgeo::kernels {

namespace {

std::atomic<bool> g_parallel{[] {
  const char* env = std::getenv("CONDGEO_SERIAL");
  return !(env != nullptr && env[0] == '1');
}()};

// One row of the log-domain update; shared by both flavors so they agree
// bit for bit.
inline double lse_row(const Eigen::MatrixXd& cost, const Eigen::VectorXd& g,
                      const Eigen::VectorXd& logw, double eps, Eigen::Index i) {
  const Eigen::Index m = cost.cols();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = (g[j] - cost(i, j)) / eps + logw[j];
    if (t > hi) hi = t;
  }
  if (!std::isfinite(hi)) return 0.0;  // all-zero weight column block
  double s = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    s += std::exp((g[j] - cost(i, j)) / eps + logw[j] - hi);
  }
  return -eps * (hi + std::log(s));
}

inline double lse_col(const Eigen::MatrixXd& cost, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& logw, double eps, Eigen::Index j) {
  const Eigen::Index n = cost.rows();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (f[i] - cost(i, j)) / eps + logw[i];
    if (t > hi) hi = t;
  }
  if (!std::isfinite(hi)) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s += std::exp((f[i] - cost(i, j)) / eps + logw[i] - hi);
  }
  return -eps * (hi + std::log(s));
}

inline double inner_norm_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const Eigen::VectorXd& wb, Eigen::Index i) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    s += wb[j] * (a.row(i) - b.row(j)).norm();
  }
  return s;
}

}  // namespace

bool use_parallel() { return g_parallel.load(); }
void set_parallel(bool on) { g_parallel.store(on); }

namespace serial {

Eigen::VectorXd sinkhorn_row_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& logw, double eps) {
  Eigen::VectorXd f(cost.rows());
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    f[i] = lse_row(cost, g, logw, eps, i);
  }
  return f;
}

Eigen::VectorXd sinkhorn_col_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& logw, double eps) {
  Eigen::VectorXd g(cost.cols());
  for (Eigen::Index j = 0; j < cost.cols(); ++j) {
    g[j] = lse_col(cost, f, logw, eps, j);
  }
  return g;
}

double pairwise_norm_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& wa,
                         const Eigen::MatrixXd& b, const Eigen::VectorXd& wb) {
  Eigen::VectorXd partial(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    partial[i] = wa[i] * inner_norm_sum(a, b, wb, i);
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) total += partial[i];
  return total;
}

}  // namespace serial

namespace parallel {

Eigen::VectorXd sinkhorn_row_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& logw, double eps) {
  Eigen::VectorXd f(cost.rows());
  const Eigen::Index n = cost.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    f[i] = lse_row(cost, g, logw, eps, i);
  }
  return f;
}

Eigen::VectorXd sinkhorn_col_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& logw, double eps) {
  Eigen::VectorXd g(cost.cols());
  const Eigen::Index m = cost.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) {
    g[j] = lse_col(cost, f, logw, eps, j);
  }
  return g;
}

double pairwise_norm_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& wa,
                         const Eigen::MatrixXd& b, const Eigen::VectorXd& wb) {
  Eigen::VectorXd partial(a.rows());
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    partial[i] = wa[i] * inner_norm_sum(a, b, wb, i);
  }
  // Fixed-order fold keeps the result independent of thread count.
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += partial[i];
  return total;
}

}  // namespace parallel

Eigen::VectorXd sinkhorn_row_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& logw, double eps) {
  return use_parallel() ? parallel::sinkhorn_row_update(cost, g, logw, eps)
                        : serial::sinkhorn_row_update(cost, g, logw, eps);
}

Eigen::VectorXd sinkhorn_col_update(const Eigen::MatrixXd& cost,
                                    const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& logw, double eps) {
  return use_parallel() ? parallel::sinkhorn_col_update(cost, f, logw, eps)
                        : serial::sinkhorn_col_update(cost, f, logw, eps);
}

double pairwise_norm_sum(const Eigen::MatrixXd& a, const Eigen::VectorXd& wa,
                         const Eigen::MatrixXd& b, const Eigen::VectorXd& wb) {
  return use_parallel() ? parallel::pairwise_norm_sum(a, wa, b, wb)
                        : serial::pairwise_norm_sum(a, wa, b, wb);
}

}  // namespace condgeo::kernels
