#include "condgeo/metric.hpp"

#include <cmath>

#include "condgeo/kernels.hpp"

namespace condgeo {

void MetricSpec::check() const {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::OutOfRange, "Wasserstein order p must be in [1, inf)");
  }
  if (kind == Kind::weighted_product) {
    if (label_weight < 0.0) {
      throw Error(ErrorCode::OutOfRange, "label weight must be >= 0");
    }
    if (data_dim < 1) {
      throw Error(ErrorCode::DimensionMismatch,
                  "weighted_product metric needs data_dim >= 1");
    }
  }
  if (kind == Kind::encoder_induced && !custom) {
    throw Error(ErrorCode::ConfigError,
                "encoder_induced metric has no distance function");
  }
}

double MetricSpec::distance(const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) const {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "point dimensions differ");
  }
  switch (kind) {
    case Kind::euclidean:
      return (a - b).norm();
    case Kind::weighted_product: {
      const double dx2 = (a.head(data_dim) - b.head(data_dim)).squaredNorm();
      const double dc2 =
          (a.tail(a.size() - data_dim) - b.tail(b.size() - data_dim)).squaredNorm();
      return std::sqrt(dx2 + label_weight * dc2);
    }
    case Kind::encoder_induced:
      return custom(a, b);
  }
  return 0.0;
}

double MetricSpec::cost(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double d = distance(a, b);
  if (p == 2.0) return d * d;
  if (p == 1.0) return d;
  return std::pow(d, p);
}

MetricSpec euclidean_metric(double p) {
  MetricSpec m;
  m.kind = MetricSpec::Kind::euclidean;
  m.p = p;
  m.check();
  return m;
}

MetricSpec weighted_product_metric(Eigen::Index data_dim, double label_weight,
                                   double p) {
  MetricSpec m;
  m.kind = MetricSpec::Kind::weighted_product;
  m.data_dim = data_dim;
  m.label_weight = label_weight;
  m.p = p;
  m.check();
  return m;
}

MetricSpec encoder_induced_metric(
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> d,
    double p) {
  MetricSpec m;
  m.kind = MetricSpec::Kind::encoder_induced;
  m.custom = std::move(d);
  m.p = p;
  m.check();
  return m;
}

Eigen::MatrixXd pairwise_costs(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const MetricSpec& metric) {
  metric.check();
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "support dimensions differ");
  }
  const double p = metric.p;
  if (metric.kind == MetricSpec::Kind::euclidean && p == 2.0) {
    return kernels::cost_matrix(mu.points, nu.points,
                                [](const auto& a, const auto& b) {
                                  return (a - b).squaredNorm();
                                });
  }
  const MetricSpec& m = metric;
  return kernels::cost_matrix(
      mu.points, nu.points, [&m](const auto& a, const auto& b) {
        return m.cost(a.transpose(), b.transpose());
      });
}

}  // namespace condgeo
