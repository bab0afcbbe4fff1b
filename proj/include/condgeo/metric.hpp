#ifndef CONDGEO_METRIC_HPP
#define CONDGEO_METRIC_HPP

#include <Eigen/Dense>
#include <functional>

#include "condgeo/errors.hpp"
#include "condgeo/measures.hpp"

namespace condgeo {

/// Ground metric d and Wasserstein order p defining W_p.
struct MetricSpec {
  enum class Kind { euclidean, weighted_product, encoder_induced };

  Kind kind = Kind::euclidean;
  double p = 2.0;  // Wasserstein order, in [1, inf)

  // weighted_product: points are [x; c] with x of size data_dim; the label
  // block contributes label_weight * ||dc||^2 under the square root.
  Eigen::Index data_dim = 0;
  double label_weight = 1.0;

  // encoder_induced: caller-supplied ground distance.
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> custom;

  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double cost(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  void check() const;
};

MetricSpec euclidean_metric(double p = 2.0);
MetricSpec weighted_product_metric(Eigen::Index data_dim, double label_weight,
                                   double p = 2.0);
MetricSpec encoder_induced_metric(
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> d,
    double p = 2.0);

/// d^p(a_i, b_j) for all support pairs, via the dispatched kernel.
Eigen::MatrixXd pairwise_costs(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const MetricSpec& metric);

}  // namespace condgeo

#endif  // CONDGEO_METRIC_HPP
