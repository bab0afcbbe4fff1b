#ifndef CONDGEO_MEASURES_HPP
#define CONDGEO_MEASURES_HPP

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "condgeo/errors.hpp"

namespace condgeo {

inline constexpr double kWeightSumTol = 1e-9;

/// Finitely supported probability measure. Atoms are rows of `points`;
/// duplicate positions are legal and are never merged.
struct DiscreteMeasure {
  Eigen::MatrixXd points;   // n x d, one atom per row
  Eigen::VectorXd weights;  // n, nonnegative, sums to 1

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  Eigen::VectorXd atom(Eigen::Index i) const { return points.row(i).transpose(); }
};

/// Mean/covariance pair; closed-form oracle family for W2 geometry.
struct GaussianMeasure {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  Eigen::Index dim() const { return mean.size(); }
};

using MeasureVariant = std::variant<DiscreteMeasure, GaussianMeasure>;

/// Weighted sample of (x, c) records. Absent weights mean uniform.
struct LabeledDataset {
  Eigen::MatrixXd x;  // n x d
  Eigen::MatrixXd c;  // n x k
  std::optional<Eigen::VectorXd> weights;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index data_dim() const { return x.cols(); }
  Eigen::Index label_dim() const { return c.cols(); }
};

/// Conditional law P(X|C) together with the label marginal P(C), restricted
/// to finitely many label values.
struct ConditionalFamily {
  std::vector<Eigen::VectorXd> labels;  // pairwise distinct
  std::vector<MeasureVariant> measures;
  Eigen::VectorXd label_weights;

  std::size_t num_labels() const { return labels.size(); }
  Eigen::Index label_dim() const {
    return labels.empty() ? 0 : labels.front().size();
  }
  const DiscreteMeasure& discrete(std::size_t m) const;
  const GaussianMeasure& gaussian(std::size_t m) const;
  bool all_discrete() const;

  /// Index of the label equal (bitwise) to c; UnknownLabel otherwise.
  std::size_t index_of(const Eigen::VectorXd& c) const;
};

/// Checks every DiscreteMeasure invariant; throws on the first violation.
void validate_discrete(const DiscreteMeasure& m);

void validate_gaussian(const GaussianMeasure& g, double psd_tol = 1e-9);

void validate_family(const ConditionalFamily& fam);

/// Builds a measure from points with the given weights (uniform if absent).
/// Weights within kWeightSumTol of 1 are renormalized; duplicates kept.
DiscreteMeasure empirical_from_samples(
    const Eigen::MatrixXd& points,
    const std::optional<Eigen::VectorXd>& weights = std::nullopt);

DiscreteMeasure dirac(const Eigen::VectorXd& point);

/// Groups records by exact (bitwise) label equality. Group order follows
/// first appearance in the dataset; per-label measures are renormalized and
/// label weights carry the grouped mass.
ConditionalFamily conditional_family_from_labeled(const LabeledDataset& data);

/// Mixes the per-label measures by label weight back into one joint
/// empirical measure over (x, c) rows; inverse of the grouping above.
DiscreteMeasure flatten_family(const ConditionalFamily& fam);

/// Mixture of the per-label data measures (labels dropped).
DiscreteMeasure mix_marginal(const ConditionalFamily& fam);

/// Weighted records (x, c) reproducing a discrete family's joint law.
LabeledDataset labeled_from_family(const ConditionalFamily& fam);

/// True when both measures have identical atom multisets within tol,
/// after merging coincident positions.
bool same_atoms(const DiscreteMeasure& a, const DiscreteMeasure& b,
                double tol = 1e-9);

/// n-point quantile discretization of a 1-D Gaussian at (i-1/2)/n levels.
DiscreteMeasure quantile_discretization(double mean, double stddev, int n);

}  // namespace condgeo

#endif  // CONDGEO_MEASURES_HPP
