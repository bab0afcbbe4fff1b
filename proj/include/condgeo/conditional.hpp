#ifndef CONDGEO_CONDITIONAL_HPP
#define CONDGEO_CONDITIONAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "condgeo/measures.hpp"
#include "condgeo/metric.hpp"
#include "condgeo/ot.hpp"

namespace condgeo {

/// Conditional encoder Q(Z|X,C) on finite supports: one row-stochastic
/// table per label, rows indexed by x-atoms and columns by latent atoms.
struct EncoderPlan {
  std::vector<Eigen::MatrixXd> tables;
};

/// Covariance blocks of a candidate coupling between two conditional laws
/// sharing the label marginal; the membership test assembles them into one
/// symmetric block matrix.
struct GaussianJointSpec {
  Eigen::MatrixXd sigma_xx, sigma_yy, sigma_cc;
  Eigen::MatrixXd sigma_xc, sigma_yc;
  Eigen::MatrixXd sigma_pi;  // candidate cross-covariance of X and Y
};

/// Throws LabelMismatch unless both families carry the same labels with the
/// same weights; fills `order` with famQ's index for each famP label.
void match_labels(const ConditionalFamily& famP, const ConditionalFamily& famQ,
                  std::vector<std::size_t>& order, double tol = 1e-9);

/// ( sum_c P(c) W_p^p(P(.|c), Q(.|c)) )^{1/p}, each label via exact OT.
double expected_conditional_wasserstein(const ConditionalFamily& famP,
                                        const ConditionalFamily& famQ,
                                        const MetricSpec& metric);

struct SubcouplingResult {
  double value = 0.0;
  std::vector<Coupling> per_label;  // aligned with famP label order
};

/// Minimum transport cost over the conditional sub-coupling. On finite label
/// sets the infimum decomposes label-wise, so the optimal per-label plans are
/// returned alongside the mixed cost.
SubcouplingResult subcoupling_cost(const ConditionalFamily& famP,
                                   const ConditionalFamily& famQ,
                                   const MetricSpec& metric);

struct EncoderLpResult {
  double value = 0.0;
  EncoderPlan plan;
};

/// Reconstruction-error LP over conditional encoders: minimize
/// sum d^p(x, Gen(z,c)) Q(z|x,c) P(x|c) P(c) subject to row-stochastic rows
/// and the aggregate constraint sum_x Q(z|x,c) P(x|c) = P(z|c). `gen_points`
/// holds Gen(z,c) per label, one row per famZ atom.
EncoderLpResult encoder_lp_cost(const ConditionalFamily& famX,
                                const ConditionalFamily& famZ,
                                const std::vector<Eigen::MatrixXd>& gen_points,
                                const MetricSpec& metric);

/// Row-stochastic and aggregate-constraint check for a plan.
void validate_encoder_plan(const EncoderPlan& plan,
                           const ConditionalFamily& famX,
                           const ConditionalFamily& famZ,
                           double row_tol = 1e-8, double agg_tol = 1e-6);

/// PSD membership of the assembled block matrix; exact sub-coupling
/// membership for Gaussian joints.
bool gaussian_subcoupling_member(const GaussianJointSpec& spec,
                                 double tol = 1e-9);

/// sqrt((1 - rho_xc^2)(1 - rho_yc^2)); couplings with correlation rho* are
/// excluded from the sub-coupling iff |rho* - rho_xc rho_yc| exceeds this.
double example1_threshold(double rho_xc, double rho_yc);

}  // namespace condgeo

#endif  // CONDGEO_CONDITIONAL_HPP
