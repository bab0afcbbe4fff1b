#ifndef CONDGEO_OT_HPP
#define CONDGEO_OT_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "condgeo/measures.hpp"
#include "condgeo/metric.hpp"

namespace condgeo {

/// Joint weight matrix over two supports; feasible point of the Kantorovich
/// program between its marginals.
struct Coupling {
  Eigen::MatrixXd row_support;
  Eigen::MatrixXd col_support;
  Eigen::MatrixXd matrix;  // n x m, nonnegative
};

struct CouplingResult {
  Coupling coupling;
  double cost = 0.0;  // sum pi_ij d^p(x_i, y_j), the LP optimum
};

struct SinkhornResult {
  Coupling coupling;
  double cost = 0.0;
  bool converged = true;  // false when the iteration budget ran out
  int iterations = 0;
};

struct MongeMapResult {
  Eigen::MatrixXd images;  // one target point per row-support atom
  bool projected = false;  // true when mass split and rows were averaged
};

/// Sparse multimarginal plan: one weight per support index tuple.
struct MultiCoupling {
  std::vector<Eigen::MatrixXd> supports;
  std::vector<std::pair<std::vector<int>, double>> entries;
};

struct MultiCouplingResult {
  MultiCoupling coupling;
  double objective = 0.0;
};

/// Marginal feasibility check; throws on violation beyond tol.
void validate_coupling(const Coupling& cpl, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, double tol = 1e-8);

/// Exact Kantorovich optimum via successive-shortest-path min-cost flow on
/// the bipartite support graph, with a dual optimality certificate checked
/// before returning. 1-D Euclidean instances take a monotone-coupling fast
/// path. Deterministic: Dijkstra and augmentation ties resolve to the lowest
/// node index.
CouplingResult exact_coupling(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu,
                              const MetricSpec& metric);

/// Same solver on a caller-built cost matrix.
CouplingResult exact_coupling_from_costs(const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu,
                                         const Eigen::MatrixXd& costs);

double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const MetricSpec& metric);

/// Entropic approximation: log-domain Sinkhorn with an epsilon-halving
/// schedule down to the requested epsilon, followed by rounding onto the
/// feasible polytope. On budget exhaustion the best iterate is returned
/// with converged = false.
SinkhornResult sinkhorn_coupling(const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu,
                                 const MetricSpec& metric, double epsilon,
                                 int max_iter = 10000, double tol = 1e-9);

/// Bures / Gelbrich closed form for W2 between Gaussians.
double gaussian_w2(const GaussianMeasure& g1, const GaussianMeasure& g2);

/// Deterministic map when every row has one nonzero entry; otherwise the
/// barycentric projection of each row, flagged projected.
MongeMapResult monge_map_from_coupling(const Coupling& cpl);

/// Tuple cap for the explicit multimarginal LP; env CONDGEO_MAX_TUPLES
/// overrides the default 1e6.
long multimarginal_tuple_cap();

/// Exact multimarginal optimum of sum_m alpha_m ||x_m - xbar||^2 with
/// xbar = sum_m alpha_m x_m, by explicit LP over all support tuples.
MultiCouplingResult multimarginal_coupling(
    const std::vector<DiscreteMeasure>& measures, const Eigen::VectorXd& alphas,
    long tuple_cap = -1);

/// Symmetric PSD square root with eigenvalue clamping at zero.
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m);

}  // namespace condgeo

#endif  // CONDGEO_OT_HPP
