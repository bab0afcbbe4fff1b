#ifndef CONDGEO_GEODESICS_HPP
#define CONDGEO_GEODESICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "condgeo/measures.hpp"
#include "condgeo/metric.hpp"
#include "condgeo/ot.hpp"

namespace condgeo {

/// Parameterized curve of measures on [0, 1] with its defining metric.
struct GeodesicCurve {
  std::function<DiscreteMeasure(double)> sampler;
  DiscreteMeasure start;
  DiscreteMeasure end;
  MetricSpec metric;
};

/// Barycenter weights over a set of observed labels, with the combination
/// point cbar = sum alpha_m c_m they induce.
struct BarycenterWeights {
  Eigen::VectorXd alphas;
  std::vector<Eigen::VectorXd> labels;
  Eigen::VectorXd cbar;

  void check(double tol = 1e-9) const;
  double label_variance() const;  // sum alpha_m ||cbar - c_m||^2
};

BarycenterWeights make_barycenter_weights(
    const std::vector<Eigen::VectorXd>& labels, const Eigen::VectorXd& alphas);

/// Picks weights reaching `cbar` on a resolution-1/64 simplex grid,
/// minimizing the label variance; ties break to the lexicographically
/// smallest alpha. Throws ConfigError when no grid combination reproduces
/// cbar within tol.
BarycenterWeights select_barycenter_weights(
    const std::vector<Eigen::VectorXd>& labels, const Eigen::VectorXd& cbar,
    double tol = 1e-9);

/// Displacement interpolation: pushforward of the optimal coupling under
/// (x, y) -> (1-t)x + ty. Atoms at equal positions are not merged; the
/// endpoints are returned exactly at t = 0 and t = 1.
DiscreteMeasure mccann_interpolant(const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu, double t,
                                   const MetricSpec& metric);

struct SpeedReport {
  double max_abs_deviation = 0.0;
  double base_distance = 0.0;  // W_p(w(0), w(1))
  bool pass = false;
};

/// Checks W_p(w(t), w(s)) = |t-s| W_p(w(0), w(1)) over all pairs of the
/// given times (which must include 0 and 1).
SpeedReport verify_constant_speed(const GeodesicCurve& curve,
                                  const std::vector<double>& times, double tol);

/// Closed-form W2 geodesic between nonsingular Gaussians.
GaussianMeasure gaussian_geodesic(const GaussianMeasure& g0,
                                  const GaussianMeasure& g1, double t);

/// inf_P sum alpha_m W2^2(P, P_m), computed exactly via the multimarginal LP.
double wasserstein_variance(const std::vector<DiscreteMeasure>& measures,
                            const Eigen::VectorXd& alphas, long tuple_cap = -1);

struct Lemma2Decomposition {
  double variance_term = 0.0;
  double label_term = 0.0;
  double total = 0.0;
};

/// Splits the joint-space barycenter functional into the latent Wasserstein
/// variance plus the label variance.
Lemma2Decomposition lemma2_decomposition(
    const std::vector<DiscreteMeasure>& latent_families,
    const BarycenterWeights& bw, long tuple_cap = -1);

/// Barycenter support as the pushforward xbar = sum alpha_m x_m of the
/// optimal multimarginal plan.
DiscreteMeasure barycenter_multimarginal(
    const std::vector<DiscreteMeasure>& measures, const Eigen::VectorXd& alphas,
    long tuple_cap = -1);

/// Fixed point of S -> sum alpha_m (S^{1/2} Sigma_m S^{1/2})^{1/2}, with the
/// weighted mean of means. Throws MaxIterExceeded if tol is not reached.
GaussianMeasure gaussian_barycenter(const std::vector<GaussianMeasure>& gs,
                                    const Eigen::VectorXd& alphas,
                                    double tol = 1e-10, int max_iter = 200);

}  // namespace condgeo

#endif  // CONDGEO_GEODESICS_HPP
