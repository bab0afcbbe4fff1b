#include "condgeo/geodesics.hpp"

#include <algorithm>
#include <cmath>

namespace condgeo {

void BarycenterWeights::check(double tol) const {
  if (alphas.size() != static_cast<Eigen::Index>(labels.size()) || labels.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "weights and labels disagree");
  }
  if (alphas.minCoeff() < 0.0) {
    throw Error(ErrorCode::NegativeWeight, "barycenter weights");
  }
  if (std::abs(alphas.sum() - 1.0) > tol) {
    throw Error(ErrorCode::WeightSum, "barycenter weights do not sum to 1");
  }
  Eigen::VectorXd combo = Eigen::VectorXd::Zero(labels.front().size());
  for (std::size_t m = 0; m < labels.size(); ++m) {
    combo += alphas[static_cast<Eigen::Index>(m)] * labels[m];
  }
  if ((combo - cbar).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::OutOfRange, "cbar inconsistent with weights");
  }
}

double BarycenterWeights::label_variance() const {
  double v = 0.0;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    v += alphas[static_cast<Eigen::Index>(m)] * (cbar - labels[m]).squaredNorm();
  }
  return v;
}

BarycenterWeights make_barycenter_weights(
    const std::vector<Eigen::VectorXd>& labels, const Eigen::VectorXd& alphas) {
  BarycenterWeights bw;
  bw.labels = labels;
  bw.alphas = alphas;
  bw.cbar = Eigen::VectorXd::Zero(labels.front().size());
  for (std::size_t m = 0; m < labels.size(); ++m) {
    bw.cbar += alphas[static_cast<Eigen::Index>(m)] * labels[m];
  }
  bw.check();
  return bw;
}

namespace {

// Enumerates nonnegative integer M-tuples summing to `denom` in
// lexicographic order.
void enumerate_compositions(int M, int denom,
                            const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts(M, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == M - 1) {
      parts[pos] = left;
      fn(parts);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, denom);
}

}  // namespace

BarycenterWeights select_barycenter_weights(
    const std::vector<Eigen::VectorXd>& labels, const Eigen::VectorXd& cbar,
    double tol) {
  const int M = static_cast<int>(labels.size());
  if (M < 1) throw Error(ErrorCode::EmptySupport, "no labels");
  constexpr int kDenom = 64;

  bool found = false;
  double best_var = 0.0;
  std::vector<int> best;
  enumerate_compositions(M, kDenom, [&](const std::vector<int>& parts) {
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(cbar.size());
    for (int m = 0; m < M; ++m) {
      combo += (static_cast<double>(parts[m]) / kDenom) * labels[m];
    }
    if ((combo - cbar).cwiseAbs().maxCoeff() > tol) return;
    double var = 0.0;
    for (int m = 0; m < M; ++m) {
      var += (static_cast<double>(parts[m]) / kDenom) * (cbar - labels[m]).squaredNorm();
    }
    // Lexicographic order of enumeration resolves exact ties for free: the
    // first combination at a given variance is kept.
    if (!found || var < best_var - 1e-12) {
      found = true;
      best_var = var;
      best = parts;
    }
  });
  if (!found) {
    throw Error(ErrorCode::ConfigError,
                "cbar is not a resolution-1/64 combination of the labels");
  }
  Eigen::VectorXd alphas(M);
  for (int m = 0; m < M; ++m) alphas[m] = static_cast<double>(best[m]) / kDenom;
  BarycenterWeights bw;
  bw.labels = labels;
  bw.alphas = alphas;
  bw.cbar = cbar;
  bw.check(std::max(tol, 1e-9));
  return bw;
}

DiscreteMeasure mccann_interpolant(const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu, double t,
                                   const MetricSpec& metric) {
  if (t < 0.0 || t > 1.0) {
    throw Error(ErrorCode::OutOfRange, "interpolation time outside [0, 1]");
  }
  if (metric.p != 2.0) {
    throw Error(ErrorCode::OutOfRange,
                "displacement interpolation requires p = 2");
  }
  if (metric.kind == MetricSpec::Kind::weighted_product) {
    throw Error(ErrorCode::OutOfRange,
                "interpolation is defined for euclidean or encoder metrics");
  }
  if (t == 0.0) return mu;
  if (t == 1.0) return nu;

  const CouplingResult oc = exact_coupling(mu, nu, metric);
  const Eigen::MatrixXd& plan = oc.coupling.matrix;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> support;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (plan(i, j) > 0.0) support.emplace_back(i, j);
    }
  }
  DiscreteMeasure out;
  out.points.resize(static_cast<Eigen::Index>(support.size()), mu.dim());
  out.weights.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto [i, j] = support[k];
    out.points.row(static_cast<Eigen::Index>(k)) =
        (1.0 - t) * mu.points.row(i) + t * nu.points.row(j);
    out.weights[static_cast<Eigen::Index>(k)] = plan(i, j);
  }
  return out;
}

SpeedReport verify_constant_speed(const GeodesicCurve& curve,
                                  const std::vector<double>& times, double tol) {
  const bool has0 = std::any_of(times.begin(), times.end(),
                                [](double t) { return t == 0.0; });
  const bool has1 = std::any_of(times.begin(), times.end(),
                                [](double t) { return t == 1.0; });
  if (!has0 || !has1) {
    throw Error(ErrorCode::OutOfRange, "times must include 0 and 1");
  }
  std::vector<DiscreteMeasure> snapshots;
  snapshots.reserve(times.size());
  for (double t : times) snapshots.push_back(curve.sampler(t));

  SpeedReport report;
  std::size_t i0 = 0, i1 = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == 0.0) i0 = i;
    if (times[i] == 1.0) i1 = i;
  }
  report.base_distance = wasserstein_p(snapshots[i0], snapshots[i1], curve.metric);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double w = wasserstein_p(snapshots[i], snapshots[j], curve.metric);
      const double expected = std::abs(times[i] - times[j]) * report.base_distance;
      report.max_abs_deviation =
          std::max(report.max_abs_deviation, std::abs(w - expected));
    }
  }
  report.pass = report.max_abs_deviation <= tol;
  return report;
}

GaussianMeasure gaussian_geodesic(const GaussianMeasure& g0,
                                  const GaussianMeasure& g1, double t) {
  validate_gaussian(g0);
  validate_gaussian(g1);
  if (g0.dim() != g1.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Gaussian dimensions differ");
  }
  if (t < 0.0 || t > 1.0) {
    throw Error(ErrorCode::OutOfRange, "geodesic time outside [0, 1]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0.covariance);
  if (es.eigenvalues().minCoeff() <= 1e-12) {
    throw Error(ErrorCode::SingularCovariance,
                "geodesic requires a nonsingular start covariance");
  }
  const Eigen::MatrixXd s0h = sqrt_psd(g0.covariance);
  const Eigen::MatrixXd s0h_inv = s0h.inverse();
  // Monge matrix from Sigma0 to Sigma1.
  const Eigen::MatrixXd a =
      s0h_inv * sqrt_psd(s0h * g1.covariance * s0h) * s0h_inv;
  const Eigen::Index d = g0.dim();
  const Eigen::MatrixXd mix =
      (1.0 - t) * Eigen::MatrixXd::Identity(d, d) + t * a;

  GaussianMeasure out;
  out.mean = (1.0 - t) * g0.mean + t * g1.mean;
  out.covariance = mix * g0.covariance * mix;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

double wasserstein_variance(const std::vector<DiscreteMeasure>& measures,
                            const Eigen::VectorXd& alphas, long tuple_cap) {
  return multimarginal_coupling(measures, alphas, tuple_cap).objective;
}

Lemma2Decomposition lemma2_decomposition(
    const std::vector<DiscreteMeasure>& latent_families,
    const BarycenterWeights& bw, long tuple_cap) {
  bw.check();
  if (latent_families.size() != bw.labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "one latent family per label required");
  }
  Lemma2Decomposition out;
  out.variance_term = wasserstein_variance(latent_families, bw.alphas, tuple_cap);
  out.label_term = bw.label_variance();
  out.total = out.variance_term + out.label_term;
  return out;
}

DiscreteMeasure barycenter_multimarginal(
    const std::vector<DiscreteMeasure>& measures, const Eigen::VectorXd& alphas,
    long tuple_cap) {
  const MultiCouplingResult mc = multimarginal_coupling(measures, alphas, tuple_cap);
  const Eigen::Index d = measures.front().dim();
  DiscreteMeasure out;
  out.points.resize(static_cast<Eigen::Index>(mc.coupling.entries.size()), d);
  out.weights.resize(static_cast<Eigen::Index>(mc.coupling.entries.size()));
  double mass = 0.0;
  for (std::size_t k = 0; k < mc.coupling.entries.size(); ++k) {
    const auto& [tuple, w] = mc.coupling.entries[k];
    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(d);
    for (std::size_t m = 0; m < tuple.size(); ++m) {
      xbar += alphas[static_cast<Eigen::Index>(m)] * measures[m].atom(tuple[m]);
    }
    out.points.row(static_cast<Eigen::Index>(k)) = xbar.transpose();
    out.weights[static_cast<Eigen::Index>(k)] = w;
    mass += w;
  }
  out.weights /= mass;  // clear LP dust so the result is a valid measure
  return out;
}

GaussianMeasure gaussian_barycenter(const std::vector<GaussianMeasure>& gs,
                                    const Eigen::VectorXd& alphas, double tol,
                                    int max_iter) {
  const int M = static_cast<int>(gs.size());
  if (M < 1) throw Error(ErrorCode::EmptySupport, "no Gaussians given");
  if (alphas.size() != M) {
    throw Error(ErrorCode::DimensionMismatch, "weight count mismatch");
  }
  const Eigen::Index d = gs.front().dim();
  GaussianMeasure out;
  out.mean = Eigen::VectorXd::Zero(d);
  for (int m = 0; m < M; ++m) {
    validate_gaussian(gs[m]);
    if (gs[m].dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "Gaussian dimensions differ");
    }
    out.mean += alphas[m] * gs[m].mean;
  }

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (int m = 0; m < M; ++m) s += alphas[m] * gs[m].covariance;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd sh = sqrt_psd(s);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(d, d);
    for (int m = 0; m < M; ++m) {
      next += alphas[m] * sqrt_psd(sh * gs[m].covariance * sh);
    }
    next = 0.5 * (next + next.transpose());
    const double change = (next - s).norm();
    s = next;
    if (change < tol) {
      out.covariance = s;
      return out;
    }
  }
  throw Error(ErrorCode::MaxIterExceeded,
              "Gaussian barycenter fixed point did not converge");
}

}  // namespace condgeo
