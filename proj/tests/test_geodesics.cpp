#include <doctest.h>

#include "condgeo/geodesics.hpp"
#include "condgeo/rng.hpp"
#include "condgeo/synthetic.hpp"

using namespace condgeo;

namespace {

DiscreteMeasure atoms1d(std::initializer_list<double> xs) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return empirical_from_samples(pts);
}

GaussianMeasure gauss1d(double mean, double var) {
  GaussianMeasure g;
  g.mean = Eigen::VectorXd::Constant(1, mean);
  g.covariance = Eigen::MatrixXd::Constant(1, 1, var);
  return g;
}

}  // namespace

TEST_CASE("mccann midpoint of point masses") {
  const DiscreteMeasure mid =
      mccann_interpolant(atoms1d({0.0}), atoms1d({2.0}), 0.5, euclidean_metric(2.0));
  CHECK(mid.size() == 1);
  CHECK(mid.points(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("mccann endpoints are returned exactly") {
  const DiscreteMeasure mu = atoms1d({0.0, 2.0});
  const DiscreteMeasure nu = atoms1d({1.0, 3.0});
  CHECK(same_atoms(mccann_interpolant(mu, nu, 0.0, euclidean_metric(2.0)), mu, 0.0));
  CHECK(same_atoms(mccann_interpolant(mu, nu, 1.0, euclidean_metric(2.0)), nu, 0.0));
}

TEST_CASE("mccann midpoint of the two-atom shift") {
  const DiscreteMeasure mid = mccann_interpolant(atoms1d({0.0, 2.0}),
                                                 atoms1d({1.0, 3.0}), 0.5,
                                                 euclidean_metric(2.0));
  CHECK(same_atoms(mid, atoms1d({0.5, 2.5}), 1e-12));
}

TEST_CASE("mccann rejects p != 2") {
  CHECK_THROWS_AS(
      mccann_interpolant(atoms1d({0.0}), atoms1d({1.0}), 0.5, euclidean_metric(1.0)),
      Error);
}

TEST_CASE("constant-speed report on interpolant curves") {
  const DiscreteMeasure mu = atoms1d({0.0, 2.0});
  const DiscreteMeasure nu = atoms1d({1.0, 3.0});
  GeodesicCurve curve;
  curve.metric = euclidean_metric(2.0);
  curve.sampler = [&](double t) {
    return mccann_interpolant(mu, nu, t, euclidean_metric(2.0));
  };
  curve.start = mu;
  curve.end = nu;
  const SpeedReport rep =
      verify_constant_speed(curve, {0.0, 0.25, 0.5, 0.75, 1.0}, 1e-8);
  CHECK(rep.pass);
  CHECK(rep.max_abs_deviation <= 1e-8);
  CHECK(rep.base_distance == doctest::Approx(1.0));
}

TEST_CASE("mixture curve is not constant speed") {
  const DiscreteMeasure mu = atoms1d({0.0});
  const DiscreteMeasure nu = atoms1d({1.0});
  GeodesicCurve curve;
  curve.metric = euclidean_metric(2.0);
  curve.sampler = [&](double t) {
    if (t == 0.0) return mu;
    if (t == 1.0) return nu;
    DiscreteMeasure mix;
    mix.points.resize(2, 1);
    mix.points << 0.0, 1.0;
    mix.weights.resize(2);
    mix.weights << 1.0 - t, t;
    return mix;
  };
  curve.start = mu;
  curve.end = nu;
  const SpeedReport rep = verify_constant_speed(curve, {0.0, 0.5, 1.0}, 1e-6);
  CHECK_FALSE(rep.pass);
  // W2(mix(1/2), delta_0) = sqrt(1/2), so the deviation is sqrt(1/2) - 1/2.
  CHECK(rep.max_abs_deviation ==
        doctest::Approx(std::sqrt(0.5) - 0.5).epsilon(1e-9));
  CHECK(rep.max_abs_deviation >= 0.2);
}

TEST_CASE("verify_constant_speed requires the endpoints") {
  GeodesicCurve curve;
  curve.metric = euclidean_metric(2.0);
  curve.sampler = [](double) { return atoms1d({0.0}); };
  CHECK_THROWS_AS(verify_constant_speed(curve, {0.0, 0.5}, 1e-6), Error);
}

TEST_CASE("gaussian geodesic translation and scaling") {
  const GaussianMeasure mid = gaussian_geodesic(gauss1d(0.0, 1.0), gauss1d(2.0, 1.0), 0.5);
  CHECK(mid.mean[0] == doctest::Approx(1.0));
  CHECK(mid.covariance(0, 0) == doctest::Approx(1.0));

  CHECK(gaussian_geodesic(gauss1d(0.3, 2.0), gauss1d(1.0, 5.0), 0.0).mean[0] ==
        doctest::Approx(0.3));
  CHECK(gaussian_geodesic(gauss1d(0.3, 2.0), gauss1d(1.0, 5.0), 1.0).covariance(0, 0) ==
        doctest::Approx(5.0));

  // Interpolated standard deviation (1-t) sigma0 + t sigma1 = 2.
  const GaussianMeasure scaled =
      gaussian_geodesic(gauss1d(0.0, 1.0), gauss1d(0.0, 9.0), 0.5);
  CHECK(scaled.covariance(0, 0) == doctest::Approx(4.0));

  GaussianMeasure degenerate;
  degenerate.mean = Eigen::VectorXd::Zero(1);
  degenerate.covariance = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(gaussian_geodesic(degenerate, gauss1d(0.0, 1.0), 0.5), Error);
}

TEST_CASE("wasserstein variance on small families") {
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  std::vector<DiscreteMeasure> same = {atoms1d({0.0, 1.0}), atoms1d({0.0, 1.0})};
  CHECK(wasserstein_variance(same, half) == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<DiscreteMeasure> diracs = {atoms1d({0.0}), atoms1d({2.0})};
  CHECK(wasserstein_variance(diracs, half) == doctest::Approx(1.0));

  std::vector<DiscreteMeasure> shifted = {atoms1d({0.0, 2.0}), atoms1d({1.0, 3.0})};
  CHECK(wasserstein_variance(shifted, half) == doctest::Approx(0.25));
}

TEST_CASE("lemma2 decomposition adds the label variance") {
  std::vector<Eigen::VectorXd> labels = {Eigen::VectorXd::Constant(1, 0.0),
                                         Eigen::VectorXd::Constant(1, 1.0)};
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  const BarycenterWeights bw = make_barycenter_weights(labels, half);

  std::vector<DiscreteMeasure> same = {atoms1d({0.0, 1.0}), atoms1d({0.0, 1.0})};
  const Lemma2Decomposition identical = lemma2_decomposition(same, bw);
  CHECK(identical.variance_term == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(identical.label_term == doctest::Approx(0.25));
  CHECK(identical.total == doctest::Approx(0.25));

  std::vector<DiscreteMeasure> diracs = {atoms1d({0.0}), atoms1d({2.0})};
  const Lemma2Decomposition spread = lemma2_decomposition(diracs, bw);
  CHECK(spread.variance_term == doctest::Approx(1.0));
  CHECK(spread.total == doctest::Approx(1.25));

  std::vector<Eigen::VectorXd> one_label = {Eigen::VectorXd::Constant(1, 4.0)};
  const BarycenterWeights single =
      make_barycenter_weights(one_label, Eigen::VectorXd::Ones(1));
  const Lemma2Decomposition s = lemma2_decomposition({atoms1d({0.5})}, single);
  CHECK(s.total == doctest::Approx(0.0));
}

TEST_CASE("multimarginal barycenter pushforward") {
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  const DiscreteMeasure mid =
      barycenter_multimarginal({atoms1d({0.0}), atoms1d({4.0})}, half);
  CHECK(same_atoms(mid, atoms1d({2.0}), 1e-12));

  const DiscreteMeasure fixed =
      barycenter_multimarginal({atoms1d({0.0, 1.0}), atoms1d({0.0, 1.0})}, half);
  CHECK(same_atoms(fixed, atoms1d({0.0, 1.0}), 1e-12));

  Eigen::VectorXd third = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  const DiscreteMeasure center = barycenter_multimarginal(
      {atoms1d({0.0}), atoms1d({1.0}), atoms1d({2.0})}, third);
  CHECK(same_atoms(center, atoms1d({1.0}), 1e-12));
}

TEST_CASE("barycenter attains the variance") {
  Rng rng(13u);
  for (int rep = 0; rep < 6; ++rep) {
    std::vector<DiscreteMeasure> ms;
    const int M = 2 + rep % 2;
    for (int m = 0; m < M; ++m) {
      ms.push_back(random_measure(rng, 3, 2, 2.0, rep % 2 == 1));
    }
    Eigen::VectorXd alphas(M);
    for (int m = 0; m < M; ++m) alphas[m] = 0.2 + rng.uniform01();
    alphas /= alphas.sum();
    const double variance = wasserstein_variance(ms, alphas);
    const DiscreteMeasure bar = barycenter_multimarginal(ms, alphas);
    double attained = 0.0;
    for (int m = 0; m < M; ++m) {
      attained += alphas[m] * exact_coupling(bar, ms[m], euclidean_metric(2.0)).cost;
    }
    CHECK(attained == doctest::Approx(variance).epsilon(1e-8));
  }
}

TEST_CASE("gaussian barycenter fixed point") {
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  const GaussianMeasure shifted =
      gaussian_barycenter({gauss1d(0.0, 1.0), gauss1d(4.0, 1.0)}, half);
  CHECK(shifted.mean[0] == doctest::Approx(2.0));
  CHECK(shifted.covariance(0, 0) == doctest::Approx(1.0));

  const GaussianMeasure same =
      gaussian_barycenter({gauss1d(1.0, 2.0), gauss1d(1.0, 2.0)}, half);
  CHECK(same.mean[0] == doctest::Approx(1.0));
  CHECK(same.covariance(0, 0) == doctest::Approx(2.0));

  // 1-D barycenter standard deviation is the weighted mean of deviations.
  const GaussianMeasure spread =
      gaussian_barycenter({gauss1d(0.0, 1.0), gauss1d(0.0, 9.0)}, half);
  CHECK(std::sqrt(spread.covariance(0, 0)) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("gaussian barycenter reports iteration exhaustion") {
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  CHECK_THROWS_AS(
      gaussian_barycenter({gauss1d(0.0, 1.0), gauss1d(0.0, 9.0)}, half, 1e-16, 2),
      Error);
}

TEST_CASE("2-D gaussian barycenter satisfies the fixed-point equation") {
  Rng rng(14u);
  std::vector<GaussianMeasure> gs;
  for (int m = 0; m < 3; ++m) {
    Eigen::MatrixXd a(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) a(i, j) = rng.normal();
    }
    GaussianMeasure g;
    g.mean = Eigen::VectorXd::Zero(2);
    g.covariance = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(2, 2);
    gs.push_back(g);
  }
  Eigen::VectorXd alphas(3);
  alphas << 0.5, 0.3, 0.2;
  const GaussianMeasure bar = gaussian_barycenter(gs, alphas);
  const Eigen::MatrixXd sh = sqrt_psd(bar.covariance);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2, 2);
  for (int m = 0; m < 3; ++m) {
    rhs += alphas[m] * sqrt_psd(sh * gs[m].covariance * sh);
  }
  CHECK((rhs - bar.covariance).norm() < 1e-8);
}

TEST_CASE("grid weight selection reaches cbar and minimizes the label variance") {
  std::vector<Eigen::VectorXd> labels = {Eigen::VectorXd::Constant(1, 0.0),
                                         Eigen::VectorXd::Constant(1, 1.0),
                                         Eigen::VectorXd::Constant(1, 2.0)};
  const BarycenterWeights bw =
      select_barycenter_weights(labels, Eigen::VectorXd::Constant(1, 1.0));
  // cbar = 1 is reachable by the middle label alone, which has zero variance.
  CHECK(bw.alphas[1] == doctest::Approx(1.0));
  CHECK(bw.label_variance() == doctest::Approx(0.0));

  CHECK_THROWS_AS(
      select_barycenter_weights(labels, Eigen::VectorXd::Constant(1, 97.0)), Error);
}

TEST_CASE("barycenter weights validate their combination point") {
  std::vector<Eigen::VectorXd> labels = {Eigen::VectorXd::Constant(1, 0.0),
                                         Eigen::VectorXd::Constant(1, 1.0)};
  Eigen::VectorXd alphas(2);
  alphas << 0.25, 0.75;
  BarycenterWeights bw = make_barycenter_weights(labels, alphas);
  CHECK(bw.cbar[0] == doctest::Approx(0.75));
  bw.cbar[0] = 0.5;
  CHECK_THROWS_AS(bw.check(), Error);
}
