#include <doctest.h>

#include "condgeo/ot.hpp"
#include "condgeo/rng.hpp"
#include "condgeo/synthetic.hpp"
#include "oracles.hpp"

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

TEST_CASE("point masses transport with the only feasible plan") {
  const CouplingResult res =
      exact_coupling(atoms1d({0.0}), atoms1d({1.0}), euclidean_metric(1.0));
  CHECK(res.cost == doctest::Approx(1.0));
  CHECK(res.coupling.matrix(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("identical measures cost nothing") {
  const DiscreteMeasure u = atoms1d({0.0, 1.0});
  CHECK(exact_coupling(u, u, euclidean_metric(2.0)).cost ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wasserstein_p(u, u, euclidean_metric(2.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-atom shift picks the monotone plan") {
  const DiscreteMeasure mu = atoms1d({0.0, 2.0});
  const DiscreteMeasure nu = atoms1d({1.0, 3.0});
  // Vertex enumeration: identity pairing costs (1 + 1)/2 = 1, the crossing
  // plan costs (9 + 1)/2 = 5.
  Eigen::MatrixXd costs(2, 2);
  costs << 1.0, 9.0, 1.0, 1.0;
  CHECK(oracles::assignment_enumeration(costs) == doctest::Approx(1.0));
  const CouplingResult res = exact_coupling(mu, nu, euclidean_metric(2.0));
  CHECK(res.cost == doctest::Approx(1.0));
  CHECK(res.coupling.matrix(0, 0) == doctest::Approx(0.5));
  CHECK(res.coupling.matrix(1, 1) == doctest::Approx(0.5));
  CHECK(wasserstein_p(mu, nu, euclidean_metric(2.0)) == doctest::Approx(1.0));
}

TEST_CASE("W1 between point masses is the distance") {
  CHECK(wasserstein_p(atoms1d({0.0}), atoms1d({3.0}), euclidean_metric(1.0)) ==
        doctest::Approx(3.0));
}

TEST_CASE("flow solver agrees with permutation enumeration on uniform instances") {
  Rng rng(2024u);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform01() * 5);
    const int d = 1 + static_cast<int>(rng.uniform01() * 3);
    const DiscreteMeasure mu = random_measure(rng, n, d);
    const DiscreteMeasure nu = random_measure(rng, n, d);
    const MetricSpec metric = euclidean_metric(2.0);
    const Eigen::MatrixXd costs = pairwise_costs(mu, nu, metric);
    const double brute = oracles::assignment_enumeration(costs);
    const double solved = exact_coupling(mu, nu, metric).cost;
    CHECK(solved == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("flow solver agrees with the dense-simplex LP on general instances") {
  Rng rng(2025u);
  for (int rep = 0; rep < 15; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 6);
    const int m = 2 + static_cast<int>(rng.uniform01() * 6);
    const DiscreteMeasure mu = random_measure(rng, n, 2, 2.0, false);
    const DiscreteMeasure nu = random_measure(rng, m, 2, 2.0, false);
    const Eigen::MatrixXd costs = pairwise_costs(mu, nu, euclidean_metric(2.0));
    const double lp = oracles::transport_lp(mu.weights, nu.weights, costs);
    const double flow = exact_coupling(mu, nu, euclidean_metric(2.0)).cost;
    CHECK(flow == doctest::Approx(lp).epsilon(1e-9));
    validate_coupling(exact_coupling(mu, nu, euclidean_metric(2.0)).coupling, mu,
                      nu, 1e-10);
  }
}

TEST_CASE("1-D fast path matches the LP route") {
  Rng rng(2026u);
  for (int rep = 0; rep < 10; ++rep) {
    const DiscreteMeasure mu = random_measure(rng, 6, 1, 2.0, false);
    const DiscreteMeasure nu = random_measure(rng, 4, 1, 2.0, false);
    for (const double p : {1.0, 2.0, 3.0}) {
      const Eigen::MatrixXd costs = pairwise_costs(mu, nu, euclidean_metric(p));
      const double lp = oracles::transport_lp(mu.weights, nu.weights, costs);
      CHECK(exact_coupling(mu, nu, euclidean_metric(p)).cost ==
            doctest::Approx(lp).epsilon(1e-9));
    }
  }
}

TEST_CASE("sinkhorn approaches the exact cost and stays feasible") {
  const DiscreteMeasure mu = atoms1d({0.0});
  const DiscreteMeasure nu = atoms1d({1.0});
  const SinkhornResult res =
      sinkhorn_coupling(mu, nu, euclidean_metric(1.0), 0.01);
  CHECK(std::abs(res.cost - 1.0) < 1e-2);

  Rng rng(2027u);
  const DiscreteMeasure a = random_measure(rng, 5, 2);
  const DiscreteMeasure b = random_measure(rng, 6, 2, 2.0, false);
  const SinkhornResult sk = sinkhorn_coupling(a, b, euclidean_metric(2.0), 0.05);
  validate_coupling(sk.coupling, a, b, 1e-9);

  // Large epsilon: nearly the product coupling, still feasible.
  const DiscreteMeasure u = atoms1d({0.0, 1.0});
  const SinkhornResult hot = sinkhorn_coupling(u, u, euclidean_metric(2.0), 10.0);
  validate_coupling(hot.coupling, u, u, 1e-9);
  CHECK(hot.coupling.matrix(0, 1) > 0.1);  // mass spreads off the diagonal

  // Decrease is monotone up to the marginal-rounding noise floor, which both
  // small-epsilon runs can reach on easy instances.
  const double exact = exact_coupling(a, b, euclidean_metric(2.0)).cost;
  double prev = 1e300;
  for (const double eps : {1.0, 0.1, 0.01}) {
    const double err =
        std::abs(sinkhorn_coupling(a, b, euclidean_metric(2.0), eps, 30000, 1e-10)
                     .cost -
                 exact);
    CHECK(err <= prev + 1e-9);
    prev = err;
  }
}

TEST_CASE("gaussian_w2 closed forms") {
  GaussianMeasure g1, g2;
  g1.mean = Eigen::VectorXd::Zero(2);
  g1.covariance = Eigen::MatrixXd::Identity(2, 2);
  g2.mean = Eigen::VectorXd::Zero(2);
  g2.mean << 3.0, 4.0;
  g2.covariance = Eigen::MatrixXd::Identity(2, 2);
  CHECK(gaussian_w2(g1, g2) == doctest::Approx(5.0));

  CHECK(gaussian_w2(gauss1d(0.0, 1.44), gauss1d(0.0, 0.25)) ==
        doctest::Approx(0.7));
  CHECK(gaussian_w2(gauss1d(0.0, 1.0), gauss1d(2.0, 1.0)) == doctest::Approx(2.0));
}

TEST_CASE("monge map extraction") {
  const DiscreteMeasure mu = atoms1d({0.0, 2.0});
  const DiscreteMeasure nu = atoms1d({1.0, 3.0});
  const CouplingResult res = exact_coupling(mu, nu, euclidean_metric(2.0));
  const MongeMapResult map = monge_map_from_coupling(res.coupling);
  CHECK_FALSE(map.projected);
  CHECK(map.images(0, 0) == doctest::Approx(1.0));
  CHECK(map.images(1, 0) == doctest::Approx(3.0));

  const CouplingResult id = exact_coupling(mu, mu, euclidean_metric(2.0));
  const MongeMapResult idmap = monge_map_from_coupling(id.coupling);
  CHECK_FALSE(idmap.projected);
  CHECK(idmap.images(0, 0) == doctest::Approx(0.0));

  const CouplingResult split =
      exact_coupling(atoms1d({0.0}), atoms1d({-1.0, 1.0}), euclidean_metric(2.0));
  const MongeMapResult proj = monge_map_from_coupling(split.coupling);
  CHECK(proj.projected);
  CHECK(proj.images(0, 0) == doctest::Approx(0.0));

  Coupling zero_row;
  zero_row.row_support = mu.points;
  zero_row.col_support = nu.points;
  zero_row.matrix = Eigen::MatrixXd::Zero(2, 2);
  zero_row.matrix(0, 0) = 1.0;
  CHECK_THROWS_AS(monge_map_from_coupling(zero_row), Error);
}

TEST_CASE("multimarginal objective on dirac tuples") {
  std::vector<DiscreteMeasure> pair = {atoms1d({0.0}), atoms1d({2.0})};
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  const MultiCouplingResult two = multimarginal_coupling(pair, half);
  CHECK(two.objective == doctest::Approx(1.0));

  std::vector<DiscreteMeasure> same = {atoms1d({0.0, 1.0}), atoms1d({0.0, 1.0})};
  CHECK(multimarginal_coupling(same, half).objective ==
        doctest::Approx(0.0).epsilon(1e-12));

  std::vector<DiscreteMeasure> three = {atoms1d({0.0}), atoms1d({1.0}),
                                        atoms1d({2.0})};
  Eigen::VectorXd third = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  CHECK(multimarginal_coupling(three, third).objective ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("multimarginal equals alpha-weighted pairwise cost for two marginals") {
  Rng rng(2028u);
  for (int rep = 0; rep < 6; ++rep) {
    const DiscreteMeasure a = random_measure(rng, 3, 2);
    const DiscreteMeasure b = random_measure(rng, 4, 2, 2.0, false);
    Eigen::VectorXd alphas(2);
    alphas << 0.3, 0.7;
    const double direct = multimarginal_coupling({a, b}, alphas).objective;
    const double w2sq = exact_coupling(a, b, euclidean_metric(2.0)).cost;
    CHECK(direct == doctest::Approx(alphas[0] * alphas[1] * w2sq).epsilon(1e-9));

    // Exercise the LP route against the same closed form by padding with a
    // zero-weight Dirac third marginal.
    DiscreteMeasure dirac_pad;
    dirac_pad.points = Eigen::MatrixXd::Zero(1, 2);
    dirac_pad.weights = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd padded(3);
    padded << 0.3, 0.7, 0.0;
    const double lp_route =
        multimarginal_coupling({a, b, dirac_pad}, padded).objective;
    CHECK(lp_route == doctest::Approx(alphas[0] * alphas[1] * w2sq).epsilon(1e-9));
  }
}

TEST_CASE("multimarginal enforces the tuple cap") {
  Rng rng(2029u);
  std::vector<DiscreteMeasure> ms;
  for (int m = 0; m < 3; ++m) ms.push_back(random_measure(rng, 11, 1));
  Eigen::VectorXd third = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  CHECK_THROWS_AS(multimarginal_coupling(ms, third, 1000), Error);
}

TEST_CASE("dimension mismatches and bad parameters are rejected") {
  DiscreteMeasure two;
  two.points = Eigen::MatrixXd::Zero(1, 2);
  two.weights = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(exact_coupling(atoms1d({0.0}), two, euclidean_metric(2.0)),
                  Error);
  CHECK_THROWS_AS(
      sinkhorn_coupling(atoms1d({0.0}), atoms1d({1.0}), euclidean_metric(2.0), 0.0),
      Error);
  CHECK_THROWS_AS(euclidean_metric(0.5), Error);

  GaussianMeasure bad;
  bad.mean = Eigen::VectorXd::Zero(2);
  bad.covariance = Eigen::MatrixXd::Identity(2, 2);
  bad.covariance(0, 0) = -1.0;
  CHECK_THROWS_AS(gaussian_w2(bad, bad), Error);
}

TEST_CASE("sinkhorn reports budget exhaustion but still rounds the plan") {
  Rng rng(2031u);
  const DiscreteMeasure a = random_measure(rng, 6, 2);
  const DiscreteMeasure b = random_measure(rng, 6, 2, 2.0, false);
  const SinkhornResult res =
      sinkhorn_coupling(a, b, euclidean_metric(2.0), 1e-4, 3, 1e-12);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 3);
  validate_coupling(res.coupling, a, b, 1e-9);
}

TEST_CASE("weighted product metric splits data and label blocks") {
  const MetricSpec wp = weighted_product_metric(1, 4.0, 2.0);
  Eigen::VectorXd a(2), b(2);
  a << 0.0, 0.0;
  b << 3.0, 1.0;  // data part differs by 3, label part by 1
  CHECK(wp.distance(a, b) == doctest::Approx(std::sqrt(9.0 + 4.0)));
  CHECK(wp.cost(a, b) == doctest::Approx(13.0));
  CHECK_THROWS_AS(weighted_product_metric(1, -1.0, 2.0), Error);
}

TEST_CASE("tuple cap honors the environment override") {
  setenv("CONDGEO_MAX_TUPLES", "123", 1);
  CHECK(multimarginal_tuple_cap() == 123);
  unsetenv("CONDGEO_MAX_TUPLES");
  CHECK(multimarginal_tuple_cap() == 1000000L);
}

TEST_CASE("marginal feasibility of multimarginal plans") {
  Rng rng(2030u);
  std::vector<DiscreteMeasure> ms = {random_measure(rng, 3, 1, 2.0, false),
                                     random_measure(rng, 4, 1, 2.0, false),
                                     random_measure(rng, 3, 1)};
  Eigen::VectorXd alphas(3);
  alphas << 0.2, 0.5, 0.3;
  const MultiCouplingResult res = multimarginal_coupling(ms, alphas);
  for (std::size_t m = 0; m < ms.size(); ++m) {
    Eigen::VectorXd marg = Eigen::VectorXd::Zero(ms[m].size());
    for (const auto& [tuple, w] : res.coupling.entries) {
      marg[tuple[m]] += w;
    }
    CHECK((marg - ms[m].weights).cwiseAbs().maxCoeff() < 1e-8);
  }
}
