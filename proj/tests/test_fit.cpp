#include <doctest.h>

#include "condgeo/fit.hpp"
#include "condgeo/rng.hpp"
#include "condgeo/synthetic.hpp"

using namespace condgeo;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

AffineBijectionPair identity_pair(const std::vector<Eigen::VectorXd>& labels,
                                  int d) {
  std::vector<Eigen::MatrixXd> lin(labels.size(), Eigen::MatrixXd::Identity(d, d));
  std::vector<Eigen::VectorXd> off(labels.size(), Eigen::VectorXd::Zero(d));
  return AffineBijectionPair(labels, lin, off);
}

}  // namespace

TEST_CASE("sample divergences vanish only at equal measures") {
  Rng rng(61u);
  const DiscreteMeasure a = random_measure(rng, 8, 2);
  DiscreteMeasure b = a;
  b.points.array() += 0.5;
  FitConfig cfg;
  for (const auto kind :
       {DivergenceKind::energy_distance, DivergenceKind::sliced_wasserstein,
        DivergenceKind::sinkhorn_divergence}) {
    cfg.divergence = kind;
    CHECK(sample_divergence(a, a, cfg) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sample_divergence(a, b, cfg) > 1e-3);
  }
}

TEST_CASE("autoencoder fit: zero loss at identity when data equals the prior") {
  Rng rng(62u);
  const DiscreteMeasure prior = random_measure(rng, 8, 1);
  LabeledDataset data;
  data.x = prior.points;
  data.c = Eigen::MatrixXd::Zero(prior.size(), 1);
  FitConfig cfg;
  cfg.lambda_match_latent = 0.0;
  cfg.max_iter = 1;
  const FitAutoencoderResult res = fit_autoencoder(data, prior, cfg);
  CHECK(res.loss_trace.front() <= 1e-12);
}

TEST_CASE("autoencoder fit recovers a planted affine pair in 1-D and 2-D") {
  for (const int d : {1, 2}) {
    Rng rng(63u + d);
    const auto labels = distinct_labels(rng, 2, 1);
    const AffineBijectionPair truth = random_affine_pair(rng, labels, d);
    const DiscreteMeasure prior = random_measure(rng, 10, d, 1.5);

    // Data: per label, the generator pushforward of the prior.
    const Eigen::Index n = prior.size();
    LabeledDataset data;
    data.x.resize(2 * n, d);
    data.c.resize(2 * n, 1);
    for (std::size_t m = 0; m < 2; ++m) {
      for (Eigen::Index i = 0; i < n; ++i) {
        data.x.row(static_cast<Eigen::Index>(m) * n + i) =
            truth.generate(prior.atom(i), m).transpose();
        data.c.row(static_cast<Eigen::Index>(m) * n + i) = labels[m].transpose();
      }
    }

    FitConfig cfg;
    cfg.lambda_match_latent = 1.0;
    cfg.lambda_recon_latent = 0.1;
    cfg.max_iter = 5000;
    cfg.step_size = 0.25;
    cfg.tol_loss = 1e-3;
    const FitAutoencoderResult res = fit_autoencoder(data, prior, cfg);

    // Reconstruction is structurally exact; the matching divergence must be
    // driven below 1e-3 by the descent.
    const ConditionalFamily fam = conditional_family_from_labeled(data);
    double recon = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
      const DiscreteMeasure& dm = fam.discrete(m);
      const std::size_t pm = res.pair.index_of(fam.labels[m]);
      for (Eigen::Index i = 0; i < dm.size(); ++i) {
        const Eigen::VectorXd x = dm.atom(i);
        recon = std::max(
            recon, (res.pair.generate(res.pair.encode(x, pm), pm) - x).norm());
      }
    }
    CHECK(recon <= 1e-6);
    CHECK(res.loss_trace.back() <= 1e-3);
    // Non-increasing trace.
    for (std::size_t k = 1; k < res.loss_trace.size(); ++k) {
      CHECK(res.loss_trace[k] <= res.loss_trace[k - 1] + 1e-9);
    }
  }
}

TEST_CASE("one-label dataset keeps reconstruction at zero for any invertible block") {
  Rng rng(65u);
  const auto labels = distinct_labels(rng, 1, 1);
  const AffineBijectionPair any = random_affine_pair(rng, labels, 2);
  const DiscreteMeasure prior = random_measure(rng, 6, 2);
  LabeledDataset data;
  data.x.resize(prior.size(), 2);
  data.c.resize(prior.size(), 1);
  for (Eigen::Index i = 0; i < prior.size(); ++i) {
    data.x.row(i) = any.generate(prior.atom(i), 0).transpose();
    data.c.row(i) = labels[0].transpose();
  }
  FitConfig cfg;
  cfg.max_iter = 50;
  cfg.step_size = 0.1;
  const FitAutoencoderResult res = fit_autoencoder(data, prior, cfg);
  const ConditionalFamily fam = conditional_family_from_labeled(data);
  const DiscreteMeasure& dm = fam.discrete(0);
  for (Eigen::Index i = 0; i < dm.size(); ++i) {
    const Eigen::VectorXd x = dm.atom(i);
    CHECK((res.pair.generate(res.pair.encode(x, 0), 0) - x).norm() <= 1e-8);
  }
}

TEST_CASE("theorem6 gap: oracle against itself is zero, perturbations cost") {
  Rng rng(66u);
  const SyntheticPipeline sp = generic_pipeline(rng, 2, 5, 1);
  const Pipeline& pl = sp.pipeline;
  FitConfig cfg;
  cfg.lambda_transport = 1.0;
  cfg.lambda_match_data = 100.0;
  cfg.lambda_cycle = 5.0;
  CHECK(theorem6_gap(pl.tmap, pl.tmap, pl.pair, pl.family, cfg) ==
        doctest::Approx(0.0));

  TransportMap shifted = pl.tmap;
  for (Eigen::Index i = 0; i < shifted.entry(0, 1).images.rows(); ++i) {
    shifted.entry(0, 1).images(i, 0) += 0.5;
  }
  CHECK(theorem6_gap(shifted, pl.tmap, pl.pair, pl.family, cfg) > 1e-3);

  for (int trial = 0; trial < 50; ++trial) {
    TransportMap perturbed = pl.tmap;
    for (auto& entry : perturbed.entries) {
      for (Eigen::Index i = 0; i < entry.images.rows(); ++i) {
        entry.images(i, 0) += 0.6 * (rng.uniform01() - 0.5);
      }
    }
    CHECK(theorem6_gap(perturbed, pl.tmap, pl.pair, pl.family, cfg) >= -1e-6);
  }
}

TEST_CASE("corollary1 setting: identity encoder, two labels") {
  Rng rng(67u);
  const auto labels = distinct_labels(rng, 2, 1);
  const AffineBijectionPair id = identity_pair(labels, 1);
  ConditionalFamily fam;
  fam.labels = labels;
  fam.label_weights = Eigen::VectorXd::Constant(2, 0.5);
  fam.measures = {random_measure(rng, 5, 1), random_measure(rng, 5, 1)};
  const TransportMap oracle = build_exact_transport_map(id, fam, 2.0);
  FitConfig cfg;
  cfg.lambda_match_data = 100.0;
  cfg.lambda_cycle = 5.0;
  for (int trial = 0; trial < 50; ++trial) {
    TransportMap perturbed = oracle;
    for (auto& entry : perturbed.entries) {
      for (Eigen::Index i = 0; i < entry.images.rows(); ++i) {
        entry.images(i, 0) += 0.5 * (rng.uniform01() - 0.5);
      }
    }
    CHECK(theorem6_gap(perturbed, oracle, id, fam, cfg) >= -1e-6);
  }
}

TEST_CASE("transport fit: identical families pull the map to the identity") {
  Rng rng(68u);
  const auto labels = distinct_labels(rng, 2, 1);
  const AffineBijectionPair id = identity_pair(labels, 1);
  const DiscreteMeasure base = quantile_discretization(0.0, 1.0, 16);
  LabeledDataset data;
  data.x.resize(32, 1);
  data.c.resize(32, 1);
  for (int m = 0; m < 2; ++m) {
    for (int i = 0; i < 16; ++i) {
      data.x(m * 16 + i, 0) = base.points(i, 0);
      data.c.row(m * 16 + i) = labels[m].transpose();
    }
  }
  FitConfig cfg;
  cfg.lambda_transport = 0.1;
  cfg.lambda_match_data = 100.0;
  cfg.lambda_cycle = 5.0;
  cfg.max_iter = 3000;
  cfg.step_size = 0.02;
  const FitTransportResult res = fit_transport_map(id, data, cfg);
  // Sup deviation from the identity on the data range.
  double dev = 0.0;
  for (int i = 0; i < 16; ++i) {
    const Eigen::VectorXd x = base.atom(i);
    dev = std::max(dev, std::abs(res.tmap.entry(0, 1).apply(x)[0] - x[0]));
    dev = std::max(dev, std::abs(res.tmap.entry(1, 0).apply(x)[0] - x[0]));
  }
  CHECK(dev <= 1e-2);
  for (std::size_t k = 1; k < res.loss_trace.size(); ++k) {
    CHECK(res.loss_trace[k] <= res.loss_trace[k - 1] + 1e-9);
  }
}

TEST_CASE("transport fit recovers the 1-D gaussian monotone map") {
  Rng rng(69u);
  const auto labels = distinct_labels(rng, 2, 1);
  const AffineBijectionPair id = identity_pair(labels, 1);
  const double m0 = 0.2, s0 = 1.0, m1 = 1.4, s1 = 1.8;
  const DiscreteMeasure src = quantile_discretization(m0, s0, 24);
  const DiscreteMeasure dst = quantile_discretization(m1, s1, 24);
  LabeledDataset data;
  data.x.resize(48, 1);
  data.c.resize(48, 1);
  for (int i = 0; i < 24; ++i) {
    data.x(i, 0) = src.points(i, 0);
    data.c.row(i) = labels[0].transpose();
    data.x(24 + i, 0) = dst.points(i, 0);
    data.c.row(24 + i) = labels[1].transpose();
  }
  FitConfig cfg;
  cfg.lambda_transport = 0.1;
  cfg.lambda_match_data = 200.0;
  cfg.lambda_cycle = 5.0;
  cfg.max_iter = 10000;
  cfg.step_size = 0.02;
  const FitTransportResult res = fit_transport_map(id, data, cfg);

  // Closed-form monotone map between the gaussians on the central 95% range.
  double dev = 0.0;
  for (double x = m0 - 1.96 * s0; x <= m0 + 1.96 * s0; x += 0.05) {
    const double truth = m1 + (s1 / s0) * (x - m0);
    const double fitted =
        res.tmap.entry(0, 1).apply(Eigen::VectorXd::Constant(1, x))[0];
    dev = std::max(dev, std::abs(fitted - truth));
  }
  CHECK(dev <= 1e-2);

  // Theorem 6 oracle comparison: the fitted map cannot beat the exact map.
  ConditionalFamily fam = conditional_family_from_labeled(data);
  const TransportMap oracle = build_exact_transport_map(id, fam, 2.0);
  CHECK(theorem6_gap(res.tmap, oracle, id, fam, cfg) >= -1e-6);
}
