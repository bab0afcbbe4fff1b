// Acceptance runner: one line per criterion, nonzero exit on any failure.
// Each criterion pins its tolerance in code and reports the worst observed
// value against it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "condgeo/conditional.hpp"
#include "condgeo/csv.hpp"
#include "condgeo/fit.hpp"
#include "condgeo/geodesics.hpp"
#include "condgeo/measures.hpp"
#include "condgeo/ot.hpp"
#include "condgeo/pipeline.hpp"
#include "condgeo/rng.hpp"
#include "condgeo/scenario.hpp"
#include "condgeo/serialize.hpp"
#include "condgeo/synthetic.hpp"
#include "condgeo/verify_suite.hpp"
#include "oracles.hpp"

using namespace condgeo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string name)
      : number_(number), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}

  void worst(double observed) { worst_ = std::max(worst_, observed); }
  void require(bool ok) {
    if (!ok) hard_fail_ = true;
  }

  void finish(double tolerance) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    const bool pass = !hard_fail_ && worst_ <= tolerance;
    if (!pass) ++g_failures;
    std::printf("[%2d] %-58s %s  (worst %.3e, tol %.1e, %.1fs)\n", number_,
                name_.c_str(), pass ? "PASS" : "FAIL", worst_, tolerance,
                seconds);
    std::fflush(stdout);
  }

 private:
  int number_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
  double worst_ = 0.0;
  bool hard_fail_ = false;
};

// ---------------------------------------------------------------------------
// 1. Exact OT equals brute-force vertex enumeration.

void criterion1() {
  Criterion c(1, "exact OT cost equals permutation enumeration (50 instances)");
  Rng rng(101u);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform01() * 6);  // up to 8 atoms
    const int d = 1 + static_cast<int>(rng.uniform01() * 3);
    const DiscreteMeasure mu = random_measure(rng, n, d);
    const DiscreteMeasure nu = random_measure(rng, n, d);
    const MetricSpec metric = euclidean_metric(2.0);
    const double brute =
        oracles::assignment_enumeration(pairwise_costs(mu, nu, metric));
    const double solved = exact_coupling(mu, nu, metric).cost;
    c.worst(std::abs(solved - brute));
  }
  c.finish(1e-9);
}

// ---------------------------------------------------------------------------
// 2. Theorem 1 / Theorem 2 equality chain.

void criterion2() {
  Criterion c(2, "thm1/thm2: expected = sub-coupling = encoder LP (30 instances)");
  Rng rng(102u);
  const MetricSpec w2 = euclidean_metric(2.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int L = 2 + rep % 2;               // up to 3 labels
    const int nx = 3 + rep % 4;              // up to 6 atoms
    const ConditionalFamily famX = random_family(rng, L, nx, 2);
    ConditionalFamily famZ = famX;
    std::vector<Eigen::MatrixXd> gen_points;
    ConditionalFamily generated = famX;
    for (int m = 0; m < L; ++m) {
      famZ.measures[m] = random_measure(rng, 3 + (rep + m) % 4, 2);
      Eigen::MatrixXd gen(famZ.discrete(m).size(), 2);
      for (Eigen::Index i = 0; i < gen.rows(); ++i) {
        gen(i, 0) = rng.normal();
        gen(i, 1) = rng.normal();
      }
      gen_points.push_back(gen);
      DiscreteMeasure g;
      g.points = gen;
      g.weights = famZ.discrete(m).weights;
      generated.measures[m] = std::move(g);
    }
    const double ecw = expected_conditional_wasserstein(famX, generated, w2);
    const double sub = subcoupling_cost(famX, generated, w2).value;
    const double lp = encoder_lp_cost(famX, famZ, gen_points, w2).value;
    c.worst(std::abs(ecw - sub));
    c.worst(std::abs(sub - lp));
  }
  c.finish(1e-7);
}

// ---------------------------------------------------------------------------
// 3. Example 1 / Proposition 2 grid agreement.

void criterion3() {
  Criterion c(3, "example1/prop2 agree on the 21^3 correlation grid");
  const int grid = 21;
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      for (int r = 0; r < grid; ++r) {
        const double rho_xc = -1.0 + 2.0 * a / (grid - 1);
        const double rho_yc = -1.0 + 2.0 * b / (grid - 1);
        const double rho = -1.0 + 2.0 * r / (grid - 1);
        GaussianJointSpec spec;
        spec.sigma_xx = spec.sigma_yy = spec.sigma_cc =
            Eigen::MatrixXd::Identity(1, 1);
        spec.sigma_pi = Eigen::MatrixXd::Constant(1, 1, rho);
        spec.sigma_xc = Eigen::MatrixXd::Constant(1, 1, rho_xc);
        spec.sigma_yc = Eigen::MatrixXd::Constant(1, 1, rho_yc);
        const bool member = gaussian_subcoupling_member(spec, 1e-9);
        const bool formula = std::abs(rho - rho_xc * rho_yc) <=
                             example1_threshold(rho_xc, rho_yc) + 1e-9;
        c.worst(member == formula ? 0.0 : 1.0);
      }
    }
  }
  c.finish(0.5);
}

// ---------------------------------------------------------------------------
// 4. Theorem 3 constant speed plus the mixture counterexample.

DiscreteMeasure with_label(const DiscreteMeasure& m, const Eigen::VectorXd& c) {
  DiscreteMeasure joined;
  joined.points.resize(m.size(), m.dim() + c.size());
  joined.weights = m.weights;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    joined.points.row(i).head(m.dim()) = m.points.row(i);
    joined.points.row(i).tail(c.size()) = c.transpose();
  }
  return joined;
}

void criterion4() {
  Criterion c(4, "thm3: generated curves are constant speed (20 instances)");
  Rng rng(104u);
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  const int sizes[3] = {4, 8, 16};
  for (int rep = 0; rep < 20; ++rep) {
    const int n = sizes[rep % 3];
    const int d = 1 + rep % 3;
    const SyntheticPipeline sp = generic_pipeline(rng, 2, n, d);
    const Pipeline& pl = sp.pipeline;
    const Eigen::VectorXd c0 = pl.family.labels[0];
    const Eigen::VectorXd c1 = pl.family.labels[1];
    GeodesicCurve curve;
    curve.metric = encoder_segment_metric(pl, c0, c1);
    curve.sampler = [&pl, &c0, &c1](double t) {
      const GenerationResult g =
          geodesic_generate(pl, c0, c1, t, GenerationMode::exact_pushforward);
      return with_label(g.samples, g.label);
    };
    curve.start = curve.sampler(0.0);
    curve.end = curve.sampler(1.0);
    const SpeedReport report = verify_constant_speed(curve, grid, 1e-6);
    c.worst(report.max_abs_deviation);
  }

  // Counterexample: the mixture curve between two point masses misses
  // constant speed by at least 0.2.
  DiscreteMeasure m0 = empirical_from_samples(Eigen::MatrixXd::Zero(1, 1));
  DiscreteMeasure m1 = empirical_from_samples(Eigen::MatrixXd::Ones(1, 1));
  GeodesicCurve mixture;
  mixture.metric = euclidean_metric(2.0);
  mixture.sampler = [&](double t) {
    if (t == 0.0) return m0;
    if (t == 1.0) return m1;
    DiscreteMeasure mix;
    mix.points.resize(2, 1);
    mix.points << 0.0, 1.0;
    mix.weights.resize(2);
    mix.weights << 1.0 - t, t;
    return mix;
  };
  mixture.start = m0;
  mixture.end = m1;
  const SpeedReport bad = verify_constant_speed(mixture, grid, 1e-6);
  c.require(!bad.pass && bad.max_abs_deviation >= 0.2);
  c.finish(1e-6);
}

// ---------------------------------------------------------------------------
// 5. Lemma 2 decomposition and barycenter attainment.

void criterion5() {
  Criterion c(5, "lemma2: total = variance + label term; barycenter attains it");
  Rng rng(105u);
  for (int rep = 0; rep < 20; ++rep) {
    const int M = 2 + rep % 2;
    std::vector<DiscreteMeasure> latents;
    for (int m = 0; m < M; ++m) {
      latents.push_back(random_measure(rng, 3 + rep % 2, 2, 1.5, rep % 2 == 0));
    }
    Eigen::VectorXd alphas(M);
    for (int m = 0; m < M; ++m) alphas[m] = 0.2 + rng.uniform01();
    alphas /= alphas.sum();
    const auto labels = distinct_labels(rng, M, 1);
    const BarycenterWeights bw = make_barycenter_weights(labels, alphas);
    const Lemma2Decomposition dec = lemma2_decomposition(latents, bw);
    c.worst(std::abs(dec.total - dec.variance_term - dec.label_term));

    const DiscreteMeasure bar = barycenter_multimarginal(latents, alphas);
    double attained = 0.0;
    for (int m = 0; m < M; ++m) {
      attained +=
          alphas[m] * exact_coupling(bar, latents[m], euclidean_metric(2.0)).cost;
    }
    c.worst(std::abs(attained - dec.variance_term));
  }
  c.finish(1e-8);
}

// ---------------------------------------------------------------------------
// 6. Theorem 4 chain, A4 collapse, and the barycenter match of Algorithm 1.

void criterion6() {
  Criterion c(6, "thm4: 0 <= gap <= bound; A4 collapse; alg1 matches barycenter");
  Rng rng(106u);
  for (int rep = 0; rep < 20; ++rep) {
    const int L = 2 + rep % 2;
    const SyntheticPipeline sp = generic_pipeline(rng, L, 3 + rep % 2, 1);
    Eigen::VectorXd alphas(L);
    for (int m = 0; m < L; ++m) alphas[m] = 0.2 + rng.uniform01();
    alphas /= alphas.sum();
    const BarycenterWeights bw =
        make_barycenter_weights(sp.pipeline.family.labels, alphas);
    const Theorem4Report r = theorem4_bound(sp.pipeline, bw);
    c.worst(-r.gap);
    c.worst(r.gap - r.upper_bound);
  }

  for (int rep = 0; rep < 10; ++rep) {
    const bool shared = rep % 2 == 0;
    const SyntheticPipeline sp = homogeneous_pipeline(rng, 3, 4, 1 + rep % 2, shared);
    Eigen::VectorXd alphas(3);
    alphas << 0.25, 0.5, 0.25;
    const BarycenterWeights bw =
        make_barycenter_weights(sp.pipeline.family.labels, alphas);
    const Theorem4Report r = theorem4_bound(sp.pipeline, bw);
    c.worst(r.upper_bound);
    c.worst(std::abs(r.gap));

    if (shared) {
      // Shared-linear homogeneous pipelines keep the output barycenter
      // Euclidean: exact mode must match the multimarginal barycenter.
      const GenerationResult out =
          algorithm1_generate(sp.pipeline, bw, GenerationMode::exact_pushforward);
      std::vector<DiscreteMeasure> ms;
      for (int m = 0; m < 3; ++m) ms.push_back(sp.pipeline.family.discrete(m));
      const DiscreteMeasure bar = barycenter_multimarginal(ms, alphas);
      c.worst(wasserstein_p(out.samples, bar, euclidean_metric(2.0)));
    }
  }

  // Gaussian pipelines: closed-form output vs the Bures fixed point, then the
  // sampling mode against common-random-number reference draws.
  for (int rep = 0; rep < 3; ++rep) {
    const SyntheticPipeline sp = homogeneous_gaussian_pipeline(rng, 2, 1);
    const Pipeline& pl = sp.pipeline;
    Eigen::VectorXd half(2);
    half << 0.5, 0.5;
    const BarycenterWeights bw = make_barycenter_weights(pl.family.labels, half);
    std::vector<GaussianMeasure> gs = {pl.family.gaussian(0), pl.family.gaussian(1)};
    const GaussianMeasure bar = gaussian_barycenter(gs, half);
    c.worst(gaussian_w2(algorithm1_generate_gaussian(pl, bw), bar));
  }
  c.finish(1e-6);

  Criterion cs(6, "thm4: alg1 sampling mode matches the barycenter (n = 4096)");
  for (int rep = 0; rep < 3; ++rep) {
    const SyntheticPipeline sp = homogeneous_gaussian_pipeline(rng, 2, 1);
    const Pipeline& pl = sp.pipeline;
    Eigen::VectorXd half(2);
    half << 0.5, 0.5;
    const BarycenterWeights bw = make_barycenter_weights(pl.family.labels, half);
    const int n = 4096;
    const std::uint64_t seed = 424242u + rep;
    const GenerationResult out =
        algorithm1_generate(pl, bw, GenerationMode::sampling, n, seed);

    std::vector<GaussianMeasure> gs = {pl.family.gaussian(0), pl.family.gaussian(1)};
    const GaussianMeasure bar = gaussian_barycenter(gs, half);
    const GaussianMeasure latent = pl.pair.encode_measure(pl.family.gaussian(0), 0);
    Rng ref_rng(seed);
    DiscreteMeasure ref;
    ref.points.resize(n, 1);
    ref.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    const double latent_sd = std::sqrt(latent.covariance(0, 0));
    const double bar_sd = std::sqrt(bar.covariance(0, 0));
    for (int i = 0; i < n; ++i) {
      const double z = latent.mean[0] + latent_sd * ref_rng.normal();
      ref.points(i, 0) = bar.mean[0] + bar_sd * (z - latent.mean[0]) / latent_sd;
    }
    cs.worst(wasserstein_p(out.samples, ref, euclidean_metric(2.0)));
  }
  cs.finish(1e-3);
}

// ---------------------------------------------------------------------------
// 7. Theorem 5 exact reproduction and the violated instance.

void criterion7() {
  Criterion c(7, "thm5: exact reproduction at cbar; violation is detected");
  Rng rng(107u);
  for (int rep = 0; rep < 10; ++rep) {
    const int L = 2 + rep % 2;
    const SyntheticPipeline sp = homogeneous_pipeline(rng, L, 4 + rep % 3, 1, false);
    Eigen::VectorXd alphas(L);
    for (int m = 0; m < L; ++m) alphas[m] = 1.0 + rng.uniform01();
    alphas /= alphas.sum();
    const BarycenterWeights bw =
        make_barycenter_weights(sp.pipeline.family.labels, alphas);
    c.worst(theorem5_check(sp.pipeline, sp.prior, bw,
                           GenerationMode::exact_pushforward));
  }

  const SyntheticPipeline bad = shifted_latent_pipeline(rng, 2, 5, 1, 1.0);
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  const BarycenterWeights bw =
      make_barycenter_weights(bad.pipeline.family.labels, half);
  const double disc = theorem5_check(bad.pipeline, bad.prior, bw,
                                     GenerationMode::exact_pushforward);
  c.require(disc >= 0.1);
  c.finish(1e-8);
}

// ---------------------------------------------------------------------------
// 8. Theorem 6 / Corollary 1 gap checks.

void criterion8() {
  Criterion c(8, "thm6/cor1: oracle self-gap 0, perturbation gaps >= -1e-6");
  Rng rng(108u);
  FitConfig cfg;
  cfg.lambda_transport = 1.0;
  cfg.lambda_match_data = 100.0;
  cfg.lambda_cycle = 5.0;

  for (int rep = 0; rep < 3; ++rep) {
    const SyntheticPipeline sp = generic_pipeline(rng, 2, 4, 1);
    const Pipeline& pl = sp.pipeline;
    c.worst(std::abs(theorem6_gap(pl.tmap, pl.tmap, pl.pair, pl.family, cfg)));
    for (int trial = 0; trial < 50; ++trial) {
      TransportMap perturbed = pl.tmap;
      for (auto& entry : perturbed.entries) {
        for (Eigen::Index i = 0; i < entry.images.rows(); ++i) {
          entry.images(i, 0) += 0.6 * (rng.uniform01() - 0.5);
        }
      }
      c.worst(-theorem6_gap(perturbed, pl.tmap, pl.pair, pl.family, cfg));
    }
  }

  // Corollary 1 setting: identity encoder, two labels.
  const auto labels = distinct_labels(rng, 2, 1);
  std::vector<Eigen::MatrixXd> lin(2, Eigen::MatrixXd::Identity(1, 1));
  std::vector<Eigen::VectorXd> off(2, Eigen::VectorXd::Zero(1));
  const AffineBijectionPair id(labels, lin, off);
  ConditionalFamily fam;
  fam.labels = labels;
  fam.label_weights = Eigen::VectorXd::Constant(2, 0.5);
  fam.measures = {random_measure(rng, 5, 1), random_measure(rng, 5, 1)};
  const TransportMap oracle = build_exact_transport_map(id, fam, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    TransportMap perturbed = oracle;
    for (auto& entry : perturbed.entries) {
      for (Eigen::Index i = 0; i < entry.images.rows(); ++i) {
        entry.images(i, 0) += 0.5 * (rng.uniform01() - 0.5);
      }
    }
    c.worst(-theorem6_gap(perturbed, oracle, id, fam, cfg));
  }
  c.finish(1e-6);
}

// ---------------------------------------------------------------------------
// 9. Fitting recovery.

void criterion9() {
  Criterion ca(9, "fit: plant-and-recover autoencoder reconstruction error");
  for (const int d : {1, 2}) {
    Rng rng(109u + d);
    const auto labels = distinct_labels(rng, 2, 1);
    const AffineBijectionPair truth = random_affine_pair(rng, labels, d);
    const DiscreteMeasure prior = random_measure(rng, 8, d, 1.5);
    LabeledDataset data;
    const Eigen::Index n = prior.size();
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
    cfg.max_iter = 5000;
    cfg.step_size = 0.25;
    const FitAutoencoderResult res = fit_autoencoder(data, prior, cfg);
    const ConditionalFamily fam = conditional_family_from_labeled(data);
    double recon = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
      const DiscreteMeasure& dm = fam.discrete(m);
      const std::size_t pm = res.pair.index_of(fam.labels[m]);
      for (Eigen::Index i = 0; i < dm.size(); ++i) {
        const Eigen::VectorXd x = dm.atom(i);
        recon = std::max(
            recon,
            std::pow((res.pair.generate(res.pair.encode(x, pm), pm) - x).norm(),
                     2.0));
      }
    }
    ca.worst(recon);
  }
  ca.finish(1e-6);

  Criterion c(9, "fit: 1-D gaussian transport map within sup-deviation 1e-2");
  {
    Rng rng(119u);
    const auto labels = distinct_labels(rng, 2, 1);
    std::vector<Eigen::MatrixXd> lin(2, Eigen::MatrixXd::Identity(1, 1));
    std::vector<Eigen::VectorXd> off(2, Eigen::VectorXd::Zero(1));
    const AffineBijectionPair id(labels, lin, off);
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
    double dev = 0.0;
    for (double x = m0 - 1.96 * s0; x <= m0 + 1.96 * s0; x += 0.05) {
      const double fitted =
          res.tmap.entry(0, 1).apply(Eigen::VectorXd::Constant(1, x))[0];
      dev = std::max(dev, std::abs(fitted - (m1 + (s1 / s0) * (x - m0))));
    }
    c.worst(dev);

    // The recorded trace must never rise.
    for (std::size_t k = 1; k < res.loss_trace.size(); ++k) {
      c.require(res.loss_trace[k] <= res.loss_trace[k - 1] + 1e-9);
    }
  }
  c.finish(1e-2);
}

// ---------------------------------------------------------------------------
// 10. Closed-form oracles and identities.

void criterion10() {
  Criterion c(10, "oracles: 1-D gaussian closed forms and lemma1 isometry");
  const auto g1d = [](double mean, double var) {
    GaussianMeasure g;
    g.mean = Eigen::VectorXd::Constant(1, mean);
    g.covariance = Eigen::MatrixXd::Constant(1, 1, var);
    return g;
  };

  c.worst(std::abs(gaussian_w2(g1d(0.0, 1.44), g1d(0.0, 0.25)) - 0.7));
  c.worst(std::abs(
      gaussian_geodesic(g1d(0.0, 1.0), g1d(0.0, 9.0), 0.5).covariance(0, 0) - 4.0));
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  c.worst(std::abs(std::sqrt(gaussian_barycenter({g1d(0.0, 1.0), g1d(0.0, 9.0)},
                                                 half)
                                 .covariance(0, 0)) -
                   2.0));

  Rng rng(110u);
  Criterion cv(10, "oracles: pairwise/centered variance identity (200 draws)");
  for (int rep = 0; rep < 200; ++rep) {
    const int M = 2 + static_cast<int>(rng.uniform01() * 4);
    const int d = 1 + static_cast<int>(rng.uniform01() * 3);
    std::vector<Eigen::VectorXd> a(M);
    Eigen::VectorXd alphas(M);
    for (int m = 0; m < M; ++m) {
      a[m].resize(d);
      for (int j = 0; j < d; ++j) a[m][j] = 4.0 * rng.normal();
      alphas[m] = 0.05 + rng.uniform01();
    }
    alphas /= alphas.sum();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (int m = 0; m < M; ++m) mean += alphas[m] * a[m];
    double pairwise = 0.0, centered = 0.0;
    for (int m = 0; m < M; ++m) {
      centered += alphas[m] * (a[m] - mean).squaredNorm();
      for (int mp = 0; mp < M; ++mp) {
        pairwise += 0.5 * alphas[m] * alphas[mp] * (a[m] - a[mp]).squaredNorm();
      }
    }
    cv.worst(std::abs(pairwise - centered));
  }
  cv.finish(1e-12);

  for (int rep = 0; rep < 20; ++rep) {
    const SyntheticPipeline sp = generic_pipeline(rng, 2, 4, 2);
    const Pipeline& pl = sp.pipeline;
    const Eigen::VectorXd c0 = pl.family.labels[0];
    const Eigen::VectorXd c1 = pl.family.labels[1];
    const DiscreteMeasure& f0 = pl.family.discrete(0);
    const DiscreteMeasure& f1 = pl.family.discrete(1);
    Eigen::MatrixXd costs(f0.size(), f1.size());
    for (Eigen::Index i = 0; i < f0.size(); ++i) {
      for (Eigen::Index j = 0; j < f1.size(); ++j) {
        const double dd = d_enc(pl.pair, f0.atom(i), c0, f1.atom(j), c1, 1.0);
        costs(i, j) = dd * dd;
      }
    }
    const double lhs = std::sqrt(exact_coupling_from_costs(f0, f1, costs).cost);
    const auto encs = encoded_families(pl);
    const double rhs = wasserstein_p(with_label(encs[0], c0),
                                     with_label(encs[1], c1),
                                     euclidean_metric(2.0));
    c.worst(std::abs(lhs - rhs));
  }
  c.finish(1e-9);
}

// ---------------------------------------------------------------------------
// 11. CLI determinism and the verify gate.

void criterion11() {
  Criterion c(11, "cli: byte-identical reruns on bundled scenarios; verify ok");
  fs::path scenarios;
  if (const char* env = std::getenv("CONDGEO_SCENARIO_DIR")) {
    scenarios = env;
  } else {
    scenarios = fs::path(__FILE__).parent_path().parent_path() / "scenarios";
  }
  const fs::path base = fs::temp_directory_path() / "condgeo_acceptance_cli";
  fs::remove_all(base);
  fs::create_directories(base);
  int idx = 0;
  for (const char* name :
       {"ot_two_atoms.json", "geodesic_shift.json", "barycenter_pair.json",
        "conditional_labeled.json", "pipeline_generic.json"}) {
    std::string payload[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = base / (std::to_string(idx) + "_" + std::to_string(run));
      run_scenario_file((scenarios / name).string(), out.string(), {});
      std::ifstream in(out / "report.json");
      nlohmann::json j;
      in >> j;
      payload[run] = j.at("results").dump();
    }
    c.require(!payload[0].empty() && payload[0] == payload[1]);
    ++idx;
  }

  const VerifySummary summary = run_verify_suite("");
  for (const auto& check : summary.checks) {
    if (!check.pass) {
      std::printf("     verify failure: %s (observed %.3e, tol %.3e)\n",
                  check.name.c_str(), check.observed, check.tolerance);
    }
  }
  c.require(summary.all_pass);
  fs::remove_all(base);
  c.finish(0.5);
}

}  // namespace

int main() {
  std::printf("acceptance criteria\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
