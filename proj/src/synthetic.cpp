#include "condgeo/synthetic.hpp"

#include <cmath>

namespace condgeo {

DiscreteMeasure random_measure(Rng& rng, int n, int d, double scale,
                               bool uniform_weights) {
  DiscreteMeasure m;
  m.points.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      m.points(i, j) = scale * (2.0 * rng.uniform01() - 1.0);
    }
  }
  if (uniform_weights) {
    m.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  } else {
    m.weights.resize(n);
    for (int i = 0; i < n; ++i) m.weights[i] = 0.1 + rng.uniform01();
    m.weights /= m.weights.sum();
  }
  return m;
}

std::vector<Eigen::VectorXd> distinct_labels(Rng& rng, int num_labels, int k) {
  std::vector<Eigen::VectorXd> labels;
  while (static_cast<int>(labels.size()) < num_labels) {
    Eigen::VectorXd c(k);
    for (int j = 0; j < k; ++j) {
      // Quarter-integer grid keeps combinations representable exactly.
      c[j] = std::round(8.0 * (2.0 * rng.uniform01() - 1.0)) / 4.0;
    }
    bool fresh = true;
    for (const auto& other : labels) {
      if (other == c) fresh = false;
    }
    if (fresh) labels.push_back(c);
  }
  return labels;
}

ConditionalFamily random_family(Rng& rng, int num_labels, int n, int d, int k,
                                double scale, bool uniform_weights) {
  ConditionalFamily fam;
  fam.labels = distinct_labels(rng, num_labels, k);
  for (int m = 0; m < num_labels; ++m) {
    fam.measures.emplace_back(random_measure(rng, n, d, scale, uniform_weights));
  }
  fam.label_weights.resize(num_labels);
  for (int m = 0; m < num_labels; ++m) fam.label_weights[m] = 0.2 + rng.uniform01();
  fam.label_weights /= fam.label_weights.sum();
  validate_family(fam);
  return fam;
}

AffineBijectionPair random_affine_pair(
    Rng& rng, const std::vector<Eigen::VectorXd>& labels, int d) {
  std::vector<Eigen::MatrixXd> linear;
  std::vector<Eigen::VectorXd> offset;
  for (std::size_t m = 0; m < labels.size(); ++m) {
    Eigen::MatrixXd a;
    while (true) {
      a.setZero(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = 0.6 * (2.0 * rng.uniform01() - 1.0);
        a(i, i) += 1.0 + rng.uniform01();  // diagonally dominant, invertible
      }
      if (std::abs(a.determinant()) > 1e-6) break;
    }
    Eigen::VectorXd b(d);
    for (int i = 0; i < d; ++i) b[i] = 2.0 * rng.uniform01() - 1.0;
    linear.push_back(a);
    offset.push_back(b);
  }
  return AffineBijectionPair(labels, linear, offset);
}

namespace {

SyntheticPipeline assemble(AffineBijectionPair pair,
                           std::vector<DiscreteMeasure> latents,
                           DiscreteMeasure prior, Rng& rng) {
  const std::size_t L = pair.num_labels();
  ConditionalFamily fam;
  fam.labels = pair.labels();
  fam.label_weights.resize(static_cast<Eigen::Index>(L));
  for (std::size_t m = 0; m < L; ++m) {
    DiscreteMeasure data;
    data.points.resize(latents[m].size(), latents[m].dim());
    data.weights = latents[m].weights;
    for (Eigen::Index i = 0; i < latents[m].size(); ++i) {
      data.points.row(i) = pair.generate(latents[m].atom(i), m).transpose();
    }
    fam.measures.emplace_back(std::move(data));
    fam.label_weights[static_cast<Eigen::Index>(m)] = 0.5 + rng.uniform01();
  }
  fam.label_weights /= fam.label_weights.sum();
  validate_family(fam);

  SyntheticPipeline sp;
  sp.pipeline.tmap = build_exact_transport_map(pair, fam, 2.0);
  sp.pipeline.pair = std::move(pair);
  sp.pipeline.family = std::move(fam);
  sp.prior = std::move(prior);
  return sp;
}

}  // namespace

SyntheticPipeline generic_pipeline(Rng& rng, int num_labels, int n, int d) {
  const auto labels = distinct_labels(rng, num_labels, 1);
  AffineBijectionPair pair = random_affine_pair(rng, labels, d);
  std::vector<DiscreteMeasure> latents;
  for (int m = 0; m < num_labels; ++m) {
    latents.push_back(random_measure(rng, n, d, 1.5));
  }
  DiscreteMeasure prior = latents.front();
  return assemble(std::move(pair), std::move(latents), std::move(prior), rng);
}

SyntheticPipeline homogeneous_pipeline(Rng& rng, int num_labels, int n, int d,
                                       bool shared_linear) {
  const auto labels = distinct_labels(rng, num_labels, 1);
  AffineBijectionPair pair = random_affine_pair(rng, labels, d);
  if (shared_linear) {
    std::vector<Eigen::MatrixXd> linear(labels.size(), pair.linear(0));
    std::vector<Eigen::VectorXd> offset;
    for (std::size_t m = 0; m < labels.size(); ++m) offset.push_back(pair.offset(m));
    pair = AffineBijectionPair(labels, linear, offset);
  }
  const DiscreteMeasure prior = random_measure(rng, n, d, 1.5);
  std::vector<DiscreteMeasure> latents(static_cast<std::size_t>(num_labels), prior);
  return assemble(std::move(pair), std::move(latents), prior, rng);
}

SyntheticPipeline shifted_latent_pipeline(Rng& rng, int num_labels, int n,
                                          int d, double shift) {
  const auto labels = distinct_labels(rng, num_labels, 1);
  AffineBijectionPair pair = random_affine_pair(rng, labels, d);
  const DiscreteMeasure prior = random_measure(rng, n, d, 1.5);
  std::vector<DiscreteMeasure> latents;
  for (int m = 0; m < num_labels; ++m) {
    DiscreteMeasure shifted = prior;
    shifted.points.array() += shift * m;
    latents.push_back(std::move(shifted));
  }
  return assemble(std::move(pair), std::move(latents), prior, rng);
}

SyntheticPipeline homogeneous_gaussian_pipeline(Rng& rng, int num_labels, int d) {
  const auto labels = distinct_labels(rng, num_labels, 1);
  std::vector<Eigen::MatrixXd> linear;
  std::vector<Eigen::VectorXd> offset;
  const double a = 0.5 + rng.uniform01();  // one positive scale for all labels
  for (int m = 0; m < num_labels; ++m) {
    linear.push_back(a * Eigen::MatrixXd::Identity(d, d));
    Eigen::VectorXd b(d);
    for (int i = 0; i < d; ++i) b[i] = 2.0 * rng.uniform01() - 1.0;
    offset.push_back(b);
  }
  AffineBijectionPair pair(labels, linear, offset);

  GaussianMeasure prior;
  prior.mean = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) prior.mean[i] = rng.uniform01() - 0.5;
  Eigen::MatrixXd half = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) half(i, i) = 0.5 + rng.uniform01();
  prior.covariance = half * half.transpose();

  ConditionalFamily fam;
  fam.labels = labels;
  fam.label_weights = Eigen::VectorXd::Constant(num_labels, 1.0 / num_labels);
  for (int m = 0; m < num_labels; ++m) {
    GaussianMeasure g;
    const Eigen::MatrixXd inv = pair.linear(m).inverse();
    g.mean = inv * (prior.mean - pair.offset(m));
    g.covariance = inv * prior.covariance * inv.transpose();
    fam.measures.emplace_back(std::move(g));
  }

  SyntheticPipeline sp;
  sp.pipeline.tmap = build_exact_transport_map(pair, fam, 2.0);
  sp.pipeline.pair = std::move(pair);
  sp.pipeline.family = std::move(fam);
  return sp;
}

}  // namespace condgeo
