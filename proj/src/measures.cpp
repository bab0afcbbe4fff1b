#include "condgeo/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "condgeo/rng.hpp"

namespace condgeo {

const DiscreteMeasure& ConditionalFamily::discrete(std::size_t m) const {
  const auto* d = std::get_if<DiscreteMeasure>(&measures.at(m));
  if (d == nullptr) {
    throw Error(ErrorCode::DimensionMismatch,
                "family measure is not discrete at label index " +
                    std::to_string(m));
  }
  return *d;
}

const GaussianMeasure& ConditionalFamily::gaussian(std::size_t m) const {
  const auto* g = std::get_if<GaussianMeasure>(&measures.at(m));
  if (g == nullptr) {
    throw Error(ErrorCode::DimensionMismatch,
                "family measure is not Gaussian at label index " +
                    std::to_string(m));
  }
  return *g;
}

bool ConditionalFamily::all_discrete() const {
  return std::all_of(measures.begin(), measures.end(), [](const auto& v) {
    return std::holds_alternative<DiscreteMeasure>(v);
  });
}

std::size_t ConditionalFamily::index_of(const Eigen::VectorXd& c) const {
  for (std::size_t m = 0; m < labels.size(); ++m) {
    if (labels[m].size() == c.size() && labels[m] == c) return m;
  }
  throw Error(ErrorCode::UnknownLabel, "label not present in family");
}

void validate_discrete(const DiscreteMeasure& m) {
  if (m.points.rows() == 0) {
    throw Error(ErrorCode::EmptySupport, "measure has no atoms");
  }
  if (m.points.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "atom dimension must be >= 1");
  }
  if (m.weights.size() != m.points.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "weight count does not match atom count");
  }
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
    if (m.weights[i] < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "weight " + std::to_string(i) + " is negative");
    }
  }
  const double total = m.weights.sum();
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::WeightSum,
                "weights sum to " + std::to_string(total));
  }
}

void validate_gaussian(const GaussianMeasure& g, double psd_tol) {
  if (g.mean.size() < 1 || g.covariance.rows() != g.mean.size() ||
      g.covariance.cols() != g.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "covariance shape mismatch");
  }
  if ((g.covariance - g.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::NonPSD, "covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.covariance);
  if (es.eigenvalues().minCoeff() < -psd_tol) {
    throw Error(ErrorCode::NonPSD, "covariance has negative eigenvalue");
  }
}

void validate_family(const ConditionalFamily& fam) {
  if (fam.labels.empty()) {
    throw Error(ErrorCode::EmptySupport, "family has no labels");
  }
  if (fam.measures.size() != fam.labels.size() ||
      fam.label_weights.size() != static_cast<Eigen::Index>(fam.labels.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                "labels, measures, and label weights disagree in count");
  }
  for (std::size_t i = 0; i < fam.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < fam.labels.size(); ++j) {
      if (fam.labels[i].size() == fam.labels[j].size() &&
          fam.labels[i] == fam.labels[j]) {
        throw Error(ErrorCode::LabelMismatch, "labels are not distinct");
      }
    }
  }
  for (Eigen::Index i = 0; i < fam.label_weights.size(); ++i) {
    if (fam.label_weights[i] < 0.0) {
      throw Error(ErrorCode::NegativeWeight, "label weight is negative");
    }
  }
  if (std::abs(fam.label_weights.sum() - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::WeightSum, "label weights do not sum to 1");
  }
  Eigen::Index dim = -1;
  for (std::size_t m = 0; m < fam.measures.size(); ++m) {
    Eigen::Index d;
    if (const auto* dm = std::get_if<DiscreteMeasure>(&fam.measures[m])) {
      validate_discrete(*dm);
      d = dm->dim();
    } else {
      const auto& g = std::get<GaussianMeasure>(fam.measures[m]);
      validate_gaussian(g);
      d = g.dim();
    }
    if (dim < 0) dim = d;
    if (d != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "family measures have mixed data dimensions");
    }
  }
}

DiscreteMeasure empirical_from_samples(
    const Eigen::MatrixXd& points,
    const std::optional<Eigen::VectorXd>& weights) {
  if (points.rows() == 0) {
    throw Error(ErrorCode::EmptySupport, "no sample points given");
  }
  DiscreteMeasure m;
  m.points = points;
  if (weights.has_value()) {
    m.weights = *weights;
    validate_discrete(m);
    m.weights /= m.weights.sum();
  } else {
    m.weights = Eigen::VectorXd::Constant(points.rows(),
                                          1.0 / static_cast<double>(points.rows()));
  }
  return m;
}

DiscreteMeasure dirac(const Eigen::VectorXd& point) {
  DiscreteMeasure m;
  m.points = point.transpose();
  m.weights = Eigen::VectorXd::Ones(1);
  return m;
}

ConditionalFamily conditional_family_from_labeled(const LabeledDataset& data) {
  if (data.size() == 0) {
    throw Error(ErrorCode::EmptySupport, "dataset is empty");
  }
  if (data.c.rows() != data.x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "x and c row counts differ");
  }
  Eigen::VectorXd w;
  if (data.weights.has_value()) {
    w = *data.weights;
    if (w.size() != data.size()) {
      throw Error(ErrorCode::DimensionMismatch, "weight count mismatch");
    }
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w[i] < 0.0) throw Error(ErrorCode::NegativeWeight, "record weight");
    }
    if (std::abs(w.sum() - 1.0) > kWeightSumTol) {
      throw Error(ErrorCode::WeightSum, "record weights do not sum to 1");
    }
    w /= w.sum();
  } else {
    w = Eigen::VectorXd::Constant(data.size(), 1.0 / static_cast<double>(data.size()));
  }

  // Group rows by bitwise label equality, in order of first appearance.
  std::vector<Eigen::VectorXd> labels;
  std::vector<std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd ci = data.c.row(i).transpose();
    std::size_t g = labels.size();
    for (std::size_t m = 0; m < labels.size(); ++m) {
      if (labels[m] == ci) {
        g = m;
        break;
      }
    }
    if (g == labels.size()) {
      labels.push_back(ci);
      groups.emplace_back();
    }
    groups[g].push_back(i);
  }

  ConditionalFamily fam;
  fam.labels = std::move(labels);
  fam.label_weights.resize(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t m = 0; m < groups.size(); ++m) {
    const auto& idx = groups[m];
    double mass = 0.0;
    for (Eigen::Index i : idx) mass += w[i];
    fam.label_weights[static_cast<Eigen::Index>(m)] = mass;
    DiscreteMeasure dm;
    dm.points.resize(static_cast<Eigen::Index>(idx.size()), data.data_dim());
    dm.weights.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      dm.points.row(static_cast<Eigen::Index>(r)) = data.x.row(idx[r]);
      dm.weights[static_cast<Eigen::Index>(r)] = mass > 0.0 ? w[idx[r]] / mass : 0.0;
    }
    fam.measures.emplace_back(std::move(dm));
  }
  validate_family(fam);
  return fam;
}

DiscreteMeasure flatten_family(const ConditionalFamily& fam) {
  Eigen::Index total = 0;
  const Eigen::Index d = std::get<DiscreteMeasure>(fam.measures.at(0)).dim();
  const Eigen::Index k = fam.label_dim();
  for (std::size_t m = 0; m < fam.measures.size(); ++m) {
    total += fam.discrete(m).size();
  }
  DiscreteMeasure joint;
  joint.points.resize(total, d + k);
  joint.weights.resize(total);
  Eigen::Index r = 0;
  for (std::size_t m = 0; m < fam.measures.size(); ++m) {
    const DiscreteMeasure& dm = fam.discrete(m);
    for (Eigen::Index i = 0; i < dm.size(); ++i, ++r) {
      joint.points.row(r).head(d) = dm.points.row(i);
      joint.points.row(r).tail(k) = fam.labels[m].transpose();
      joint.weights[r] = fam.label_weights[static_cast<Eigen::Index>(m)] * dm.weights[i];
    }
  }
  return joint;
}

DiscreteMeasure mix_marginal(const ConditionalFamily& fam) {
  Eigen::Index total = 0;
  for (std::size_t m = 0; m < fam.measures.size(); ++m) total += fam.discrete(m).size();
  DiscreteMeasure mix;
  mix.points.resize(total, fam.discrete(0).dim());
  mix.weights.resize(total);
  Eigen::Index r = 0;
  for (std::size_t m = 0; m < fam.measures.size(); ++m) {
    const DiscreteMeasure& dm = fam.discrete(m);
    for (Eigen::Index i = 0; i < dm.size(); ++i, ++r) {
      mix.points.row(r) = dm.points.row(i);
      mix.weights[r] = fam.label_weights[static_cast<Eigen::Index>(m)] * dm.weights[i];
    }
  }
  return mix;
}

LabeledDataset labeled_from_family(const ConditionalFamily& fam) {
  const DiscreteMeasure joint = flatten_family(fam);
  const Eigen::Index k = fam.label_dim();
  const Eigen::Index d = joint.dim() - k;
  LabeledDataset data;
  data.x = joint.points.leftCols(d);
  data.c = joint.points.rightCols(k);
  data.weights = joint.weights;
  return data;
}

namespace {

// Collapses coincident atoms (within tol in max norm) by summing weights;
// rows come back in lexicographic order.
std::vector<std::pair<Eigen::VectorXd, double>> merged_atoms(
    const DiscreteMeasure& m, double tol) {
  std::vector<std::pair<Eigen::VectorXd, double>> out;
  std::vector<Eigen::Index> order(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m.dim(); ++j) {
      if (m.points(a, j) != m.points(b, j)) return m.points(a, j) < m.points(b, j);
    }
    return false;
  });
  for (Eigen::Index idx : order) {
    if (!out.empty() &&
        (out.back().first - m.atom(idx)).cwiseAbs().maxCoeff() <= tol) {
      out.back().second += m.weights[idx];
    } else {
      out.emplace_back(m.atom(idx), m.weights[idx]);
    }
  }
  return out;
}

}  // namespace

bool same_atoms(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const auto ma = merged_atoms(a, tol);
  const auto mb = merged_atoms(b, tol);
  if (ma.size() != mb.size()) return false;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if ((ma[i].first - mb[i].first).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(ma[i].second - mb[i].second) > tol) return false;
  }
  return true;
}

DiscreteMeasure quantile_discretization(double mean, double stddev, int n) {
  if (n < 1) throw Error(ErrorCode::EmptySupport, "need at least one atom");
  DiscreteMeasure m;
  m.points.resize(n, 1);
  m.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    m.points(i, 0) = mean + stddev * normal_quantile(p);
  }
  return m;
}

}  // namespace condgeo
