#include "condgeo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "condgeo/kernels.hpp"
#include "condgeo/rng.hpp"

namespace condgeo {

void FitConfig::check() const {
  if (lambda_transport < 0 || lambda_match_latent < 0 || lambda_recon_latent < 0 ||
      lambda_match_data < 0 || lambda_cycle < 0) {
    throw Error(ErrorCode::OutOfRange, "loss coefficients must be nonnegative");
  }
  if (max_iter < 1) throw Error(ErrorCode::OutOfRange, "iteration budget >= 1");
  if (!(p >= 1.0 && p <= 4.0)) {
    throw Error(ErrorCode::OutOfRange, "order p must lie in [1, 4]");
  }
  if (eps_label < 0) throw Error(ErrorCode::OutOfRange, "eps_label must be >= 0");
}

namespace {

double energy_distance_sq(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const double ab = kernels::pairwise_norm_sum(a.points, a.weights, b.points, b.weights);
  const double aa = kernels::pairwise_norm_sum(a.points, a.weights, a.points, a.weights);
  const double bb = kernels::pairwise_norm_sum(b.points, b.weights, b.points, b.weights);
  return std::max(2.0 * ab - aa - bb, 0.0);
}

// Exact 1-D W2^2 between projected weighted atom sets.
double projected_w2_sq(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const Eigen::VectorXd& dir) {
  DiscreteMeasure pa, pb;
  pa.points = a.points * dir;
  pa.weights = a.weights;
  pb.points = b.points * dir;
  pb.weights = b.weights;
  return exact_coupling(pa, pb, euclidean_metric(2.0)).cost;
}

double sliced_wasserstein_sq(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             int projections) {
  const Eigen::Index d = a.dim();
  if (d == 1) return projected_w2_sq(a, b, Eigen::VectorXd::Ones(1));
  Rng rng(0x5157u);  // fixed projection set shared by every call
  double total = 0.0;
  for (int k = 0; k < projections; ++k) {
    Eigen::VectorXd dir(d);
    for (Eigen::Index j = 0; j < d; ++j) dir[j] = rng.normal();
    dir.normalize();
    total += projected_w2_sq(a, b, dir);
  }
  return total / projections;
}

double sinkhorn_divergence(const DiscreteMeasure& a, const DiscreteMeasure& b,
                           double eps) {
  const MetricSpec m = euclidean_metric(2.0);
  const double ab = sinkhorn_coupling(a, b, m, eps, 2000, 1e-9).cost;
  const double aa = sinkhorn_coupling(a, a, m, eps, 2000, 1e-9).cost;
  const double bb = sinkhorn_coupling(b, b, m, eps, 2000, 1e-9).cost;
  return std::max(ab - 0.5 * (aa + bb), 0.0);
}

// Shared fixed-step gradient descent with central differences and step
// halving; only decreasing steps are accepted so the trace never rises.
struct GdResult {
  std::vector<double> params;
  std::vector<double> trace;
  bool stationary = false;
};

GdResult minimize_fd(std::vector<double> params,
                     const std::function<double(const std::vector<double>&)>& loss,
                     const FitConfig& cfg) {
  const std::size_t P = params.size();
  GdResult res;
  double current = loss(params);
  res.trace.push_back(current);
  double step = cfg.step_size;
  double window_value = current;

  std::vector<double> grad(P), candidate(P);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (it % 100 == 0) {
      // Plateau stop: negligible progress over the last window.
      if (window_value - current <= 1e-12 * (1.0 + std::abs(current))) {
        res.stationary = true;
        break;
      }
      window_value = current;
    }
    double gnorm_sq = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      const double saved = params[k];
      params[k] = saved + cfg.fd_step;
      const double up = loss(params);
      params[k] = saved - cfg.fd_step;
      const double down = loss(params);
      params[k] = saved;
      grad[k] = (up - down) / (2.0 * cfg.fd_step);
      gnorm_sq += grad[k] * grad[k];
    }
    if (gnorm_sq <= 1e-24) {
      res.stationary = true;
      break;
    }

    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t k = 0; k < P; ++k) candidate[k] = params[k] - step * grad[k];
      const double next = loss(candidate);
      if (next <= current - 1e-4 * step * gnorm_sq) {
        params = candidate;
        current = next;
        accepted = true;
        step = std::min(step * 2.0, cfg.step_size * 4096.0);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.stationary = true;
      break;
    }
    if (it % cfg.trace_every == 0) res.trace.push_back(current);
  }
  if (res.trace.empty() || res.trace.back() != current) res.trace.push_back(current);
  res.params = std::move(params);
  return res;
}

DiscreteMeasure discretize_prior(const MeasureVariant& prior, Eigen::Index want,
                                 std::uint64_t seed) {
  if (const auto* d = std::get_if<DiscreteMeasure>(&prior)) return *d;
  const auto& g = std::get<GaussianMeasure>(prior);
  if (g.dim() == 1) {
    return quantile_discretization(g.mean[0], std::sqrt(g.covariance(0, 0)),
                                   static_cast<int>(std::max<Eigen::Index>(want, 16)));
  }
  const Eigen::MatrixXd half = sqrt_psd(g.covariance);
  const Eigen::Index n = std::max<Eigen::Index>(want, 64);
  DiscreteMeasure out;
  out.points.resize(n, g.dim());
  out.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd u(g.dim());
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = rng.normal();
    out.points.row(i) = (g.mean + half * u).transpose();
  }
  return out;
}

}  // namespace

double sample_divergence(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         const FitConfig& cfg) {
  switch (cfg.divergence) {
    case DivergenceKind::energy_distance:
      return energy_distance_sq(a, b);
    case DivergenceKind::sliced_wasserstein:
      return sliced_wasserstein_sq(a, b, cfg.sliced_projections);
    case DivergenceKind::sinkhorn_divergence:
      return sinkhorn_divergence(a, b, cfg.sinkhorn_eps);
  }
  return 0.0;
}

namespace {

struct AffineBlock {
  Eigen::MatrixXd linear;
  Eigen::VectorXd offset;
};

std::vector<double> pack_block(const AffineBlock& block) {
  const Eigen::Index d = block.linear.rows();
  std::vector<double> theta(static_cast<std::size_t>(d * d + d));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      theta[static_cast<std::size_t>(i * d + j)] = block.linear(i, j);
    }
    theta[static_cast<std::size_t>(d * d + i)] = block.offset[i];
  }
  return theta;
}

AffineBlock unpack_block(const std::vector<double>& theta, Eigen::Index d,
                         std::size_t base = 0) {
  AffineBlock block;
  block.linear.resize(d, d);
  block.offset.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      block.linear(i, j) = theta[base + static_cast<std::size_t>(i * d + j)];
    }
    block.offset[i] = theta[base + static_cast<std::size_t>(d * d + i)];
  }
  return block;
}

Eigen::VectorXd weighted_mean(const DiscreteMeasure& m) {
  return m.points.transpose() * m.weights;
}

Eigen::MatrixXd weighted_cov(const DiscreteMeasure& m) {
  const Eigen::VectorXd mu = weighted_mean(m);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m.dim(), m.dim());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Eigen::VectorXd centered = m.atom(i) - mu;
    cov += m.weights[i] * centered * centered.transpose();
  }
  return cov;
}

// Deterministic warm starts: identity, and maps matching the first two
// moments of the encoded data to the prior (with a reflected variant, since
// the covariance equation fixes the linear part only up to an orthogonal
// factor).
std::vector<AffineBlock> encoder_starts(const DiscreteMeasure& data,
                                        const DiscreteMeasure& prior) {
  const Eigen::Index d = data.dim();
  std::vector<AffineBlock> starts;
  starts.push_back({Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)});

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(weighted_cov(data));
  if (es.eigenvalues().minCoeff() > 1e-10) {
    const Eigen::MatrixXd sx_isqrt =
        es.eigenvectors() *
        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();
    const Eigen::MatrixXd sz_sqrt = sqrt_psd(weighted_cov(prior));
    const Eigen::VectorXd mx = weighted_mean(data);
    const Eigen::VectorXd mz = weighted_mean(prior);
    Eigen::MatrixXd reflect = Eigen::MatrixXd::Identity(d, d);
    reflect(0, 0) = -1.0;
    for (const Eigen::MatrixXd& r :
         {Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d)), reflect}) {
      const Eigen::MatrixXd a = sz_sqrt * r * sx_isqrt;
      starts.push_back({a, mz - a * mx});
    }
  }
  return starts;
}

}  // namespace

FitAutoencoderResult fit_autoencoder(const LabeledDataset& data,
                                     const MeasureVariant& latent_prior,
                                     const FitConfig& cfg) {
  cfg.check();
  const ConditionalFamily fam = conditional_family_from_labeled(data);
  const Eigen::Index d = data.data_dim();
  const std::size_t L = fam.num_labels();
  const DiscreteMeasure prior =
      discretize_prior(latent_prior, fam.discrete(0).size(), cfg.seed);
  if (prior.dim() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "latent dimension must equal data dimension");
  }

  // The objective is a label-weighted sum of per-label terms with disjoint
  // parameters, so each label's block is fitted independently.
  const auto label_loss = [&](const DiscreteMeasure& dm,
                              const std::vector<double>& theta) -> double {
    const AffineBlock block = unpack_block(theta, d);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(block.linear);
    if (std::abs(lu.determinant()) <= 1e-12) {
      return std::numeric_limits<double>::infinity();
    }
    const Eigen::MatrixXd inv = lu.inverse();
    double recon = 0.0;
    for (Eigen::Index i = 0; i < dm.size(); ++i) {
      const Eigen::VectorXd x = dm.atom(i);
      const Eigen::VectorXd round =
          inv * ((block.linear * x + block.offset) - block.offset);
      recon += dm.weights[i] * std::pow((round - x).norm(), cfg.p);
    }
    double latent_recon = 0.0;
    for (Eigen::Index i = 0; i < prior.size(); ++i) {
      const Eigen::VectorXd z = prior.atom(i);
      const Eigen::VectorXd round =
          block.linear * (inv * (z - block.offset)) + block.offset;
      latent_recon += prior.weights[i] * (round - z).norm();
    }
    DiscreteMeasure pushed;
    pushed.points.resize(dm.size(), d);
    pushed.weights = dm.weights;
    for (Eigen::Index i = 0; i < dm.size(); ++i) {
      pushed.points.row(i) =
          (block.linear * dm.atom(i) + block.offset).transpose();
    }
    const double match = sample_divergence(prior, pushed, cfg);
    return recon + cfg.lambda_match_latent * match +
           cfg.lambda_recon_latent * latent_recon;
  };

  std::vector<Eigen::MatrixXd> lin(L);
  std::vector<Eigen::VectorXd> off(L);
  std::vector<std::vector<double>> traces(L);
  for (std::size_t m = 0; m < L; ++m) {
    const DiscreteMeasure& dm = fam.discrete(m);
    const auto loss = [&](const std::vector<double>& theta) {
      return label_loss(dm, theta);
    };
    GdResult best;
    bool have = false;
    for (const AffineBlock& start : encoder_starts(dm, prior)) {
      GdResult gd = minimize_fd(pack_block(start), loss, cfg);
      if (!have || gd.trace.back() < best.trace.back()) {
        best = std::move(gd);
        have = true;
      }
    }
    const AffineBlock block = unpack_block(best.params, d);
    lin[m] = block.linear;
    off[m] = block.offset;
    traces[m] = std::move(best.trace);
  }

  FitAutoencoderResult out;
  out.pair = AffineBijectionPair(fam.labels, lin, off);

  // Combined trace: label-weighted sum, padded with each block's final value.
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());
  out.loss_trace.assign(longest, 0.0);
  for (std::size_t m = 0; m < L; ++m) {
    for (std::size_t k = 0; k < longest; ++k) {
      const double v = k < traces[m].size() ? traces[m][k] : traces[m].back();
      out.loss_trace[k] += fam.label_weights[static_cast<Eigen::Index>(m)] * v;
    }
  }
  out.converged = out.loss_trace.back() <= cfg.tol_loss;
  return out;
}

namespace {

// Pushforward of a discrete family measure through a transport entry.
DiscreteMeasure push_measure(const DiscreteMeasure& src,
                             const TransportMapEntry& entry) {
  DiscreteMeasure out;
  out.points.resize(src.size(), src.dim());
  out.weights = src.weights;
  for (Eigen::Index i = 0; i < src.size(); ++i) {
    out.points.row(i) = (entry.affine ? entry.apply(src.atom(i))
                                      : entry.apply_index(i))
                            .transpose();
  }
  return out;
}

// Loss contribution of one ordered label pair. The data-matching term is the
// exact W_p for objective evaluation and the configured sample divergence
// during fitting; everything else is shared.
double pair_terms(const TransportMap& tmap, const AffineBijectionPair& pair,
                  const ConditionalFamily& family, const FitConfig& cfg,
                  std::size_t i, std::size_t j,
                  const std::vector<std::size_t>& pidx, bool exact_match_term) {
  const DiscreteMeasure& src = family.discrete(i);
  const DiscreteMeasure& dst = family.discrete(j);
  const TransportMapEntry& fwd = tmap.entry(i, j);
  const TransportMapEntry& bwd = tmap.entry(j, i);
  const double pw = family.label_weights[static_cast<Eigen::Index>(i)] *
                    family.label_weights[static_cast<Eigen::Index>(j)];
  const double label_sq =
      cfg.eps_label * (family.labels[i] - family.labels[j]).squaredNorm();

  double cost = 0.0, cycle = 0.0;
  for (Eigen::Index a = 0; a < src.size(); ++a) {
    const Eigen::VectorXd x = src.atom(a);
    const Eigen::VectorXd tx = fwd.affine ? fwd.apply(x) : fwd.apply_index(a);
    const double dz2 =
        (pair.encode(x, pidx[i]) - pair.encode(tx, pidx[j])).squaredNorm();
    cost += src.weights[a] * std::pow(dz2 + label_sq, cfg.p / 2.0);
    cycle += src.weights[a] * (x - bwd.apply(tx)).norm();
  }
  const DiscreteMeasure pushed = push_measure(src, fwd);
  const double match = exact_match_term
                           ? wasserstein_p(dst, pushed, euclidean_metric(cfg.p))
                           : sample_divergence(dst, pushed, cfg);
  return pw * (cfg.lambda_transport * cost + cfg.lambda_match_data * match +
               cfg.lambda_cycle * cycle);
}

}  // namespace

double transport_objective(const TransportMap& tmap,
                           const AffineBijectionPair& pair,
                           const ConditionalFamily& family,
                           const FitConfig& cfg) {
  cfg.check();
  const std::size_t L = family.num_labels();
  std::vector<std::size_t> pidx(L);
  for (std::size_t m = 0; m < L; ++m) pidx[m] = pair.index_of(family.labels[m]);
  double total = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      total += pair_terms(tmap, pair, family, cfg, i, j, pidx, true);
    }
  }
  return total;
}

double theorem6_gap(const TransportMap& candidate, const TransportMap& oracle,
                    const AffineBijectionPair& pair,
                    const ConditionalFamily& family, const FitConfig& cfg) {
  return transport_objective(candidate, pair, family, cfg) -
         transport_objective(oracle, pair, family, cfg);
}

FitTransportResult fit_transport_map(const AffineBijectionPair& pair,
                                     const LabeledDataset& data,
                                     const FitConfig& cfg) {
  cfg.check();
  const ConditionalFamily fam = conditional_family_from_labeled(data);
  const std::size_t L = fam.num_labels();
  if (L < 2) {
    throw Error(ErrorCode::LabelMismatch,
                "transport fitting needs at least two labels");
  }
  const Eigen::Index d = data.data_dim();
  const std::size_t per_entry = static_cast<std::size_t>(d * d + d);
  std::vector<std::size_t> pidx(L);
  for (std::size_t m = 0; m < L; ++m) pidx[m] = pair.index_of(fam.labels[m]);

  TransportMap tmap;
  tmap.provenance = TransportMap::Provenance::fitted;
  tmap.labels = fam.labels;
  tmap.entries.resize(L * L);
  for (auto& entry : tmap.entries) {
    entry.affine = true;
    entry.linear = Eigen::MatrixXd::Identity(d, d);
    entry.offset = Eigen::VectorXd::Zero(d);
  }

  // Only an entry and its reverse interact (through the cycle term), so the
  // objective splits into independent {(i,j),(j,i)} blocks plus the
  // same-label identity-regularized entries.
  std::vector<std::vector<double>> traces;
  const auto fit_block = [&](const std::vector<std::pair<std::size_t, std::size_t>>&
                                 block_pairs) {
    std::vector<double> theta;
    for (const auto& [i, j] : block_pairs) {
      const std::vector<double> packed =
          pack_block({tmap.entry(i, j).linear, tmap.entry(i, j).offset});
      theta.insert(theta.end(), packed.begin(), packed.end());
    }
    const auto apply_theta = [&](const std::vector<double>& th) {
      for (std::size_t b = 0; b < block_pairs.size(); ++b) {
        const AffineBlock block = unpack_block(th, d, b * per_entry);
        tmap.entry(block_pairs[b].first, block_pairs[b].second).linear =
            block.linear;
        tmap.entry(block_pairs[b].first, block_pairs[b].second).offset =
            block.offset;
      }
    };
    const auto loss = [&](const std::vector<double>& th) {
      apply_theta(th);
      double total = 0.0;
      for (const auto& [i, j] : block_pairs) {
        total += pair_terms(tmap, pair, fam, cfg, i, j, pidx, false);
      }
      return total;
    };
    GdResult gd = minimize_fd(std::move(theta), loss, cfg);
    apply_theta(gd.params);
    traces.push_back(std::move(gd.trace));
  };

  for (std::size_t i = 0; i < L; ++i) {
    fit_block({{i, i}});
    for (std::size_t j = i + 1; j < L; ++j) {
      fit_block({{i, j}, {j, i}});
    }
  }

  FitTransportResult out;
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());
  out.loss_trace.assign(longest, 0.0);
  for (const auto& t : traces) {
    for (std::size_t k = 0; k < longest; ++k) {
      out.loss_trace[k] += k < t.size() ? t[k] : t.back();
    }
  }
  out.tmap = std::move(tmap);
  const std::size_t k = out.loss_trace.size();
  const bool settled =
      k >= 2 && std::abs(out.loss_trace[k - 1] - out.loss_trace[k - 2]) <=
                    1e-10 * (1.0 + std::abs(out.loss_trace[k - 1]));
  out.converged = settled;
  return out;
}

}  // namespace condgeo
