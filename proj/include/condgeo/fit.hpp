#ifndef CONDGEO_FIT_HPP
#define CONDGEO_FIT_HPP

#include <cstdint>
#include <vector>

#include "condgeo/measures.hpp"
#include "condgeo/pipeline.hpp"

namespace condgeo {

/// Sample divergences standing in for the adversarial matching terms.
enum class DivergenceKind {
  energy_distance,      // squared energy distance
  sliced_wasserstein,   // mean squared 1-D W2 over seeded projections
  sinkhorn_divergence,  // debiased entropic cost at fixed epsilon
};

struct FitConfig {
  double lambda_transport = 1.0;  // transport-cost coefficient
  double lambda_match_latent = 1.0;
  double lambda_recon_latent = 0.1;
  double lambda_match_data = 1.0;
  double lambda_cycle = 5.0;
  double eps_label = 1.0;  // d_enc label weight
  double p = 2.0;

  DivergenceKind divergence = DivergenceKind::energy_distance;
  int sliced_projections = 64;
  double sinkhorn_eps = 0.05;

  double step_size = 0.05;
  int max_iter = 2000;
  int trace_every = 25;
  double fd_step = 1e-5;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  double tol_loss = 1e-3;  // convergence-flag threshold for matching losses

  void check() const;
};

/// Divergence between two discrete measures per cfg.divergence; zero iff the
/// measures coincide (up to the divergence's resolution).
double sample_divergence(const DiscreteMeasure& a, const DiscreteMeasure& b,
                         const FitConfig& cfg);

struct FitAutoencoderResult {
  AffineBijectionPair pair;
  std::vector<double> loss_trace;  // recorded every trace_every iterations
  bool converged = true;
};

/// Learns per-label affine encoder parameters by gradient descent on the
/// reconstruction + latent-matching + latent-reconstruction objective. The
/// generator is always the computed inverse, so both reconstruction terms
/// vanish structurally and descent acts on the matching penalty.
FitAutoencoderResult fit_autoencoder(const LabeledDataset& data,
                                     const MeasureVariant& latent_prior,
                                     const FitConfig& cfg);

struct FitTransportResult {
  TransportMap tmap;
  std::vector<double> loss_trace;
  bool converged = true;
};

/// Learns one affine map per ordered label pair by gradient descent on the
/// transport cost under d_enc^p plus data-matching, cycle-consistency, and
/// same-label identity terms. Steps are accepted only on decrease, so the
/// recorded trace is non-increasing.
FitTransportResult fit_transport_map(const AffineBijectionPair& pair,
                                     const LabeledDataset& data,
                                     const FitConfig& cfg);

/// Population transport objective on the empirical families, with the exact
/// W_p data-matching term of the Monge-Kantorovich formulation. Evaluated
/// label pair by label pair.
double transport_objective(const TransportMap& tmap,
                           const AffineBijectionPair& pair,
                           const ConditionalFamily& family,
                           const FitConfig& cfg);

/// transport_objective(candidate) - transport_objective(oracle); nonnegative
/// up to numerics whenever the match coefficient dominates the cost term's
/// sensitivity on the instance.
double theorem6_gap(const TransportMap& candidate, const TransportMap& oracle,
                    const AffineBijectionPair& pair,
                    const ConditionalFamily& family, const FitConfig& cfg);

}  // namespace condgeo

#endif  // CONDGEO_FIT_HPP
