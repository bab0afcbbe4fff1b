#ifndef CONDGEO_PIPELINE_HPP
#define CONDGEO_PIPELINE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "condgeo/geodesics.hpp"
#include "condgeo/measures.hpp"
#include "condgeo/ot.hpp"

namespace condgeo {

/// Per-label affine encoder/generator pair. The generator is the computed
/// inverse of the encoder, so the one-to-one relation between data and
/// latent space holds structurally: Enc(x, c) = A_c x + b_c and
/// Gen(z, c) = A_c^{-1}(z - b_c). Evaluation at a convex combination of the
/// observed labels interpolates the parameters with the same weights.
class AffineBijectionPair {
 public:
  AffineBijectionPair() = default;
  AffineBijectionPair(std::vector<Eigen::VectorXd> labels,
                      std::vector<Eigen::MatrixXd> linear,
                      std::vector<Eigen::VectorXd> offset);

  const std::vector<Eigen::VectorXd>& labels() const { return labels_; }
  Eigen::Index data_dim() const;
  std::size_t num_labels() const { return labels_.size(); }
  std::size_t index_of(const Eigen::VectorXd& c) const;

  const Eigen::MatrixXd& linear(std::size_t m) const { return linear_[m]; }
  const Eigen::VectorXd& offset(std::size_t m) const { return offset_[m]; }

  Eigen::VectorXd encode(const Eigen::VectorXd& x, std::size_t m) const;
  Eigen::VectorXd generate(const Eigen::VectorXd& z, std::size_t m) const;

  /// Parameters at sum_m alphas[m] * (A_m, b_m).
  Eigen::MatrixXd linear_combo(const Eigen::VectorXd& alphas) const;
  Eigen::VectorXd offset_combo(const Eigen::VectorXd& alphas) const;
  Eigen::VectorXd encode_combo(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& alphas) const;
  Eigen::VectorXd generate_combo(const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& alphas) const;

  /// Pushforward of a per-label measure through the encoder.
  DiscreteMeasure encode_measure(const DiscreteMeasure& m, std::size_t idx) const;
  GaussianMeasure encode_measure(const GaussianMeasure& g, std::size_t idx) const;

 private:
  std::vector<Eigen::VectorXd> labels_;
  std::vector<Eigen::MatrixXd> linear_;
  std::vector<Eigen::VectorXd> offset_;
  std::vector<Eigen::MatrixXd> inverse_;
};

/// Metric on data x label space induced by the encoder
/// (||Enc(x,c) - Enc(x',c')||^2 + eps ||c - c'||^2)^{1/2}; eps = 1 recovers
/// the plain product-space definition.
double d_enc(const AffineBijectionPair& pair, const Eigen::VectorXd& x,
             const Eigen::VectorXd& c, const Eigen::VectorXd& x2,
             const Eigen::VectorXd& c2, double eps = 1.0);

/// Label-indexed transport maps T(., c, c'). Discrete entries carry one
/// image per source atom; affine entries apply anywhere.
struct TransportMapEntry {
  bool affine = false;
  bool projected = false;          // barycentric projection was needed
  Eigen::MatrixXd source_points;   // discrete case: atoms the images align to
  Eigen::MatrixXd images;          // discrete case
  std::vector<Eigen::Index> image_index;  // target atom per source atom; -1 if split
  Eigen::MatrixXd linear;          // affine case
  Eigen::VectorXd offset;

  /// Affine entries evaluate anywhere; discrete entries resolve x to the
  /// nearest source atom (lowest index on ties).
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Discrete entries: image of the atom with the given source index.
  Eigen::VectorXd apply_index(Eigen::Index i) const;
};

struct TransportMap {
  enum class Provenance { exact_latent_ot, fitted };

  Provenance provenance = Provenance::exact_latent_ot;
  std::vector<Eigen::VectorXd> labels;
  std::vector<TransportMapEntry> entries;  // ordered pairs, row-major

  const TransportMapEntry& entry(std::size_t from, std::size_t to) const;
  TransportMapEntry& entry(std::size_t from, std::size_t to);
};

/// Full generator state: encoder/generator pair, observed conditionals, and
/// transport maps between them.
struct Pipeline {
  AffineBijectionPair pair;
  ConditionalFamily family;
  TransportMap tmap;
  double eps_label = 1.0;
  double p = 2.0;
  std::uint64_t seed = 0;
};

struct ConditionDiagnostics {
  double a1_residual = 0.0;
  std::vector<double> a2_duplicate_fraction;  // advisory, per label
  Eigen::MatrixXd a4_matrix;  // W2 between encoded families, all pairs
  double a5_max = 0.0;
};

/// Residuals and homogeneity diagnostics for conditions (A1) through (A5).
ConditionDiagnostics check_conditions(const AffineBijectionPair& pair,
                                      const LabeledDataset& data, double tol);

/// Optimal transport between two observed conditionals through latent space:
/// couple the encoded families under ||.||^p, extract a Monge map (flagged
/// `projected` when mass splits), and conjugate by the generator.
TransportMapEntry latent_ot_transport(const AffineBijectionPair& pair,
                                      const ConditionalFamily& family,
                                      const Eigen::VectorXd& c0,
                                      const Eigen::VectorXd& c1, double p = 2.0);

/// Exact-latent-OT transport map over every ordered label pair.
TransportMap build_exact_transport_map(const AffineBijectionPair& pair,
                                       const ConditionalFamily& family,
                                       double p = 2.0);

struct GenerationResult {
  DiscreteMeasure samples;  // data-space atoms with weights
  DiscreteMeasure latents;  // matching latent atoms
  Eigen::VectorXd label;    // implied label of the output family
};

enum class GenerationMode { exact_pushforward, sampling };

/// Latent interpolation along the transport edge (c0, c1) at time t; the
/// induced label is c_t = (1-t) c0 + t c1.
GenerationResult geodesic_generate(const Pipeline& pipeline,
                                   const Eigen::VectorXd& c0,
                                   const Eigen::VectorXd& c1, double t,
                                   GenerationMode mode, int n = 0,
                                   std::uint64_t seed = 0);

/// Conditional generation at the combination cbar: sample a vertex, move it
/// through the transport edges, interpolate the encodings, and decode at
/// cbar. Exact mode enumerates the vertex atoms instead of sampling.
GenerationResult algorithm1_generate(const Pipeline& pipeline,
                                     const BarycenterWeights& bw,
                                     GenerationMode mode, int n = 0,
                                     std::uint64_t seed = 0);

/// Closed-form output law of the generation above for Gaussian pipelines.
GaussianMeasure algorithm1_generate_gaussian(const Pipeline& pipeline,
                                             const BarycenterWeights& bw);

/// Encoded per-label families (the representation distributions).
std::vector<DiscreteMeasure> encoded_families(const Pipeline& pipeline);
std::vector<GaussianMeasure> encoded_families_gaussian(const Pipeline& pipeline);

struct Theorem4Report {
  double achieved = 0.0;
  double infimum = 0.0;
  double gap = 0.0;
  double upper_bound = 0.0;
};

/// Barycenter-approximation bound: achieved barycenter functional of the
/// Algorithm-1 output, its infimum from the latent variance decomposition,
/// and the transport-composition upper bound on the gap. Discrete pipelines
/// evaluate all integrals exactly; Gaussian pipelines use closed forms for
/// the distances and mc_samples seeded draws for the bound integral.
Theorem4Report theorem4_bound(const Pipeline& pipeline,
                              const BarycenterWeights& bw,
                              int mc_samples = 4096, std::uint64_t seed = 1);

/// Sampling tolerance declared for sampled generation checks.
double sampling_tolerance(int n, double diameter);

/// d_enc on concatenated [x; c] points whose labels lie on the segment from
/// c0 to c1: the interpolation weight is recovered by projecting the label
/// onto the segment, and the encoder parameters are interpolated with it.
/// This is the ground metric for verifying generated geodesics.
MetricSpec encoder_segment_metric(const Pipeline& pipeline,
                                  const Eigen::VectorXd& c0,
                                  const Eigen::VectorXd& c1);

/// W2 discrepancy between Algorithm-1 output and the ground-truth
/// conditional at cbar for a synthetic model X = Gen(Z, C) whose latent law
/// `prior` is independent of the label. The ground truth at cbar is the
/// pushforward of the prior through the interpolated generator.
double theorem5_check(const Pipeline& pipeline, const DiscreteMeasure& prior,
                      const BarycenterWeights& bw, GenerationMode mode,
                      int n = 0, std::uint64_t seed = 0);

}  // namespace condgeo

#endif  // CONDGEO_PIPELINE_HPP
