#ifndef CONDGEO_SYNTHETIC_HPP
#define CONDGEO_SYNTHETIC_HPP

#include <cstdint>

#include "condgeo/measures.hpp"
#include "condgeo/pipeline.hpp"
#include "condgeo/rng.hpp"

namespace condgeo {

/// Seeded instance generators shared by the verification suite, the
/// acceptance runner, and synthetic scenario specs.

DiscreteMeasure random_measure(Rng& rng, int n, int d, double scale = 2.0,
                               bool uniform_weights = true);

/// Family with `num_labels` distinct labels in R^k and n-atom measures.
ConditionalFamily random_family(Rng& rng, int num_labels, int n, int d,
                                int k = 1, double scale = 2.0,
                                bool uniform_weights = true);

/// Random invertible affine blocks over the given labels (singular draws are
/// rejected and redrawn).
AffineBijectionPair random_affine_pair(Rng& rng,
                                       const std::vector<Eigen::VectorXd>& labels,
                                       int d);

struct SyntheticPipeline {
  Pipeline pipeline;
  DiscreteMeasure prior;  // latent law the families were generated from
};

/// Generic pipeline: independent latent supports per label, arbitrary
/// invertible encoders, exact latent-OT transports.
SyntheticPipeline generic_pipeline(Rng& rng, int num_labels, int n, int d);

/// Homogeneous-representation pipeline: every label's latent family equals
/// the prior, so (A4) and (A5) hold exactly. `shared_linear` forces one
/// linear block across labels (translation family), which keeps the output
/// barycenter Euclidean as well.
SyntheticPipeline homogeneous_pipeline(Rng& rng, int num_labels, int n, int d,
                                       bool shared_linear);

/// Pipeline violating (A5): each label's latent support is the prior shifted
/// by `shift` in every coordinate times the label index.
SyntheticPipeline shifted_latent_pipeline(Rng& rng, int num_labels, int n,
                                          int d, double shift);

/// Gaussian-family pipeline with homogeneous latents (A4/A5) built from
/// scalar-times-identity linear blocks, so closed-form sampling comparisons
/// stay exact under common random numbers.
SyntheticPipeline homogeneous_gaussian_pipeline(Rng& rng, int num_labels, int d);

std::vector<Eigen::VectorXd> distinct_labels(Rng& rng, int num_labels, int k);

}  // namespace condgeo

#endif  // CONDGEO_SYNTHETIC_HPP
