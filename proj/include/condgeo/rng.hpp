#ifndef CONDGEO_RNG_HPP
#define CONDGEO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace condgeo {

/// Seeded random source with platform-independent draws.
///
/// std::mt19937_64 output is specified bit-for-bit by the standard; the
/// distributions built here on top of it avoid std::*_distribution, whose
/// algorithms are implementation defined. Identical seeds therefore give
/// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of entropy.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (the second deviate is cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Index draw from a finite distribution given by nonnegative weights.
  /// Inverse-CDF walk in index order, so the mapping is deterministic.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Inverse standard-normal CDF. Acklam's rational approximation refined by
/// one Halley step against std::erfc; accurate to ~1e-15 on (0, 1).
double normal_quantile(double p);

}  // namespace condgeo

#endif  // CONDGEO_RNG_HPP
