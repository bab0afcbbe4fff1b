#ifndef CONDGEO_TESTS_ORACLES_HPP
#define CONDGEO_TESTS_ORACLES_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "condgeo/measures.hpp"
#include "condgeo/simplex.hpp"

namespace condgeo::oracles {

/// Brute-force assignment optimum on uniform equal-size supports: the
/// Birkhoff vertices are exactly the permutation matrices, so enumerating
/// permutations scans every vertex of the polytope.
inline double assignment_enumeration(const Eigen::MatrixXd& costs) {
  const int n = static_cast<int>(costs.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += costs(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;  // uniform weights 1/n per atom
}

/// Independent exact route for general marginals: the transportation LP in
/// equality form handed to the dense simplex. Deliberately shares nothing
/// with the min-cost-flow path used by exact_coupling.
inline double transport_lp(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                           const Eigen::MatrixXd& costs) {
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  LinearProgram lp;
  lp.num_rows = n + m;
  lp.rhs.resize(n + m);
  lp.rhs.head(n) = mu;
  lp.rhs.tail(m) = nu;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      lp.add_column({{i, 1.0}, {n + j, 1.0}}, costs(i, j));
    }
  }
  return solve_lp(lp).objective;
}

}  // namespace condgeo::oracles

#endif  // CONDGEO_TESTS_ORACLES_HPP
