#ifndef CONDGEO_SIMPLEX_HPP
#define CONDGEO_SIMPLEX_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace condgeo {

/// Equality-form linear program  min c'x  s.t. Ax = b, x >= 0, with A given
/// by sparse columns. Solved by two-phase revised simplex under Bland's rule,
/// so pivoting is deterministic and cycling-free; optimal bases tie-break
/// toward the lowest variable index.
struct LinearProgram {
  int num_rows = 0;
  std::vector<std::vector<std::pair<int, double>>> columns;  // (row, value)
  std::vector<double> objective;
  Eigen::VectorXd rhs;

  int add_column(std::vector<std::pair<int, double>> entries, double cost);
};

struct LpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;  // y with reduced costs c_j - y'A_j >= -tol
  double objective = 0.0;
  bool feasible = true;
};

/// Throws SolverFailure on iteration blow-up and Infeasible when phase 1
/// cannot zero the artificials. Redundant equality rows are tolerated.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace condgeo

#endif  // CONDGEO_SIMPLEX_HPP
