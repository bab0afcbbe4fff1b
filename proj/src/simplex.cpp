#include "condgeo/simplex.hpp"

#include <cmath>
#include <limits>

#include "condgeo/errors.hpp"

namespace condgeo {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-10;
constexpr double kPhase1Tol = 1e-8;
constexpr int kRefactorEvery = 128;

struct Tableau {
  const LinearProgram& lp;
  int m;                       // rows
  int n;                       // original columns
  std::vector<int> basis;      // variable index per row; >= n means artificial
  Eigen::MatrixXd binv;        // basis inverse
  Eigen::VectorXd xb;          // basic values
  Eigen::VectorXd rhs;         // sign-fixed right-hand side
  std::vector<double> art_sign;

  explicit Tableau(const LinearProgram& problem)
      : lp(problem), m(problem.num_rows), n(static_cast<int>(problem.columns.size())) {
    rhs = problem.rhs;
    art_sign.assign(m, 1.0);
    for (int r = 0; r < m; ++r) {
      if (rhs[r] < 0.0) {
        rhs[r] = -rhs[r];
        art_sign[r] = -1.0;
      }
    }
    basis.resize(m);
    for (int r = 0; r < m; ++r) basis[r] = n + r;
    binv = Eigen::MatrixXd::Identity(m, m);
    xb = rhs;
  }

  // Column of the full matrix (original columns carry the row-sign fix,
  // artificial j = n + r is sign * e_r).
  void scatter_column(int j, Eigen::VectorXd& out) const {
    out.setZero();
    if (j >= n) {
      out[j - n] = 1.0;  // artificials are identity columns after the sign fix
      return;
    }
    for (const auto& [r, v] : lp.columns[j]) out[r] = art_sign[r] * v;
  }

  double column_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n) return y[j - n];
    double s = 0.0;
    for (const auto& [r, v] : lp.columns[j]) s += y[r] * art_sign[r] * v;
    return s;
  }

  void refactor() {
    Eigen::MatrixXd basis_cols(m, m);
    Eigen::VectorXd col(m);
    for (int r = 0; r < m; ++r) {
      scatter_column(basis[r], col);
      basis_cols.col(r) = col;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_cols);
    binv = lu.inverse();
    xb = binv * rhs;
  }
};

// One simplex phase; costs has size n + m (artificials included). Columns
// with allow_enter[j] == false are never brought into the basis.
void run_phase(Tableau& t, const std::vector<double>& costs,
               const std::vector<char>& allow_enter) {
  const int total = t.n + t.m;
  Eigen::VectorXd y(t.m), direction(t.m), col(t.m), cb(t.m);
  std::vector<char> in_basis(total, 0);
  for (int r = 0; r < t.m; ++r) in_basis[t.basis[r]] = 1;
  long iter = 0;
  const long max_iter = 20000L + 200L * static_cast<long>(total);
  int since_refactor = 0;

  while (true) {
    if (++iter > max_iter) {
      throw Error(ErrorCode::SolverFailure, "simplex iteration cap exceeded");
    }
    for (int r = 0; r < t.m; ++r) cb[r] = costs[t.basis[r]];
    y = t.binv.transpose() * cb;

    // Bland: lowest-index column with negative reduced cost enters.
    int enter = -1;
    for (int j = 0; j < total; ++j) {
      if (!allow_enter[j] || in_basis[j]) continue;
      const double reduced = costs[j] - t.column_dot(j, y);
      if (reduced < -kReducedCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return;  // optimal for this phase

    t.scatter_column(enter, col);
    direction = t.binv * col;

    // Ratio test; ties resolved toward the smallest basic variable index.
    double theta = std::numeric_limits<double>::infinity();
    int leave_row = -1;
    for (int r = 0; r < t.m; ++r) {
      if (direction[r] > kPivotTol) {
        const double ratio = t.xb[r] / direction[r];
        if (ratio < theta - 1e-13 ||
            (ratio <= theta + 1e-13 &&
             (leave_row < 0 || t.basis[r] < t.basis[leave_row]))) {
          theta = std::max(ratio, 0.0);
          leave_row = r;
        }
      }
    }
    if (leave_row < 0) {
      throw Error(ErrorCode::SolverFailure, "LP is unbounded");
    }

    // Pivot: update basic values and the basis inverse.
    for (int r = 0; r < t.m; ++r) t.xb[r] -= theta * direction[r];
    t.xb[leave_row] = theta;
    const double pivot = direction[leave_row];
    t.binv.row(leave_row) /= pivot;
    for (int r = 0; r < t.m; ++r) {
      if (r != leave_row && std::abs(direction[r]) > 0.0) {
        t.binv.row(r) -= direction[r] * t.binv.row(leave_row);
      }
    }
    in_basis[t.basis[leave_row]] = 0;
    in_basis[enter] = 1;
    t.basis[leave_row] = enter;

    if (++since_refactor >= kRefactorEvery) {
      t.refactor();
      since_refactor = 0;
    }
  }
}

}  // namespace

int LinearProgram::add_column(std::vector<std::pair<int, double>> entries,
                              double cost) {
  columns.push_back(std::move(entries));
  objective.push_back(cost);
  return static_cast<int>(columns.size()) - 1;
}

LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.rhs.size() != lp.num_rows) {
    throw Error(ErrorCode::DimensionMismatch, "LP rhs size mismatch");
  }
  Tableau t(lp);
  const int total = t.n + t.m;

  // Phase 1: minimize the artificial mass.
  std::vector<double> phase1_costs(total, 0.0);
  for (int j = t.n; j < total; ++j) phase1_costs[j] = 1.0;
  std::vector<char> allow(total, 1);
  run_phase(t, phase1_costs, allow);

  double art_mass = 0.0;
  for (int r = 0; r < t.m; ++r) {
    if (t.basis[r] >= t.n) art_mass += std::abs(t.xb[r]);
  }
  if (art_mass > kPhase1Tol) {
    throw Error(ErrorCode::Infeasible,
                "LP infeasible (artificial mass " + std::to_string(art_mass) + ")");
  }

  // Phase 2: original objective; artificials stay at zero and cannot enter.
  std::vector<double> phase2_costs(total, 0.0);
  for (int j = 0; j < t.n; ++j) phase2_costs[j] = lp.objective[j];
  for (int j = t.n; j < total; ++j) allow[j] = 0;
  t.refactor();
  run_phase(t, phase2_costs, allow);

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(t.n);
  for (int r = 0; r < t.m; ++r) {
    if (t.basis[r] < t.n) sol.x[t.basis[r]] = std::max(t.xb[r], 0.0);
  }
  Eigen::VectorXd cb(t.m);
  for (int r = 0; r < t.m; ++r) cb[r] = phase2_costs[t.basis[r]];
  Eigen::VectorXd y = t.binv.transpose() * cb;
  for (int r = 0; r < t.m; ++r) y[r] *= t.art_sign[r];  // undo the row sign fix
  sol.duals = y;
  double obj = 0.0;
  for (int j = 0; j < t.n; ++j) obj += lp.objective[j] * sol.x[j];
  sol.objective = obj;
  return sol;
}

}  // namespace condgeo
