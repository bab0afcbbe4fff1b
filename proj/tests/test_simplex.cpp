#include <doctest.h>

#include "condgeo/errors.hpp"
#include "condgeo/rng.hpp"
#include "condgeo/simplex.hpp"

using namespace condgeo;

TEST_CASE("solves a tiny LP with a known optimum") {
  // min x0 + 2 x1 s.t. x0 + x1 = 1, x >= 0 -> x = (1, 0), value 1.
  LinearProgram lp;
  lp.num_rows = 1;
  lp.rhs = Eigen::VectorXd::Ones(1);
  lp.add_column({{0, 1.0}}, 1.0);
  lp.add_column({{0, 1.0}}, 2.0);
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(0.0));
}

TEST_CASE("handles redundant equality rows") {
  // Duplicate constraint rows: x0 + x1 = 1 stated twice.
  LinearProgram lp;
  lp.num_rows = 2;
  lp.rhs = Eigen::VectorXd::Ones(2);
  lp.add_column({{0, 1.0}, {1, 1.0}}, 3.0);
  lp.add_column({{0, 1.0}, {1, 1.0}}, 1.0);
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("reports infeasibility") {
  LinearProgram lp;
  lp.num_rows = 2;
  lp.rhs.resize(2);
  lp.rhs << 1.0, 2.0;  // x0 = 1 and x0 = 2 cannot both hold
  lp.add_column({{0, 1.0}, {1, 1.0}}, 1.0);
  CHECK_THROWS_AS(solve_lp(lp), Error);
}

TEST_CASE("negative rhs rows are handled by the sign fix") {
  // x0 - x1 = -2, x0 + x1 = 4 -> x = (1, 3).
  LinearProgram lp;
  lp.num_rows = 2;
  lp.rhs.resize(2);
  lp.rhs << -2.0, 4.0;
  lp.add_column({{0, 1.0}, {1, 1.0}}, 1.0);
  lp.add_column({{0, -1.0}, {1, 1.0}}, 1.0);
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(3.0));
}

TEST_CASE("dual certificate holds on random transportation instances") {
  Rng rng(99u);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform01() * 4);
    const int m = 3 + static_cast<int>(rng.uniform01() * 4);
    Eigen::VectorXd a(n), b(m);
    for (int i = 0; i < n; ++i) a[i] = 0.1 + rng.uniform01();
    for (int j = 0; j < m; ++j) b[j] = 0.1 + rng.uniform01();
    a /= a.sum();
    b /= b.sum();
    Eigen::MatrixXd costs(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) costs(i, j) = std::abs(rng.normal());
    }
    LinearProgram lp;
    lp.num_rows = n + m;
    lp.rhs.resize(n + m);
    lp.rhs.head(n) = a;
    lp.rhs.tail(m) = b;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        lp.add_column({{i, 1.0}, {n + j, 1.0}}, costs(i, j));
      }
    }
    const LpSolution sol = solve_lp(lp);

    // Primal feasibility.
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n), col = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double v = sol.x[i * m + j];
        CHECK(v >= -1e-12);
        row[i] += v;
        col[j] += v;
      }
    }
    CHECK((row - a).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((col - b).cwiseAbs().maxCoeff() < 1e-9);

    // Dual feasibility: reduced costs nonnegative.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double rc = costs(i, j) - sol.duals[i] - sol.duals[n + j];
        CHECK(rc > -1e-8);
      }
    }
    // Strong duality.
    double dual_value = sol.duals.head(n).dot(a) + sol.duals.tail(m).dot(b);
    CHECK(dual_value == doctest::Approx(sol.objective).epsilon(1e-9));
  }
}
