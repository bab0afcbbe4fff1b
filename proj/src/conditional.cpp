#include "condgeo/conditional.hpp"

#include <cmath>

#include "condgeo/simplex.hpp"

namespace condgeo {

void match_labels(const ConditionalFamily& famP, const ConditionalFamily& famQ,
                  std::vector<std::size_t>& order, double tol) {
  validate_family(famP);
  validate_family(famQ);
  if (famP.num_labels() != famQ.num_labels()) {
    throw Error(ErrorCode::LabelMismatch, "label counts differ");
  }
  order.resize(famP.num_labels());
  for (std::size_t i = 0; i < famP.num_labels(); ++i) {
    order[i] = famQ.index_of(famP.labels[i]);
    const double wp = famP.label_weights[static_cast<Eigen::Index>(i)];
    const double wq = famQ.label_weights[static_cast<Eigen::Index>(order[i])];
    if (std::abs(wp - wq) > tol) {
      throw Error(ErrorCode::LabelMismatch, "label weights differ");
    }
  }
}

double expected_conditional_wasserstein(const ConditionalFamily& famP,
                                        const ConditionalFamily& famQ,
                                        const MetricSpec& metric) {
  std::vector<std::size_t> order;
  match_labels(famP, famQ, order);
  const std::size_t L = famP.num_labels();
  std::vector<double> per_label(L);
  for (std::size_t m = 0; m < L; ++m) {
    const double w = wasserstein_p(famP.discrete(m), famQ.discrete(order[m]), metric);
    per_label[m] = std::pow(w, metric.p);
  }
  double total = 0.0;  // fixed reduction order
  for (std::size_t m = 0; m < L; ++m) {
    total += famP.label_weights[static_cast<Eigen::Index>(m)] * per_label[m];
  }
  return std::pow(std::max(total, 0.0), 1.0 / metric.p);
}

SubcouplingResult subcoupling_cost(const ConditionalFamily& famP,
                                   const ConditionalFamily& famQ,
                                   const MetricSpec& metric) {
  std::vector<std::size_t> order;
  match_labels(famP, famQ, order);
  const std::size_t L = famP.num_labels();
  SubcouplingResult res;
  res.per_label.resize(L);
  std::vector<double> costs(L);
  for (std::size_t m = 0; m < L; ++m) {
    CouplingResult c =
        exact_coupling(famP.discrete(m), famQ.discrete(order[m]), metric);
    costs[m] = c.cost;
    res.per_label[m] = std::move(c.coupling);
  }
  double total = 0.0;
  for (std::size_t m = 0; m < L; ++m) {
    total += famP.label_weights[static_cast<Eigen::Index>(m)] * costs[m];
  }
  res.value = std::pow(std::max(total, 0.0), 1.0 / metric.p);
  return res;
}

EncoderLpResult encoder_lp_cost(const ConditionalFamily& famX,
                                const ConditionalFamily& famZ,
                                const std::vector<Eigen::MatrixXd>& gen_points,
                                const MetricSpec& metric) {
  std::vector<std::size_t> order;
  match_labels(famX, famZ, order);
  metric.check();
  if (gen_points.size() != famX.num_labels()) {
    throw Error(ErrorCode::DimensionMismatch,
                "need one generated-point block per label");
  }

  EncoderLpResult res;
  res.plan.tables.resize(famX.num_labels());
  double total = 0.0;
  for (std::size_t m = 0; m < famX.num_labels(); ++m) {
    const DiscreteMeasure& mx = famX.discrete(m);
    const DiscreteMeasure& mz = famZ.discrete(order[m]);
    const Eigen::MatrixXd& gen = gen_points[m];
    if (gen.rows() != mz.size() || gen.cols() != mx.dim()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "generated points must map every latent atom into data space");
    }
    const Eigen::Index nx = mx.size(), nz = mz.size();

    // Variables Q(z|x) laid out x-major; rows: nx row-stochastic constraints
    // then nz aggregate constraints (one of which is redundant).
    LinearProgram lp;
    lp.num_rows = static_cast<int>(nx + nz);
    lp.rhs.resize(nx + nz);
    for (Eigen::Index x = 0; x < nx; ++x) lp.rhs[x] = 1.0;
    for (Eigen::Index z = 0; z < nz; ++z) lp.rhs[nx + z] = mz.weights[z];
    for (Eigen::Index x = 0; x < nx; ++x) {
      for (Eigen::Index z = 0; z < nz; ++z) {
        const double cost =
            metric.cost(mx.atom(x), gen.row(z).transpose()) * mx.weights[x];
        lp.add_column({{static_cast<int>(x), 1.0},
                       {static_cast<int>(nx + z), mx.weights[x]}},
                      cost);
      }
    }
    LpSolution sol;
    try {
      sol = solve_lp(lp);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Infeasible) {
        // The product plan Q(z|x) = P(z|c) is always feasible, so this is a
        // solver defect, not a property of the instance.
        throw Error(ErrorCode::SolverFailure,
                    "encoder LP reported infeasible on a feasible instance");
      }
      throw;
    }
    Eigen::MatrixXd table(nx, nz);
    for (Eigen::Index x = 0; x < nx; ++x) {
      for (Eigen::Index z = 0; z < nz; ++z) {
        table(x, z) = std::max(sol.x[x * nz + z], 0.0);
      }
    }
    res.plan.tables[m] = std::move(table);
    total += famX.label_weights[static_cast<Eigen::Index>(m)] * sol.objective;
  }
  res.value = std::pow(std::max(total, 0.0), 1.0 / metric.p);
  return res;
}

void validate_encoder_plan(const EncoderPlan& plan,
                           const ConditionalFamily& famX,
                           const ConditionalFamily& famZ, double row_tol,
                           double agg_tol) {
  std::vector<std::size_t> order;
  match_labels(famX, famZ, order);
  if (plan.tables.size() != famX.num_labels()) {
    throw Error(ErrorCode::DimensionMismatch, "plan table count mismatch");
  }
  for (std::size_t m = 0; m < plan.tables.size(); ++m) {
    const Eigen::MatrixXd& t = plan.tables[m];
    const DiscreteMeasure& mx = famX.discrete(m);
    const DiscreteMeasure& mz = famZ.discrete(order[m]);
    if (t.rows() != mx.size() || t.cols() != mz.size()) {
      throw Error(ErrorCode::DimensionMismatch, "plan table shape mismatch");
    }
    if (t.minCoeff() < -1e-12) {
      throw Error(ErrorCode::NegativeWeight, "plan has negative entries");
    }
    for (Eigen::Index x = 0; x < t.rows(); ++x) {
      if (std::abs(t.row(x).sum() - 1.0) > row_tol) {
        throw Error(ErrorCode::WeightSum, "plan row is not a probability vector");
      }
    }
    const Eigen::VectorXd agg = t.transpose() * mx.weights;
    if ((agg - mz.weights).cwiseAbs().maxCoeff() > agg_tol) {
      throw Error(ErrorCode::SolverFailure, "aggregate constraint violated");
    }
  }
}

bool gaussian_subcoupling_member(const GaussianJointSpec& spec, double tol) {
  const Eigen::Index dx = spec.sigma_xx.rows();
  const Eigen::Index dy = spec.sigma_yy.rows();
  const Eigen::Index dc = spec.sigma_cc.rows();
  if (spec.sigma_xx.cols() != dx || spec.sigma_yy.cols() != dy ||
      spec.sigma_cc.cols() != dc || spec.sigma_pi.rows() != dx ||
      spec.sigma_pi.cols() != dy || spec.sigma_xc.rows() != dx ||
      spec.sigma_xc.cols() != dc || spec.sigma_yc.rows() != dy ||
      spec.sigma_yc.cols() != dc) {
    throw Error(ErrorCode::DimensionMismatch, "block shapes inconsistent");
  }
  Eigen::MatrixXd block(dx + dy + dc, dx + dy + dc);
  block.topLeftCorner(dx, dx) = spec.sigma_xx;
  block.block(0, dx, dx, dy) = spec.sigma_pi;
  block.block(0, dx + dy, dx, dc) = spec.sigma_xc;
  block.block(dx, 0, dy, dx) = spec.sigma_pi.transpose();
  block.block(dx, dx, dy, dy) = spec.sigma_yy;
  block.block(dx, dx + dy, dy, dc) = spec.sigma_yc;
  block.block(dx + dy, 0, dc, dx) = spec.sigma_xc.transpose();
  block.block(dx + dy, dx, dc, dy) = spec.sigma_yc.transpose();
  block.bottomRightCorner(dc, dc) = spec.sigma_cc;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
  return es.eigenvalues().minCoeff() >= -tol;
}

double example1_threshold(double rho_xc, double rho_yc) {
  if (std::abs(rho_xc) > 1.0 || std::abs(rho_yc) > 1.0) {
    throw Error(ErrorCode::OutOfRange, "correlations must lie in [-1, 1]");
  }
  return std::sqrt((1.0 - rho_xc * rho_xc) * (1.0 - rho_yc * rho_yc));
}

}  // namespace condgeo
