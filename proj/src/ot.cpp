#include "condgeo/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "condgeo/kernels.hpp"
#include "condgeo/simplex.hpp"

namespace condgeo {

namespace {

constexpr double kSupplyDust = 1e-14;

void check_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  validate_discrete(mu);
  validate_discrete(nu);
  if (mu.dim() != nu.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "support dimensions differ");
  }
}

// Monotone coupling between sorted 1-D supports; optimal for |x-y|^p, p >= 1.
CouplingResult monotone_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double p) {
  const Eigen::Index n = mu.size(), m = nu.size();
  std::vector<Eigen::Index> oi(n), oj(m);
  std::iota(oi.begin(), oi.end(), 0);
  std::iota(oj.begin(), oj.end(), 0);
  std::sort(oi.begin(), oi.end(), [&](Eigen::Index a, Eigen::Index b) {
    return mu.points(a, 0) != mu.points(b, 0) ? mu.points(a, 0) < mu.points(b, 0)
                                              : a < b;
  });
  std::sort(oj.begin(), oj.end(), [&](Eigen::Index a, Eigen::Index b) {
    return nu.points(a, 0) != nu.points(b, 0) ? nu.points(a, 0) < nu.points(b, 0)
                                              : a < b;
  });

  CouplingResult res;
  res.coupling.row_support = mu.points;
  res.coupling.col_support = nu.points;
  res.coupling.matrix = Eigen::MatrixXd::Zero(n, m);
  double cost = 0.0;
  std::size_t a = 0, b = 0;
  double ra = mu.weights[oi[0]], rb = nu.weights[oj[0]];
  while (a < oi.size() && b < oj.size()) {
    const double move = std::min(ra, rb);
    if (move > 0.0) {
      const double d = std::abs(mu.points(oi[a], 0) - nu.points(oj[b], 0));
      res.coupling.matrix(oi[a], oj[b]) += move;
      cost += move * (p == 2.0 ? d * d : (p == 1.0 ? d : std::pow(d, p)));
    }
    ra -= move;
    rb -= move;
    if (ra <= rb) {
      if (++a < oi.size()) ra = mu.weights[oi[a]];
    } else {
      if (++b < oj.size()) rb = nu.weights[oj[b]];
    }
  }
  res.cost = cost;
  return res;
}

// Successive shortest paths with node potentials on the dense bipartite
// graph. Sources are mu atoms, sinks are nu atoms, every forward arc is
// uncapacitated. Ties in Dijkstra and in sink selection break toward the
// lowest node index, which pins down the returned basis.
class FlowSolver {
 public:
  FlowSolver(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
             const Eigen::MatrixXd& costs)
      : n_(supply.size()),
        m_(demand.size()),
        costs_(costs),
        residual_supply_(supply),
        residual_demand_(demand),
        flow_(Eigen::MatrixXd::Zero(supply.size(), demand.size())),
        pot_(Eigen::VectorXd::Zero(supply.size() + demand.size())) {}

  void run() {
    const long cap = 100L * (n_ + m_) + 1000L;
    long rounds = 0;
    while (residual_supply_.maxCoeff() > kSupplyDust &&
           residual_demand_.maxCoeff() > kSupplyDust) {
      if (++rounds > cap) {
        throw Error(ErrorCode::SolverFailure, "flow augmentation cap exceeded");
      }
      augment();
    }
  }

  const Eigen::MatrixXd& flow() const { return flow_; }

  // Dual certificate: reduced costs nonnegative everywhere and ~zero on
  // flow-carrying arcs. Guarantees LP optimality up to tol.
  void verify_optimal(double tol) const {
    const double scale = std::max(1.0, costs_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index j = 0; j < m_; ++j) {
        const double rc = costs_(i, j) + pot_[i] - pot_[n_ + j];
        if (rc < -tol * scale) {
          throw Error(ErrorCode::SolverFailure, "negative reduced cost");
        }
        if (flow_(i, j) > kSupplyDust && std::abs(rc) > tol * scale) {
          throw Error(ErrorCode::SolverFailure,
                      "complementary slackness violated");
        }
      }
    }
  }

 private:
  void augment() {
    const Eigen::Index total = n_ + m_;
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(total, inf);
    std::vector<Eigen::Index> parent(total, -1);
    std::vector<char> settled(total, 0);
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (residual_supply_[i] > kSupplyDust) dist[i] = 0.0;
    }

    Eigen::Index target = -1;
    while (true) {
      Eigen::Index u = -1;
      double best = inf;
      for (Eigen::Index v = 0; v < total; ++v) {
        if (!settled[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u < 0) break;
      settled[u] = 1;
      if (u >= n_ && residual_demand_[u - n_] > kSupplyDust) {
        target = u;
        break;  // nearest demanded sink reached; lowest index on ties
      }
      if (u < n_) {
        for (Eigen::Index j = 0; j < m_; ++j) {
          const Eigen::Index v = n_ + j;
          if (settled[v]) continue;
          const double rc = costs_(u, j) + pot_[u] - pot_[v];
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            parent[v] = u;
          }
        }
      } else {
        const Eigen::Index j = u - n_;
        for (Eigen::Index i = 0; i < n_; ++i) {
          if (settled[i] || flow_(i, j) <= kSupplyDust) continue;
          const double rc = -costs_(i, j) + pot_[u] - pot_[i];
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }
    if (target < 0) {
      throw Error(ErrorCode::SolverFailure, "no augmenting path found");
    }

    // Bottleneck over the path endpoints and backward arcs.
    double delta = residual_demand_[target - n_];
    for (Eigen::Index v = target; parent[v] >= 0; v = parent[v]) {
      const Eigen::Index u = parent[v];
      if (v < n_) delta = std::min(delta, flow_(v, u - n_));  // backward arc
    }
    Eigen::Index origin = target;
    while (parent[origin] >= 0) origin = parent[origin];
    delta = std::min(delta, residual_supply_[origin]);

    for (Eigen::Index v = target; parent[v] >= 0; v = parent[v]) {
      const Eigen::Index u = parent[v];
      if (v >= n_) {
        flow_(u, v - n_) += delta;
      } else {
        flow_(v, u - n_) -= delta;
      }
    }
    residual_supply_[origin] -= delta;
    residual_demand_[target - n_] -= delta;

    for (Eigen::Index v = 0; v < total; ++v) {
      if (std::isfinite(dist[v])) {
        pot_[v] += std::min(dist[v], dist[target]);
      } else {
        pot_[v] += dist[target];
      }
    }
  }

  Eigen::Index n_, m_;
  Eigen::MatrixXd costs_;
  Eigen::VectorXd residual_supply_, residual_demand_;
  Eigen::MatrixXd flow_;
  Eigen::VectorXd pot_;
};

double plan_cost(const Eigen::MatrixXd& plan, const Eigen::MatrixXd& costs) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (plan(i, j) != 0.0) total += plan(i, j) * costs(i, j);
    }
  }
  return total;
}

}  // namespace

void validate_coupling(const Coupling& cpl, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, double tol) {
  if (cpl.matrix.rows() != mu.size() || cpl.matrix.cols() != nu.size()) {
    throw Error(ErrorCode::DimensionMismatch, "coupling shape mismatch");
  }
  if (cpl.matrix.minCoeff() < -1e-15) {
    throw Error(ErrorCode::NegativeWeight, "coupling has negative entries");
  }
  const Eigen::VectorXd rows = cpl.matrix.rowwise().sum();
  const Eigen::VectorXd cols = cpl.matrix.colwise().sum().transpose();
  if ((rows - mu.weights).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::SolverFailure, "row marginal violated");
  }
  if ((cols - nu.weights).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::SolverFailure, "column marginal violated");
  }
}

CouplingResult exact_coupling_from_costs(const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu,
                                         const Eigen::MatrixXd& costs) {
  if (costs.rows() != mu.size() || costs.cols() != nu.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cost matrix shape mismatch");
  }

  CouplingResult res;
  res.coupling.row_support = mu.points;
  res.coupling.col_support = nu.points;

  // Single-atom sides admit only the product plan.
  if (mu.size() == 1 || nu.size() == 1) {
    res.coupling.matrix = mu.weights * nu.weights.transpose();
    res.cost = plan_cost(res.coupling.matrix, costs);
    return res;
  }

  Eigen::VectorXd supply = mu.weights;
  Eigen::VectorXd demand = nu.weights;
  demand *= supply.sum() / demand.sum();  // balance to machine precision

  FlowSolver solver(supply, demand, costs);
  solver.run();
  solver.verify_optimal(1e-9);
  res.coupling.matrix = solver.flow();
  res.cost = plan_cost(res.coupling.matrix, costs);
  return res;
}

CouplingResult exact_coupling(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu,
                              const MetricSpec& metric) {
  check_inputs(mu, nu);
  metric.check();
  if (metric.kind == MetricSpec::Kind::euclidean && mu.dim() == 1) {
    return monotone_1d(mu, nu, metric.p);
  }
  return exact_coupling_from_costs(mu, nu, pairwise_costs(mu, nu, metric));
}

double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const MetricSpec& metric) {
  const double cost = exact_coupling(mu, nu, metric).cost;
  return std::pow(std::max(cost, 0.0), 1.0 / metric.p);
}

SinkhornResult sinkhorn_coupling(const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu,
                                 const MetricSpec& metric, double epsilon,
                                 int max_iter, double tol) {
  check_inputs(mu, nu);
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "sinkhorn epsilon must be positive");
  }
  const Eigen::MatrixXd costs = pairwise_costs(mu, nu, metric);
  const Eigen::Index n = mu.size(), m = nu.size();

  Eigen::VectorXd loga(n), logb(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    loga[i] = mu.weights[i] > 0.0 ? std::log(mu.weights[i])
                                  : -std::numeric_limits<double>::infinity();
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    logb[j] = nu.weights[j] > 0.0 ? std::log(nu.weights[j])
                                  : -std::numeric_limits<double>::infinity();
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);

  // Epsilon-scaling: halve from a coarse level down to the target.
  const double max_cost = std::max(1e-12, costs.maxCoeff());
  std::vector<double> levels;
  for (double e = std::max(epsilon, max_cost / 2.0); e > epsilon; e /= 2.0) {
    levels.push_back(e);
  }
  levels.push_back(epsilon);

  auto plan_from_potentials = [&](double eps) {
    Eigen::MatrixXd plan(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double lw = loga[i] + logb[j];
        plan(i, j) = std::isfinite(lw)
                         ? std::exp((f[i] + g[j] - costs(i, j)) / eps + lw)
                         : 0.0;
      }
    }
    return plan;
  };

  int used = 0;
  bool converged = false;
  for (std::size_t lev = 0; lev < levels.size() && used < max_iter; ++lev) {
    const double eps = levels[lev];
    const bool last = lev + 1 == levels.size();
    const int budget = last ? max_iter - used : std::min(50, max_iter - used);
    for (int it = 0; it < budget; ++it) {
      ++used;
      f = kernels::sinkhorn_row_update(costs, g, logb, eps);
      g = kernels::sinkhorn_col_update(costs, f, loga, eps);
      if (it % 5 == 4 || it == budget - 1) {
        const Eigen::MatrixXd plan = plan_from_potentials(eps);
        const double err =
            std::max((plan.rowwise().sum() - mu.weights).cwiseAbs().maxCoeff(),
                     (plan.colwise().sum().transpose() - nu.weights)
                         .cwiseAbs()
                         .maxCoeff());
        if (err < tol) {
          if (last) converged = true;
          break;
        }
      }
    }
  }

  // Round onto the transportation polytope (scale rows, then columns, then
  // add the rank-one residual correction).
  Eigen::MatrixXd plan = plan_from_potentials(epsilon);
  Eigen::VectorXd rs = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = rs[i] > 0.0 ? std::min(1.0, mu.weights[i] / rs[i]) : 0.0;
    plan.row(i) *= s;
  }
  Eigen::VectorXd cs = plan.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < m; ++j) {
    const double s = cs[j] > 0.0 ? std::min(1.0, nu.weights[j] / cs[j]) : 0.0;
    plan.col(j) *= s;
  }
  Eigen::VectorXd ra = mu.weights - plan.rowwise().sum();
  Eigen::VectorXd rb = nu.weights - plan.colwise().sum().transpose();
  const double rmass = ra.cwiseAbs().sum();
  if (rmass > 0.0) {
    plan += ra * rb.transpose() / rmass;
  }
  plan = plan.cwiseMax(0.0);

  SinkhornResult res;
  res.coupling.row_support = mu.points;
  res.coupling.col_support = nu.points;
  res.coupling.matrix = plan;
  res.cost = plan_cost(plan, costs);
  res.converged = converged;
  res.iterations = used;
  return res;
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double gaussian_w2(const GaussianMeasure& g1, const GaussianMeasure& g2) {
  validate_gaussian(g1);
  validate_gaussian(g2);
  if (g1.dim() != g2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "Gaussian dimensions differ");
  }
  const Eigen::MatrixXd s2h = sqrt_psd(g2.covariance);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s2h * g1.covariance * s2h);
  const double cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double w2sq = (g1.mean - g2.mean).squaredNorm() + g1.covariance.trace() +
                      g2.covariance.trace() - 2.0 * cross;
  return std::sqrt(std::max(w2sq, 0.0));
}

MongeMapResult monge_map_from_coupling(const Coupling& cpl) {
  const Eigen::Index n = cpl.matrix.rows();
  MongeMapResult res;
  res.images.resize(n, cpl.col_support.cols());
  const double scale = cpl.matrix.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mass = cpl.matrix.row(i).sum();
    if (mass <= 0.0) {
      throw Error(ErrorCode::ZeroRow,
                  "row " + std::to_string(i) + " carries no mass");
    }
    int nonzeros = 0;
    Eigen::Index hit = 0;
    Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(cpl.col_support.cols());
    for (Eigen::Index j = 0; j < cpl.matrix.cols(); ++j) {
      const double w = cpl.matrix(i, j);
      if (w > 1e-12 * scale) {
        ++nonzeros;
        hit = j;
      }
      avg += w * cpl.col_support.row(j);
    }
    if (nonzeros == 1) {
      res.images.row(i) = cpl.col_support.row(hit);
    } else {
      res.images.row(i) = avg / mass;
      res.projected = true;
    }
  }
  return res;
}

long multimarginal_tuple_cap() {
  if (const char* env = std::getenv("CONDGEO_MAX_TUPLES")) {
    const long v = std::atol(env);
    if (v > 0) return v;
  }
  return 1000000L;
}

MultiCouplingResult multimarginal_coupling(
    const std::vector<DiscreteMeasure>& measures, const Eigen::VectorXd& alphas,
    long tuple_cap) {
  const int M = static_cast<int>(measures.size());
  if (M < 1) throw Error(ErrorCode::EmptySupport, "no marginals given");
  if (alphas.size() != M) {
    throw Error(ErrorCode::DimensionMismatch, "weight count mismatch");
  }
  if (alphas.minCoeff() < 0.0) {
    throw Error(ErrorCode::NegativeWeight, "barycenter weights");
  }
  if (std::abs(alphas.sum() - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::WeightSum, "barycenter weights do not sum to 1");
  }
  const Eigen::Index d = measures[0].dim();
  for (const auto& mm : measures) {
    validate_discrete(mm);
    if (mm.dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "marginal dimensions differ");
    }
  }
  if (tuple_cap < 0) tuple_cap = multimarginal_tuple_cap();

  MultiCouplingResult res;
  for (const auto& mm : measures) res.coupling.supports.push_back(mm.points);

  if (M == 1) {
    for (Eigen::Index i = 0; i < measures[0].size(); ++i) {
      res.coupling.entries.push_back({{static_cast<int>(i)}, measures[0].weights[i]});
    }
    res.objective = 0.0;
    return res;
  }

  if (M == 2) {
    // Two marginals reduce to pairwise OT: with xbar = a0 x + a1 y the
    // barycentric cost collapses to a0 a1 ||x - y||^2.
    const CouplingResult oc =
        exact_coupling(measures[0], measures[1], euclidean_metric(2.0));
    for (Eigen::Index i = 0; i < oc.coupling.matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < oc.coupling.matrix.cols(); ++j) {
        const double w = oc.coupling.matrix(i, j);
        if (w > 1e-14) {
          res.coupling.entries.push_back(
              {{static_cast<int>(i), static_cast<int>(j)}, w});
        }
      }
    }
    res.objective = alphas[0] * alphas[1] * oc.cost;
    return res;
  }

  long tuples = 1;
  for (const auto& mm : measures) {
    tuples *= mm.size();
    if (tuples > tuple_cap) {
      throw Error(ErrorCode::InstanceTooLarge,
                  "support tuple count exceeds cap " + std::to_string(tuple_cap));
    }
  }

  // One LP column per tuple, enumerated with the last marginal fastest.
  LinearProgram lp;
  std::vector<int> row_offset(M);
  int rows = 0;
  for (int m = 0; m < M; ++m) {
    row_offset[m] = rows;
    rows += static_cast<int>(measures[m].size());
  }
  lp.num_rows = rows;
  lp.rhs.resize(rows);
  for (int m = 0; m < M; ++m) {
    for (Eigen::Index i = 0; i < measures[m].size(); ++i) {
      lp.rhs[row_offset[m] + i] = measures[m].weights[i];
    }
  }

  std::vector<int> idx(M, 0);
  std::vector<std::vector<int>> tuple_of_col;
  Eigen::VectorXd xbar(d);
  while (true) {
    xbar.setZero();
    for (int m = 0; m < M; ++m) {
      xbar += alphas[m] * measures[m].atom(idx[m]);
    }
    double cost = 0.0;
    for (int m = 0; m < M; ++m) {
      cost += alphas[m] * (measures[m].atom(idx[m]) - xbar).squaredNorm();
    }
    std::vector<std::pair<int, double>> col;
    col.reserve(M);
    for (int m = 0; m < M; ++m) col.push_back({row_offset[m] + idx[m], 1.0});
    lp.add_column(std::move(col), cost);
    tuple_of_col.push_back(idx);

    int m = M - 1;
    while (m >= 0 && ++idx[m] == measures[m].size()) idx[m--] = 0;
    if (m < 0) break;
  }

  const LpSolution sol = solve_lp(lp);
  for (std::size_t t = 0; t < tuple_of_col.size(); ++t) {
    if (sol.x[static_cast<Eigen::Index>(t)] > 1e-14) {
      res.coupling.entries.push_back(
          {tuple_of_col[t], sol.x[static_cast<Eigen::Index>(t)]});
    }
  }
  res.objective = sol.objective;
  return res;
}

}  // namespace condgeo
