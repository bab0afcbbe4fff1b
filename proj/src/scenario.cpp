#include "condgeo/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "condgeo/conditional.hpp"
#include "condgeo/csv.hpp"
#include "condgeo/fit.hpp"
#include "condgeo/geodesics.hpp"
#include "condgeo/measures.hpp"
#include "condgeo/ot.hpp"
#include "condgeo/pipeline.hpp"
#include "condgeo/serialize.hpp"
#include "condgeo/synthetic.hpp"
#include "condgeo/verify_suite.hpp"

namespace condgeo {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::OutOfRange:
      return kExitConfigError;
    case ErrorCode::DataError:
    case ErrorCode::EmptySupport:
    case ErrorCode::WeightSum:
    case ErrorCode::NegativeWeight:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::LabelMismatch:
    case ErrorCode::UnknownLabel:
      return kExitDataError;
    case ErrorCode::UnknownArtifact:
      return kExitUnknownArtifact;
    default:
      return kExitNumericalError;
  }
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* name,
                                    const std::string& path) {
  if (!j.contains(name)) {
    throw Error(ErrorCode::ConfigError, "missing field: " + path + name);
  }
  return j.at(name);
}

MetricSpec metric_from_config(const nlohmann::json& cfg) {
  MetricSpec m = euclidean_metric(2.0);
  if (!cfg.contains("metric")) return m;
  const auto& j = cfg.at("metric");
  const std::string kind = j.value("kind", "euclidean");
  const double p = j.value("p", 2.0);
  if (kind == "euclidean") {
    m = euclidean_metric(p);
  } else if (kind == "weighted_product") {
    m = weighted_product_metric(require_field(j, "data_dim", "metric.").get<int>(),
                                j.value("epsilon", 1.0), p);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown metric kind " + kind);
  }
  return m;
}

DiscreteMeasure measure_from_spec(const nlohmann::json& spec,
                                  const fs::path& base_dir, std::uint64_t seed,
                                  const std::string& path) {
  const std::string type = require_field(spec, "type", path).get<std::string>();
  if (type == "atoms") {
    const auto& pts = require_field(spec, "points", path);
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    if (n == 0) throw Error(ErrorCode::EmptySupport, "no points in " + path);
    const Eigen::Index d = static_cast<Eigen::Index>(pts[0].size());
    Eigen::MatrixXd points(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(pts[i].size()) != d) {
        throw Error(ErrorCode::DataError, "ragged points in " + path);
      }
      for (Eigen::Index j = 0; j < d; ++j) points(i, j) = pts[i][j].get<double>();
    }
    std::optional<Eigen::VectorXd> weights;
    if (spec.contains("weights")) {
      Eigen::VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) w[i] = spec.at("weights")[i].get<double>();
      weights = w;
    }
    return empirical_from_samples(points, weights);
  }
  if (type == "gaussian_quantile") {
    return quantile_discretization(require_field(spec, "mean", path).get<double>(),
                                   require_field(spec, "std", path).get<double>(),
                                   require_field(spec, "n", path).get<int>());
  }
  if (type == "random") {
    Rng rng(seed ^ spec.value("salt", 0ull));
    return random_measure(rng, require_field(spec, "n", path).get<int>(),
                          require_field(spec, "d", path).get<int>(),
                          spec.value("scale", 2.0), spec.value("uniform", true));
  }
  if (type == "csv") {
    const fs::path file =
        base_dir / require_field(spec, "path", path).get<std::string>();
    if (!fs::exists(file)) {
      throw Error(ErrorCode::ConfigError, "referenced file missing: " + file.string());
    }
    const Eigen::MatrixXd m = read_matrix_csv(file.string(), true);
    if (m.cols() < 1) throw Error(ErrorCode::DataError, "empty csv " + file.string());
    if (spec.value("has_weight", false)) {
      return empirical_from_samples(m.leftCols(m.cols() - 1),
                                    Eigen::VectorXd(m.rightCols(1)));
    }
    return empirical_from_samples(m);
  }
  throw Error(ErrorCode::ConfigError, "unknown measure type " + type);
}

void write_pointcloud(const fs::path& file, const DiscreteMeasure& m) {
  std::string header;
  for (Eigen::Index j = 0; j < m.dim(); ++j) {
    header += "x" + std::to_string(j + 1) + ",";
  }
  header += "w";
  Eigen::MatrixXd out(m.size(), m.dim() + 1);
  out.leftCols(m.dim()) = m.points;
  out.rightCols(1) = m.weights;
  write_matrix_csv(file.string(), out, header);
}

struct ScenarioContext {
  nlohmann::json config;
  fs::path base_dir;
  fs::path out_dir;
  std::uint64_t seed = 0;
  nlohmann::json results;
  nlohmann::json artifacts = nlohmann::json::array();
  bool all_pass = true;
};

void add_file_artifact(ScenarioContext& ctx, const std::string& name,
                       const std::string& kind, const std::string& file) {
  ctx.artifacts.push_back({{"name", name}, {"kind", kind}, {"file", file}});
}

void run_ot(ScenarioContext& ctx) {
  const MetricSpec metric = metric_from_config(ctx.config);
  const DiscreteMeasure mu = measure_from_spec(
      require_field(ctx.config, "mu", ""), ctx.base_dir, ctx.seed, "mu.");
  const DiscreteMeasure nu = measure_from_spec(
      require_field(ctx.config, "nu", ""), ctx.base_dir, ctx.seed, "nu.");
  const CouplingResult res = exact_coupling(mu, nu, metric);
  ctx.results["cost"] = double_to_string(res.cost);
  ctx.results["wasserstein"] =
      double_to_string(std::pow(std::max(res.cost, 0.0), 1.0 / metric.p));
  if (ctx.config.contains("sinkhorn_epsilon")) {
    const double eps = ctx.config.at("sinkhorn_epsilon").get<double>();
    const SinkhornResult sk = sinkhorn_coupling(mu, nu, metric, eps);
    ctx.results["sinkhorn_cost"] = double_to_string(sk.cost);
    ctx.results["sinkhorn_converged"] = sk.converged;
  }
  write_matrix_csv((ctx.out_dir / "coupling.csv").string(), res.coupling.matrix);
  add_file_artifact(ctx, "coupling", "matrix", "coupling.csv");
}

void run_geodesic(ScenarioContext& ctx) {
  const MetricSpec metric = metric_from_config(ctx.config);
  const DiscreteMeasure mu = measure_from_spec(
      require_field(ctx.config, "mu", ""), ctx.base_dir, ctx.seed, "mu.");
  const DiscreteMeasure nu = measure_from_spec(
      require_field(ctx.config, "nu", ""), ctx.base_dir, ctx.seed, "nu.");
  std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  if (ctx.config.contains("t_grid")) {
    grid.clear();
    for (const auto& t : ctx.config.at("t_grid")) grid.push_back(t.get<double>());
  }
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const DiscreteMeasure snap = mccann_interpolant(mu, nu, grid[k], metric);
    const std::string file = "geodesic_" + std::to_string(k) + ".csv";
    write_pointcloud(ctx.out_dir / file, snap);
    files.push_back({{"t", double_to_string(grid[k])}, {"file", file}});
  }
  ctx.artifacts.push_back({{"name", "geodesic"}, {"kind", "curve"}, {"files", files}});

  GeodesicCurve curve;
  curve.metric = metric;
  curve.sampler = [&](double t) { return mccann_interpolant(mu, nu, t, metric); };
  curve.start = mu;
  curve.end = nu;
  const SpeedReport speed = verify_constant_speed(curve, grid, 1e-6);
  ctx.results["constant_speed_deviation"] = double_to_string(speed.max_abs_deviation);
  ctx.results["base_distance"] = double_to_string(speed.base_distance);
  ctx.results["constant_speed_pass"] = speed.pass;
  ctx.results["constant_speed_tolerance"] = double_to_string(1e-6);
  if (!speed.pass) ctx.all_pass = false;
}

void run_barycenter(ScenarioContext& ctx) {
  const auto& specs = require_field(ctx.config, "measures", "");
  std::vector<DiscreteMeasure> measures;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    measures.push_back(measure_from_spec(specs[i], ctx.base_dir,
                                         ctx.seed + i, "measures[i]."));
  }
  const auto& aj = require_field(ctx.config, "alphas", "");
  Eigen::VectorXd alphas(static_cast<Eigen::Index>(aj.size()));
  for (Eigen::Index i = 0; i < alphas.size(); ++i) alphas[i] = aj[i].get<double>();

  const double variance = wasserstein_variance(measures, alphas);
  const DiscreteMeasure bar = barycenter_multimarginal(measures, alphas);
  double attained = 0.0;
  for (std::size_t m = 0; m < measures.size(); ++m) {
    attained += alphas[static_cast<Eigen::Index>(m)] *
                exact_coupling(bar, measures[m], euclidean_metric(2.0)).cost;
  }
  ctx.results["variance"] = double_to_string(variance);
  ctx.results["attained"] = double_to_string(attained);
  ctx.results["attainment_deviation"] = double_to_string(std::abs(attained - variance));
  ctx.results["attainment_tolerance"] = double_to_string(1e-8);
  const bool pass = std::abs(attained - variance) <= 1e-8;
  ctx.results["attainment_pass"] = pass;
  if (!pass) ctx.all_pass = false;
  write_pointcloud(ctx.out_dir / "barycenter.csv", bar);
  add_file_artifact(ctx, "barycenter", "pointcloud", "barycenter.csv");
}

ConditionalFamily family_from_spec(const nlohmann::json& spec,
                                   const fs::path& base_dir, std::uint64_t seed,
                                   const std::string& path) {
  const std::string type = require_field(spec, "type", path).get<std::string>();
  if (type == "csv") {
    const fs::path file =
        base_dir / require_field(spec, "path", path).get<std::string>();
    if (!fs::exists(file)) {
      throw Error(ErrorCode::ConfigError, "referenced file missing: " + file.string());
    }
    return conditional_family_from_labeled(load_labeled_csv(file.string()));
  }
  if (type == "random") {
    Rng rng(seed ^ spec.value("salt", 0ull));
    return random_family(rng, require_field(spec, "labels", path).get<int>(),
                         require_field(spec, "n", path).get<int>(),
                         require_field(spec, "d", path).get<int>(),
                         spec.value("k", 1));
  }
  throw Error(ErrorCode::ConfigError, "unknown family type " + type);
}

void run_conditional(ScenarioContext& ctx) {
  const MetricSpec metric = metric_from_config(ctx.config);
  ConditionalFamily famP = family_from_spec(
      require_field(ctx.config, "famP", ""), ctx.base_dir, ctx.seed, "famP.");
  ConditionalFamily famQ;
  const auto& qspec = require_field(ctx.config, "famQ", "");
  if (qspec.value("type", "") == "random") {
    // Share labels and weights with famP so the families are comparable.
    famQ = famP;
    Rng rng(ctx.seed + 1);
    for (std::size_t m = 0; m < famQ.num_labels(); ++m) {
      famQ.measures[m] = random_measure(
          rng, require_field(qspec, "n", "famQ.").get<int>(),
          require_field(qspec, "d", "famQ.").get<int>(), qspec.value("scale", 2.0));
    }
  } else {
    famQ = family_from_spec(qspec, ctx.base_dir, ctx.seed + 1, "famQ.");
  }
  const double ecw = expected_conditional_wasserstein(famP, famQ, metric);
  const SubcouplingResult sub = subcoupling_cost(famP, famQ, metric);
  ctx.results["expected_conditional_wasserstein"] = double_to_string(ecw);
  ctx.results["subcoupling_cost"] = double_to_string(sub.value);
  ctx.results["thm1_deviation"] = double_to_string(std::abs(ecw - sub.value));
  ctx.results["thm1_tolerance"] = double_to_string(1e-9);
  const bool pass = std::abs(ecw - sub.value) <= 1e-9;
  ctx.results["thm1_pass"] = pass;
  if (!pass) ctx.all_pass = false;
  for (std::size_t m = 0; m < sub.per_label.size(); ++m) {
    const std::string file = "coupling_label" + std::to_string(m) + ".csv";
    write_matrix_csv((ctx.out_dir / file).string(), sub.per_label[m].matrix);
    add_file_artifact(ctx, "coupling_label" + std::to_string(m), "matrix", file);
  }
}

void run_pipeline(ScenarioContext& ctx) {
  const auto& spec = require_field(ctx.config, "pipeline", "");
  const std::string kind = spec.value("kind", "generic");
  const int labels = spec.value("labels", 2);
  const int atoms = spec.value("atoms", 6);
  const int dim = spec.value("dim", 1);
  Rng rng(ctx.seed);
  SyntheticPipeline sp;
  if (kind == "generic") {
    sp = generic_pipeline(rng, labels, atoms, dim);
  } else if (kind == "homogeneous") {
    sp = homogeneous_pipeline(rng, labels, atoms, dim, spec.value("shared_linear", true));
  } else if (kind == "shifted") {
    sp = shifted_latent_pipeline(rng, labels, atoms, dim, spec.value("shift", 1.0));
  } else {
    throw Error(ErrorCode::ConfigError, "unknown pipeline kind " + kind);
  }
  Pipeline& pl = sp.pipeline;
  pl.seed = ctx.seed;

  Eigen::VectorXd alphas =
      Eigen::VectorXd::Constant(labels, 1.0 / static_cast<double>(labels));
  if (ctx.config.contains("alphas")) {
    const auto& aj = ctx.config.at("alphas");
    for (Eigen::Index i = 0; i < alphas.size(); ++i) alphas[i] = aj[i].get<double>();
  }
  const BarycenterWeights bw = make_barycenter_weights(pl.family.labels, alphas);

  const Theorem4Report rep4 = theorem4_bound(pl, bw);
  ctx.results["thm4_achieved"] = double_to_string(rep4.achieved);
  ctx.results["thm4_infimum"] = double_to_string(rep4.infimum);
  ctx.results["thm4_gap"] = double_to_string(rep4.gap);
  ctx.results["thm4_upper_bound"] = double_to_string(rep4.upper_bound);
  ctx.results["thm4_tolerance"] = double_to_string(1e-6);
  const bool chain_ok =
      rep4.gap >= -1e-6 && rep4.gap <= rep4.upper_bound + 1e-6;
  ctx.results["thm4_pass"] = chain_ok;
  if (!chain_ok) ctx.all_pass = false;

  const double thm5 = theorem5_check(pl, sp.prior, bw,
                                     GenerationMode::exact_pushforward);
  ctx.results["thm5_exact_discrepancy"] = double_to_string(thm5);

  const GenerationResult out =
      algorithm1_generate(pl, bw, GenerationMode::exact_pushforward);
  write_pointcloud(ctx.out_dir / "alg1_output.csv", out.samples);
  add_file_artifact(ctx, "alg1_output", "pointcloud", "alg1_output.csv");
  save_pipeline((ctx.out_dir / "pipeline.json").string(), pl);
  add_file_artifact(ctx, "pipeline", "pipeline", "pipeline.json");
}

void run_verify(ScenarioContext& ctx) {
  const std::string filter = ctx.config.value("filter", "");
  const VerifySummary summary = run_verify_suite(filter);
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& check : summary.checks) {
    checks.push_back({{"name", check.name},
                      {"pass", check.pass},
                      {"observed", double_to_string(check.observed)},
                      {"tolerance", double_to_string(check.tolerance)},
                      {"detail", check.detail}});
  }
  ctx.results["checks"] = std::move(checks);
  ctx.results["all_pass"] = summary.all_pass;
  ctx.all_pass = summary.all_pass;
}

}  // namespace

RunReport run_scenario_file(const std::string& config_path,
                            const std::string& out_dir_override,
                            std::optional<std::uint64_t> seed_override) {
  std::ifstream in(config_path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + config_path);
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad JSON: ") + e.what());
  }
  if (config.value("schema", "") != "condgeo.scenario.v1") {
    throw Error(ErrorCode::ConfigError, "missing field: schema (condgeo.scenario.v1)");
  }

  ScenarioContext ctx;
  ctx.config = config;
  ctx.base_dir = fs::path(config_path).parent_path();
  const std::string kind = require_field(config, "kind", "").get<std::string>();
  if (!config.contains("seed") && !seed_override) {
    throw Error(ErrorCode::ConfigError, "missing field: seed");
  }
  ctx.seed = seed_override.value_or(config.value("seed", 0ull));

  std::string out_dir = out_dir_override;
  if (out_dir.empty()) out_dir = config.value("out", "");
  if (out_dir.empty()) {
    throw Error(ErrorCode::ConfigError, "missing field: out (or --out)");
  }
  ctx.out_dir = out_dir;
  fs::create_directories(ctx.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  if (kind == "ot") {
    run_ot(ctx);
  } else if (kind == "geodesic") {
    run_geodesic(ctx);
  } else if (kind == "barycenter") {
    run_barycenter(ctx);
  } else if (kind == "conditional") {
    run_conditional(ctx);
  } else if (kind == "pipeline") {
    run_pipeline(ctx);
  } else if (kind == "verify") {
    run_verify(ctx);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown scenario kind " + kind);
  }
  const auto t1 = std::chrono::steady_clock::now();

  RunReport report;
  report.all_pass = ctx.all_pass;
  nlohmann::json doc;
  doc["schema"] = "condgeo.report.v1";
  doc["scenario"] = ctx.config;
  doc["seed"] = ctx.seed;
  doc["results"] = ctx.results;
  doc["artifacts"] = ctx.artifacts;
  doc["all_pass"] = ctx.all_pass;
  doc["wall_clock_ms"] =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  report.document = doc;
  for (const auto& artifact : ctx.artifacts) {
    if (artifact.contains("file")) {
      report.artifacts.push_back(artifact.at("file").get<std::string>());
    }
  }

  std::ofstream out(ctx.out_dir / "report.json");
  if (!out) {
    throw Error(ErrorCode::DataError, "cannot write report.json");
  }
  out << doc.dump(2) << "\n";
  return report;
}

std::string emit_plot_data(const std::string& report_path,
                           const std::string& artifact) {
  std::ifstream in(report_path);
  if (!in) throw Error(ErrorCode::DataError, "cannot open " + report_path);
  nlohmann::json report;
  try {
    in >> report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::DataError, std::string("bad report JSON: ") + e.what());
  }
  const fs::path dir = fs::path(report_path).parent_path();

  for (const auto& entry : report.value("artifacts", nlohmann::json::array())) {
    if (entry.value("name", "") != artifact) continue;
    const std::string kind = entry.value("kind", "");
    std::ostringstream out;
    const auto emit_cloud = [&out](const fs::path& file, int series, double t) {
      const Eigen::MatrixXd m = read_matrix_csv(file.string(), true);
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << series << "," << double_to_string(t);
        for (Eigen::Index j = 0; j + 1 < m.cols(); ++j) {
          out << "," << double_to_string(m(i, j));
        }
        out << "," << double_to_string(m(i, m.cols() - 1)) << "\n";
      }
    };
    if (kind == "curve") {
      const auto& files = entry.at("files");
      if (files.empty()) throw Error(ErrorCode::UnknownArtifact, "empty curve");
      const Eigen::MatrixXd first =
          read_matrix_csv((dir / files[0].at("file").get<std::string>()).string(),
                          true);
      std::string header = "series,t";
      for (Eigen::Index j = 0; j + 1 < first.cols(); ++j) {
        header += ",x" + std::to_string(j + 1);
      }
      out << header << ",weight\n";
      for (std::size_t k = 0; k < files.size(); ++k) {
        emit_cloud(dir / files[k].at("file").get<std::string>(),
                   static_cast<int>(k),
                   string_to_double(files[k].at("t").get<std::string>()));
      }
      return out.str();
    }
    if (kind == "pointcloud") {
      const fs::path file = dir / entry.at("file").get<std::string>();
      const Eigen::MatrixXd m = read_matrix_csv(file.string(), true);
      std::string header = "series,t";
      for (Eigen::Index j = 0; j + 1 < m.cols(); ++j) {
        header += ",x" + std::to_string(j + 1);
      }
      out << header << ",weight\n";
      emit_cloud(file, 0, 0.0);
      return out.str();
    }
    throw Error(ErrorCode::UnknownArtifact,
                "artifact '" + artifact + "' is not plottable");
  }
  throw Error(ErrorCode::UnknownArtifact, "no artifact named '" + artifact + "'");
}

}  // namespace condgeo
