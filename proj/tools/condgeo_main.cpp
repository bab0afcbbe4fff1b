#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "condgeo/scenario.hpp"
#include "condgeo/verify_suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conditional Wasserstein geodesic toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_value = 0;
  auto* run = app.add_subcommand("run", "Execute a scenario config");
  run->add_option("config", config_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  auto* seed_opt = run->add_option("--seed", seed_value, "Seed override");

  std::string filter;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--filter", filter, "Only checks containing this substring");

  std::string report_path;
  std::string artifact;
  auto* plot = app.add_subcommand("plot", "Emit plot data for a report artifact");
  plot->add_option("report", report_path, "report.json path")->required();
  plot->add_option("--artifact", artifact, "Artifact name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed_opt->count() > 0) seed_override = seed_value;
      const condgeo::RunReport report =
          condgeo::run_scenario_file(config_path, out_dir, seed_override);
      std::cout << (report.all_pass ? "ok" : "FAIL") << "\n";
      return report.all_pass ? condgeo::kExitOk : 1;
    }
    if (verify->parsed()) {
      const condgeo::VerifySummary summary = condgeo::run_verify_suite(filter);
      for (const auto& check : summary.checks) {
        std::printf("%-45s %s  (observed %.3g, tol %.3g)\n", check.name.c_str(),
                    check.pass ? "PASS" : "FAIL", check.observed, check.tolerance);
      }
      std::printf("%zu checks, %s\n", summary.checks.size(),
                  summary.all_pass ? "all passed" : "FAILURES present");
      return summary.all_pass ? condgeo::kExitOk : 1;
    }
    if (plot->parsed()) {
      std::cout << condgeo::emit_plot_data(report_path, artifact);
      return condgeo::kExitOk;
    }
  } catch (const condgeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return condgeo::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return condgeo::kExitNumericalError;
  }
  return 0;
}
