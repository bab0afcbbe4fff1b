#ifndef CONDGEO_SCENARIO_HPP
#define CONDGEO_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "condgeo/errors.hpp"

namespace condgeo {

/// Exit-code contract of the runner.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitDataError = 3,
  kExitNumericalError = 4,
  kExitUnknownArtifact = 5,
};

struct RunReport {
  nlohmann::json document;  // full report (schema condgeo.report.v1)
  std::vector<std::string> artifacts;
  bool all_pass = true;
};

/// Parses and executes one scenario document deterministically under its
/// seed, writing report.json plus scenario artifacts into the output
/// directory. Every number in the `results` payload is a shortest
/// round-trip decimal string, so repeated runs are byte identical.
RunReport run_scenario_file(const std::string& config_path,
                            const std::string& out_dir_override,
                            std::optional<std::uint64_t> seed_override);

/// Long-format plot CSV (`series,t,x1,...,xd,weight`) for a named artifact
/// of an existing report; throws UnknownArtifact for names the report does
/// not carry or cannot be plotted.
std::string emit_plot_data(const std::string& report_path,
                           const std::string& artifact);

/// Maps a library error to the runner's exit code.
int exit_code_for(const Error& e);

}  // namespace condgeo

#endif  // CONDGEO_SCENARIO_HPP
