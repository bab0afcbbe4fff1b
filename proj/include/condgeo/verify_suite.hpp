#ifndef CONDGEO_VERIFY_SUITE_HPP
#define CONDGEO_VERIFY_SUITE_HPP

#include <string>
#include <vector>

namespace condgeo {

/// One named invariant with the worst observed value against its tolerance.
struct VerifyCheck {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifySummary {
  std::vector<VerifyCheck> checks;
  bool all_pass = true;
};

/// Runs every specification invariant on seeded instances. `filter` keeps
/// only checks whose name contains the substring.
VerifySummary run_verify_suite(const std::string& filter = "");

}  // namespace condgeo

#endif  // CONDGEO_VERIFY_SUITE_HPP
