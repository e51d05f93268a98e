#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sublin {

// One named check of the bundled verification suite. Tolerances and
// thresholds are pinned in code; the suite either passes or explains itself.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;

  nlohmann::json to_json() const;
};

struct VerifyConfig {
  std::uint64_t seed = 20250807;
  int threads = 4;
  std::map<std::string, double> tolerances;  // named overrides

  double tol(const std::string& name, double dflt) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? dflt : it->second;
  }
};

// Version tag of the bundled defaults (seeds, grids, bands).
extern const char* kVerifyDefaultsVersion;

std::vector<std::string> verify_check_names();
CheckResult run_verify_check(const std::string& name, const VerifyConfig& cfg);
std::vector<CheckResult> run_verify_suite(const VerifyConfig& cfg,
                                          const std::vector<std::string>& subset = {});

// 99% one-sided upper confidence bound for a binomial proportion.
double clopper_pearson_upper(std::int64_t successes, std::int64_t trials,
                             double confidence = 0.99);

}  // namespace sublin
