#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace sublin {

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Parse with duplicate-key rejection (nlohmann keeps the last value silently,
// which would make two configs hash alike while meaning different things).
nlohmann::json parse_json_strict(const std::string& text);

// A validated experiment description: subcommand, resolved parameters, seed,
// thread count and output directory. Unknown keys are rejected with their
// path; invariants (like p > 2 v r for the bound runner) fail at parse time.
struct ExperimentConfig {
  std::string subcommand;
  nlohmann::json params;  // resolved, defaults filled
  std::uint64_t seed = 0;
  int threads = 4;
  std::string out_dir = "out";
  std::map<std::string, double> tolerances;

  nlohmann::json to_json() const;
  std::string canonical() const { return to_json().dump(); }
  std::string hash() const { return hex64(fnv1a64(canonical())); }
};

ExperimentConfig parse_config(const nlohmann::json& doc);

struct RunReport {
  int schema_version = 1;
  ExperimentConfig config;
  nlohmann::json results;
  double wall_time_s = 0.0;
  int exit_code = 0;

  nlohmann::json to_json() const;
};

}  // namespace sublin
