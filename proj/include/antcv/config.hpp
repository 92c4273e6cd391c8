#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "antcv/harness.hpp"

namespace antcv {

// Config file contents for `run`.  Versioned, strict: unknown keys are
// rejected so stale configs fail loudly.
struct RunConfig {
  int schema = 1;
  std::string scenario = "isotonic";
  int n = 0;  // 0 = scenario default
  double sigma2 = 1.0;
  std::vector<MethodSpec> methods;
  int replications = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  int oracle_n_mc = 2000;
  std::string output;  // CSV path; empty = stdout only

  ScenarioSpec scenario_spec() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

}  // namespace antcv
