#pragma once

#include <string>
#include <vector>

namespace antcv {

struct CheckResult {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Property suites behind `verify <suite>`; fixed seeds, desk-scale
// Monte Carlo sizes.
std::vector<CheckResult> verify_sampler();
std::vector<CheckResult> verify_stein();
std::vector<CheckResult> verify_variance();
std::vector<CheckResult> verify_sure();
std::vector<CheckResult> verify_glm();
std::vector<CheckResult> verify_zograd();

// Dispatch by suite name; throws std::invalid_argument for unknown names.
std::vector<CheckResult> run_verify_suite(const std::string& suite);

}  // namespace antcv
