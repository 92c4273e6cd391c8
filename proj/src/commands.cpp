#include "antcv/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "antcv/config.hpp"
#include "antcv/harness.hpp"
#include "antcv/verify.hpp"

namespace antcv {

int cmd_run(const std::string& config_path, const RunOverrides& overrides) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.workers) config.workers = *overrides.workers;
  if (overrides.output) config.output = *overrides.output;

  try {
    std::vector<MseReport> reports =
        run_mse_grid(config.scenario_spec(), config.methods,
                     config.replications, config.workers, config.oracle_n_mc);

    if (!config.output.empty()) {
      std::ofstream out(config.output);
      if (!out) {
        std::cerr << "error: cannot write " << config.output << "\n";
        return 1;
      }
      write_csv(reports, out);
    } else {
      write_csv(reports, std::cout);
    }

    // ranked summary, best method first
    std::vector<const MseReport*> ranked;
    for (const auto& r : reports) ranked.push_back(&r);
    std::sort(ranked.begin(), ranked.end(),
              [](const MseReport* a, const MseReport* b) {
                return a->mse < b->mse;
              });
    std::printf("%-4s %-12s %8s %4s %12s %12s %8s\n", "rank", "method",
                "alpha", "k", "mse", "stderr", "dropped");
    int rank = 1;
    for (const auto* r : ranked)
      std::printf("%-4d %-12s %8g %4d %12.6g %12.3g %8d\n", rank++,
                  r->method.c_str(), r->alpha, r->k, r->mse, r->mc_stderr,
                  r->dropped);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::string& suite) {
  std::vector<CheckResult> results;
  try {
    results = run_verify_suite(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("[%s] %s: observed %.6g, expected %.6g, tolerance %.3g\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.observed,
                r.expected, r.tolerance);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace antcv
