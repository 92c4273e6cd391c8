#include <CLI11.hpp>
#include <cstdlib>
#include <optional>
#include <string>

#include "antcv/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Randomized cross-validation experiment driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output;
  auto* run = app.add_subcommand("run", "Run an MSE grid from a config file");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--workers", workers,
                  "Override the worker count (default also via ANTCV_WORKERS)");
  run->add_option("--out", output, "Override the CSV output path");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a property-check suite");
  verify
      ->add_option("suite", suite,
                   "One of: sampler, stein, variance, sure, glm, zograd")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    antcv::RunOverrides overrides;
    overrides.seed = seed;
    overrides.output = output;
    if (workers) {
      overrides.workers = workers;
    } else if (const char* env = std::getenv("ANTCV_WORKERS")) {
      overrides.workers = std::atoi(env);
    }
    return antcv::cmd_run(config_path, overrides);
  }
  return antcv::cmd_verify(suite);
}
