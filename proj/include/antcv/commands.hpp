#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace antcv {

// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output;
};

int cmd_run(const std::string& config_path, const RunOverrides& overrides = {});
int cmd_verify(const std::string& suite);

}  // namespace antcv
