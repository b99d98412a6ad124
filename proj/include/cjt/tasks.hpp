// tasks.hpp — task runners behind the command-line driver

#pragma once

#include "cjt/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace cjt {

inline constexpr const char* version_string = "1.0.0";

struct TaskReport {
  nlohmann::json summary;  // also written to <directory>/summary.json
  std::vector<std::filesystem::path> files;
};

// Validates the config, runs its task and writes artifacts into
// config.output.directory. Solver failures are rethrown as SolverError with
// the task name prepended.
TaskReport run_task(const RunConfig& config);

}  // namespace cjt
