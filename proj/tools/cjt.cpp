// cjt — command-line driver for the cooperative Jahn-Teller simulator.
//
//   cjt <task> [--config file.json] [--preset name] [--out dir] [--workers k]
//
// A preset supplies a complete configuration; a config file is applied on top
// of it as a JSON merge patch (or stands alone without --preset). Exit codes:
// 0 success, 2 configuration error, 3 solver failure, 1 anything else.

#include "cjt/config.hpp"
#include "cjt/errors.hpp"
#include "cjt/tasks.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative Jahn-Teller chain simulator"};
  app.set_version_flag("--version", cjt::version_string);
  std::string task;
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  int workers = 0;
  bool print_config = false;
  bool list_presets = false;
  app.add_option("task", task,
                 "geometry, modes, meanfield, fluctuations, ed, sweep, figure2, figure3 or figure4 "
                 "(defaults to the task named by the configuration)");
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--preset", preset_name, "named parameter set");
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");
  app.add_flag("--list-presets", list_presets, "list preset names and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  if (list_presets) {
    for (const auto& name : cjt::preset_names()) std::cout << name << '\n';
    return 0;
  }

  try {
    if (config_path.empty() && preset_name.empty()) {
      throw cjt::ConfigError("config", "give --config, --preset or both");
    }
    nlohmann::json patch = nlohmann::json::object();
    if (!config_path.empty()) patch = cjt::read_json_file(config_path);
    if (!task.empty()) patch["task"] = task;
    if (!out_dir.empty()) patch["output"]["directory"] = out_dir;
    if (workers > 0) patch["workers"] = workers;
    const cjt::RunConfig config = preset_name.empty()
                                      ? cjt::parse_config(patch)
                                      : cjt::merge_config(cjt::preset(preset_name), patch);
    if (print_config) {
      std::cout << cjt::to_json(config).dump(2) << '\n';
      return 0;
    }
    const cjt::TaskReport report = cjt::run_task(config);
    for (const auto& f : report.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const cjt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const cjt::DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const cjt::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return exit_solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
