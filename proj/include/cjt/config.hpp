// config.hpp — run configuration schema, presets and JSON (de)serialization

#pragma once

#include "cjt/ed.hpp"
#include "cjt/gaussian.hpp"
#include "cjt/mean_field.hpp"
#include "cjt/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cjt {

enum class Task { geometry, modes, meanfield, fluctuations, ed, sweep, figure2, figure3, figure4 };

std::string to_string(Task task);
Task parse_task(const std::string& name);  // throws ConfigError("task", ...)

struct SweepSpec {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;

  std::vector<double> grid() const;
  bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> formats{"csv"};  // subset of {"csv", "json"}

  bool has(const std::string& format) const;
  bool operator==(const OutputSpec&) const = default;
};

struct EdSettings {
  EdConfig config;
  std::vector<int> cutoffs;  // convergence scan when non-empty
  bool dump_eigenvector = false;

  bool operator==(const EdSettings&) const = default;
};

struct SizeScan {
  std::vector<int> sizes{10, 20, 40};
  double probe_g = 0.3;

  bool operator==(const SizeScan&) const = default;
};

struct RunConfig {
  static constexpr int schema_version = 1;

  Task task = Task::meanfield;
  std::variant<ModelParams, LabParams> model = ModelParams{};
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  MeanFieldOptions mean_field;
  GaussianOptions gaussian;
  FluctuationBasis fluctuation_basis = FluctuationBasis::modes;
  EdSettings ed;
  SizeScan size_scan;
  int workers = 1;

  // Throws ConfigError with a dotted field path.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

// Strict parsing: unknown keys and wrong types are ConfigErrors naming the path.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

// Named parameter sets: fig2_homogeneous, fig2_coulomb, fig3, fig4, ca40.
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

// RFC 7386 merge patch of `patch` over `base`, then parse.
RunConfig merge_config(const RunConfig& base, const nlohmann::json& patch);

nlohmann::json read_json_file(const std::string& path);

struct ResolvedModel {
  ModelParams params;
  std::optional<LabConversion> lab;
};

ResolvedModel resolve_model(const RunConfig& config);

}  // namespace cjt
