#pragma once

// Experiment harness behind the command-line tool: JSON configuration,
// batch execution over (scheme, h) and CSV/SVG emission.
//
// Output layout: <out>/<config-stem>/<scheme>/<h>/{states,energy,...}.csv
// plus run.json per run and index.json per invocation.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rayleigh/diagnostics.hpp"

namespace rayleigh {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ProblemKind { Planar, Elastic };

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Planar;
  ElasticPendulumParams elastic;
  std::vector<std::string> schemes;  ///< canonical Scheme::name() strings
  double epsilon = 0.0;
  std::vector<double> h;
  double t_final = 0.0;
  Vector initial_q;
  Vector initial_p;
  std::vector<std::string> outputs;
  /// Momentum value for releq; if absent, J_3 of the initial data is used.
  std::optional<double> mu;
  int refinement = kDefaultRefinement;
  /// Use floor(t_final / h) steps instead of rejecting non-dividing h.
  bool truncate_steps = false;

  RayleighSystem system() const;
  PhaseState initial_state() const;
  std::size_t steps_for(double step) const;
  bool wants(const std::string& output) const;
};

inline constexpr const char* kKnownOutputs[] = {"states", "energy",   "momentum", "defect",
                                                "drift",  "phase_svg", "energy_svg"};

/// Validates everything a run needs; throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int jobs = 1;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

/// Subcommands. Each loads the config, validates it completely before writing
/// anything and returns an exit code; diagnostics go to stderr.
int cmd_run(const std::filesystem::path& config_path, const RunOptions& options);
int cmd_converge(const std::filesystem::path& config_path, const RunOptions& options);
int cmd_phase(const std::filesystem::path& config_path, const RunOptions& options);
int cmd_releq(const std::filesystem::path& config_path, const RunOptions& options);
int cmd_compare(const std::filesystem::path& config_path, const RunOptions& options);

/// Dispatch by subcommand name ("run", "converge", ...); unknown names give 2.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const RunOptions& options);

}  // namespace rayleigh
