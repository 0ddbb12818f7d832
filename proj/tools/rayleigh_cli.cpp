// rayleigh-cli: run|converge|phase|releq|compare <config.json> [--out DIR] [--jobs N]

#include <CLI11.hpp>

#include "rayleigh/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving integrators for Rayleigh-damped Hamiltonian systems"};
  app.require_subcommand(1);

  std::string config;
  rayleigh::RunOptions options;
  const std::pair<const char*, const char*> commands[] = {
      {"run", "integrate and write states/energy/momentum/defect/drift CSVs"},
      {"converge", "global-error convergence order per scheme"},
      {"phase", "phase portraits (planar) or x-y projections (elastic)"},
      {"releq", "solve the relative equilibrium and track the drift from it"},
      {"compare", "pairwise energy differences between schemes"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "experiment configuration (JSON)")->required();
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--jobs", options.jobs, "concurrent runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rayleigh::kExitConfig;
  }
  return rayleigh::run_command(app.get_subcommands().front()->get_name(), config, options);
}
