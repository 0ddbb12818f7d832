#include "rayleigh/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "rayleigh/output.hpp"

namespace rayleigh {

namespace fs = std::filesystem;
using nlohmann::json;

// --- configuration --------------------------------------------------------

RayleighSystem ExperimentConfig::system() const {
  return problem == ProblemKind::Planar ? planar_pendulum(epsilon)
                                        : elastic_pendulum(elastic, epsilon);
}

PhaseState ExperimentConfig::initial_state() const {
  return PhaseState{initial_q, initial_p, 0.0};
}

std::size_t ExperimentConfig::steps_for(double step) const {
  if (truncate_steps) {
    return static_cast<std::size_t>(std::floor(t_final / step * (1.0 + 1e-15)));
  }
  return step_count(t_final, step);
}

bool ExperimentConfig::wants(const std::string& name) const {
  return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
}

namespace {

double get_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("'") + key + "' is not finite");
  return x;
}

std::vector<double> get_number_list(const json& j, const char* key) {
  const auto& v = j.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) {
        throw ConfigError(std::string("'") + key + "' must contain only numbers");
      }
      out.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(std::string("'") + key + "' must be a number or a list of numbers");
  }
  for (double x : out) {
    if (!std::isfinite(x)) throw ConfigError(std::string("'") + key + "' is not finite");
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const std::set<std::string> kKnownKeys = {
    "problem", "m",       "k",       "ell",       "gravity",    "scheme",
    "epsilon", "h",       "t_final", "initial_q", "initial_p",  "outputs",
    "mu",      "refinement", "truncate_steps"};

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown key '" + key + "'");
  }
  ExperimentConfig cfg;
  try {
    const std::string problem = j.at("problem").get<std::string>();
    if (problem == "planar") {
      cfg.problem = ProblemKind::Planar;
    } else if (problem == "elastic") {
      cfg.problem = ProblemKind::Elastic;
    } else {
      throw ConfigError("problem must be 'planar' or 'elastic'");
    }

    if (j.contains("m")) cfg.elastic.m = get_number(j, "m");
    if (j.contains("k")) cfg.elastic.k = get_number(j, "k");
    if (j.contains("ell")) cfg.elastic.ell = get_number(j, "ell");
    if (j.contains("gravity")) {
      const auto g = get_number_list(j, "gravity");
      if (g.size() != 3) throw ConfigError("'gravity' needs three entries");
      cfg.elastic.gravity = Eigen::Vector3d(g[0], g[1], g[2]);
    }
    if (cfg.problem == ProblemKind::Elastic) {
      try {
        cfg.elastic.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }

    const auto& scheme = j.at("scheme");
    std::vector<std::string> names;
    if (scheme.is_string()) {
      names.push_back(scheme.get<std::string>());
    } else if (scheme.is_array()) {
      for (const auto& s : scheme) names.push_back(s.get<std::string>());
    } else {
      throw ConfigError("'scheme' must be a string or a list of strings");
    }
    if (names.empty()) throw ConfigError("'scheme' is empty");
    for (const auto& name : names) {
      try {
        cfg.schemes.push_back(Scheme::parse(name).name());
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }

    cfg.epsilon = get_number(j, "epsilon");
    if (cfg.epsilon < 0.0) throw ConfigError("'epsilon' must be >= 0");
    cfg.t_final = get_number(j, "t_final");
    if (cfg.t_final < 0.0) throw ConfigError("'t_final' must be >= 0");
    if (j.contains("truncate_steps")) cfg.truncate_steps = j.at("truncate_steps").get<bool>();
    cfg.h = get_number_list(j, "h");
    if (cfg.h.empty()) throw ConfigError("'h' is empty");
    for (double h : cfg.h) {
      if (!(h > 0.0)) throw ConfigError("step sizes must be positive");
      try {
        cfg.steps_for(h);
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string(e.what()) + " (set truncate_steps to use floor)");
      }
    }

    const Eigen::Index dim = cfg.problem == ProblemKind::Planar ? 1 : 3;
    if (j.contains("initial_q") != j.contains("initial_p")) {
      throw ConfigError("'initial_q' and 'initial_p' must be given together");
    }
    if (j.contains("initial_q")) {
      cfg.initial_q = to_vector(get_number_list(j, "initial_q"));
      cfg.initial_p = to_vector(get_number_list(j, "initial_p"));
      if (cfg.initial_q.size() != dim || cfg.initial_p.size() != dim) {
        throw ConfigError("initial data must have dimension " + std::to_string(dim));
      }
      try {
        check_configuration(cfg.system(), cfg.initial_q);
      } catch (const Error& e) {
        throw ConfigError(std::string("initial_q: ") + e.what());
      }
    }
    if (j.contains("mu")) cfg.mu = get_number(j, "mu");
    if (j.contains("refinement")) {
      cfg.refinement = j.at("refinement").get<int>();
      if (cfg.refinement < 100) throw ConfigError("'refinement' must be >= 100");
    }

    if (j.contains("outputs")) {
      for (const auto& o : j.at("outputs")) cfg.outputs.push_back(o.get<std::string>());
    } else {
      cfg.outputs = {"states", "energy"};
    }
    for (const auto& o : cfg.outputs) {
      if (std::find(std::begin(kKnownOutputs), std::end(kKnownOutputs), o) ==
          std::end(kKnownOutputs)) {
        throw ConfigError("unknown output '" + o + "'");
      }
    }
    if (cfg.problem == ProblemKind::Planar && (cfg.wants("momentum") || cfg.wants("drift"))) {
      throw ConfigError("momentum and drift outputs need the elastic problem");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

// --- shared machinery -----------------------------------------------------

namespace {

struct Job {
  std::string scheme;
  double h = 0.0;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items are
// independent; the first failure in index order is rethrown after joining.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Job> all_jobs(const ExperimentConfig& cfg) {
  std::vector<Job> jobs;
  for (const auto& s : cfg.schemes) {
    for (double h : cfg.h) jobs.push_back({s, h});
  }
  return jobs;
}

fs::path stem_dir(const fs::path& config_path, const RunOptions& options) {
  return options.out_dir / config_path.stem();
}

fs::path run_dir(const fs::path& base, const Job& job) {
  return base / job.scheme / output::format_short(job.h);
}

std::vector<std::string> state_header(Eigen::Index n) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) header.push_back("q" + std::to_string(i));
  for (Eigen::Index i = 1; i <= n; ++i) header.push_back("p" + std::to_string(i));
  return header;
}

void write_states(const fs::path& path, const Trajectory& traj) {
  const Eigen::Index n = traj.states.front().q.size();
  output::CsvWriter csv(path, state_header(n));
  std::vector<double> row;
  for (const auto& z : traj.states) {
    row.assign(1, z.t);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(z.q(i));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(z.p(i));
    csv.row(row);
  }
}

void write_series(const fs::path& path, const std::string& time_key, const SeriesReport& s) {
  output::CsvWriter csv(path, {time_key, s.label});
  for (std::size_t k = 0; k < s.values.size(); ++k) csv.row({s.times[k], s.values[k]});
}

output::PlotSeries phase_series(const ExperimentConfig& cfg, const Trajectory& traj,
                                const std::string& label) {
  output::PlotSeries s{.label = label};
  for (const auto& z : traj.states) {
    if (cfg.problem == ProblemKind::Planar) {
      s.x.push_back(z.q(0));
      s.y.push_back(z.p(0));
    } else {
      s.x.push_back(z.q(0));
      s.y.push_back(z.q(1));
    }
  }
  return s;
}

void write_phase(const ExperimentConfig& cfg, const fs::path& dir, const Trajectory& traj,
                 const Job& job, bool csv_too) {
  const bool planar = cfg.problem == ProblemKind::Planar;
  if (csv_too) {
    output::CsvWriter csv(dir / "phase.csv",
                          planar ? std::vector<std::string>{"q", "p"}
                                 : std::vector<std::string>{"x", "y"});
    for (const auto& z : traj.states) {
      csv.row(planar ? std::vector<double>{z.q(0), z.p(0)}
                     : std::vector<double>{z.q(0), z.q(1)});
    }
  }
  const std::string label = job.scheme + " h=" + output::format_short(job.h);
  output::PlotSpec spec{.title = (planar ? "Phase portrait " : "x-y projection ") + label,
                        .x_label = planar ? "q" : "x",
                        .y_label = planar ? "p" : "y"};
  output::write_text(dir / "phase.svg",
                     output::render_svg(spec, {phase_series(cfg, traj, label)}));
}

void write_run_json(const fs::path& dir, const ExperimentConfig& cfg, const Job& job,
                    std::size_t n_steps, double wall_time) {
  json meta = {{"scheme", job.scheme},
               {"h", job.h},
               {"epsilon", cfg.epsilon},
               {"n_steps", n_steps},
               {"wall_time", wall_time}};
  output::write_text(dir / "run.json", meta.dump(2) + "\n");
}

void write_index(const fs::path& base, const std::string& command,
                 const std::vector<fs::path>& dirs) {
  json index = {{"command", command}, {"runs", json::array()}};
  for (const auto& d : dirs) index["runs"].push_back(fs::relative(d, base).generic_string());
  output::write_text(base / "index.json", index.dump(2) + "\n");
}

void require_initial_data(const ExperimentConfig& cfg) {
  if (cfg.initial_q.size() == 0) throw ConfigError("'initial_q'/'initial_p' are required");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

EquilibriumSolution equilibrium_for(const ExperimentConfig& cfg) {
  const double mu = cfg.mu ? *cfg.mu : momentum(rotation_about_e3(), cfg.initial_state());
  try {
    return solve_relative_equilibrium(cfg.elastic, mu);
  } catch (const DegenerateMomentum& e) {
    throw ConfigError(e.what());
  }
}

// Wraps a subcommand body with the exit-code policy.
template <typename Body>
int guarded(const fs::path& config_path, Body&& body) {
  try {
    const ExperimentConfig cfg = load_config(config_path);
    body(cfg);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

// --- subcommands ----------------------------------------------------------

int cmd_run(const fs::path& config_path, const RunOptions& options) {
  return guarded(config_path, [&](const ExperimentConfig& cfg) {
    require_initial_data(cfg);
    std::optional<EquilibriumSolution> eq;
    if (cfg.wants("drift")) eq = equilibrium_for(cfg);
    const RayleighSystem system = cfg.system();
    const PhaseState z0 = cfg.initial_state();
    const fs::path base = stem_dir(config_path, options);
    const auto jobs = all_jobs(cfg);
    std::vector<fs::path> dirs(jobs.size());

    parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
      const Job& job = jobs[i];
      const auto start = std::chrono::steady_clock::now();
      const Scheme scheme = Scheme::parse(job.scheme);
      const std::size_t n = cfg.steps_for(job.h);
      const Trajectory traj = integrate(scheme, system, z0, job.h, n);
      const fs::path dir = run_dir(base, job);
      dirs[i] = dir;

      if (cfg.wants("states")) write_states(dir / "states.csv", traj);
      std::optional<Trajectory> ref;
      if (cfg.wants("energy") || cfg.wants("energy_svg")) {
        ref = reference_trajectory(system, z0, job.h, n, cfg.refinement);
      }
      const SeriesReport energy = energy_series(system, traj);
      if (cfg.wants("energy")) {
        const SeriesReport ref_energy = energy_series(system, *ref);
        output::CsvWriter csv(dir / "energy.csv", {"t", "H", "H_ref", "abs_err"});
        for (std::size_t k = 0; k < energy.values.size(); ++k) {
          csv.row({energy.times[k], energy.values[k], ref_energy.values[k],
                   std::abs(energy.values[k] - ref_energy.values[k])});
        }
      }
      if (cfg.wants("momentum")) {
        write_series(dir / "momentum.csv", "t", momentum_series(rotation_about_e3(), traj));
      }
      if (cfg.wants("defect")) {
        output::CsvWriter csv(dir / "defect.csv", {"k", "defect"});
        if (traj.size() >= 2) {
          const SeriesReport d = dissipation_defect(system, scheme, traj);
          for (std::size_t k = 0; k < d.values.size(); ++k) {
            csv.row(static_cast<long long>(k), {d.values[k]});
          }
        }
      }
      if (cfg.wants("drift")) {
        write_series(dir / "drift.csv", "t", equilibrium_drift(cfg.elastic, traj, *eq));
      }
      if (cfg.wants("phase_svg")) write_phase(cfg, dir, traj, job, false);
      if (cfg.wants("energy_svg")) {
        std::vector<output::PlotSeries> series{{job.scheme, energy.times, energy.values}};
        const SeriesReport ref_energy = energy_series(system, *ref);
        series.push_back({"reference", ref_energy.times, ref_energy.values});
        output::write_text(dir / "energy.svg",
                           output::render_svg({.title = "Energy " + job.scheme + " h=" +
                                                        output::format_short(job.h),
                                               .x_label = "t",
                                               .y_label = "H"},
                                              series));
      }
      write_run_json(dir, cfg, job, n, seconds_since(start));
    });
    write_index(base, "run", dirs);
  });
}

int cmd_converge(const fs::path& config_path, const RunOptions& options) {
  return guarded(config_path, [&](const ExperimentConfig& cfg) {
    require_initial_data(cfg);
    if (cfg.h.size() < 3) throw ConfigError("converge needs at least three step sizes");
    if (cfg.truncate_steps) throw ConfigError("converge needs step sizes dividing t_final");
    const RayleighSystem system = cfg.system();
    const PhaseState z0 = cfg.initial_state();
    const fs::path base = stem_dir(config_path, options);
    std::vector<ConvergenceReport> reports(cfg.schemes.size());
    parallel_for(cfg.schemes.size(), options.jobs, [&](std::size_t i) {
      reports[i] = convergence_order(Scheme::parse(cfg.schemes[i]), system, z0, cfg.t_final,
                                     cfg.h, cfg.refinement);
    });
    std::vector<fs::path> dirs;
    std::vector<output::PlotSeries> all;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& rep = reports[i];
      const fs::path dir = base / cfg.schemes[i];
      dirs.push_back(dir);
      output::CsvWriter csv(dir / "convergence.csv", {"h", "error", "slope"});
      for (std::size_t k = 0; k < rep.step_sizes.size(); ++k) {
        csv.row({rep.step_sizes[k], rep.global_errors[k], rep.fitted_slope});
      }
      output::PlotSeries s{cfg.schemes[i] + " slope " + std::to_string(rep.fitted_slope),
                           rep.step_sizes, rep.global_errors};
      output::write_text(dir / "convergence.svg",
                         output::render_svg({.title = "Convergence " + cfg.schemes[i],
                                             .x_label = "h",
                                             .y_label = "error",
                                             .log_x = true,
                                             .log_y = true},
                                            {s}));
      all.push_back(std::move(s));
    }
    output::write_text(base / "convergence.svg",
                       output::render_svg({.title = "Global error at t_final",
                                           .x_label = "h",
                                           .y_label = "error",
                                           .log_x = true,
                                           .log_y = true},
                                          all));
    write_index(base, "converge", dirs);
  });
}

int cmd_phase(const fs::path& config_path, const RunOptions& options) {
  return guarded(config_path, [&](const ExperimentConfig& cfg) {
    require_initial_data(cfg);
    const RayleighSystem system = cfg.system();
    const PhaseState z0 = cfg.initial_state();
    const fs::path base = stem_dir(config_path, options);
    const auto jobs = all_jobs(cfg);
    std::vector<fs::path> dirs(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
      const Job& job = jobs[i];
      const auto start = std::chrono::steady_clock::now();
      const std::size_t n = cfg.steps_for(job.h);
      const Trajectory traj = integrate(Scheme::parse(job.scheme), system, z0, job.h, n);
      dirs[i] = run_dir(base, job);
      write_phase(cfg, dirs[i], traj, job, true);
      if (cfg.wants("states")) write_states(dirs[i] / "states.csv", traj);
      write_run_json(dirs[i], cfg, job, n, seconds_since(start));
    });
    write_index(base, "phase", dirs);
  });
}

int cmd_releq(const fs::path& config_path, const RunOptions& options) {
  return guarded(config_path, [&](const ExperimentConfig& cfg) {
    if (cfg.problem != ProblemKind::Elastic) throw ConfigError("releq needs the elastic problem");
    if (!cfg.mu && cfg.initial_q.size() == 0) {
      throw ConfigError("releq needs 'mu' or initial data");
    }
    const EquilibriumSolution eq = equilibrium_for(cfg);
    const PhaseState z0 = relative_equilibrium_state(eq);
    const RayleighSystem system = cfg.system();
    const fs::path base = stem_dir(config_path, options);

    json summary = {{"rho", eq.rho},
                    {"z", eq.z},
                    {"mu", eq.mu},
                    {"residual_norm", eq.residual_norm},
                    {"iterations", eq.iterations},
                    {"initial_q", {z0.q(0), z0.q(1), z0.q(2)}},
                    {"initial_p", {z0.p(0), z0.p(1), z0.p(2)}}};
    output::write_text(base / "equilibrium.json", summary.dump(2) + "\n");

    const auto jobs = all_jobs(cfg);
    std::vector<fs::path> dirs(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
      const Job& job = jobs[i];
      const auto start = std::chrono::steady_clock::now();
      const std::size_t n = cfg.steps_for(job.h);
      const Trajectory traj = integrate(Scheme::parse(job.scheme), system, z0, job.h, n);
      dirs[i] = run_dir(base, job);
      const SeriesReport drift = equilibrium_drift(cfg.elastic, traj, eq);
      write_series(dirs[i] / "drift.csv", "t", drift);
      output::write_text(
          dirs[i] / "drift.svg",
          output::render_svg({.title = "Distance from relative equilibrium " + job.scheme +
                                       " h=" + output::format_short(job.h),
                              .x_label = "t",
                              .y_label = "dist"},
                             {{job.scheme, drift.times, drift.values}}));
      if (cfg.wants("states")) write_states(dirs[i] / "states.csv", traj);
      if (cfg.wants("phase_svg")) write_phase(cfg, dirs[i], traj, job, false);
      write_run_json(dirs[i], cfg, job, n, seconds_since(start));
    });
    write_index(base, "releq", dirs);
  });
}

int cmd_compare(const fs::path& config_path, const RunOptions& options) {
  return guarded(config_path, [&](const ExperimentConfig& cfg) {
    require_initial_data(cfg);
    if (cfg.schemes.size() < 2) throw ConfigError("compare needs at least two schemes");
    const RayleighSystem system = cfg.system();
    const PhaseState z0 = cfg.initial_state();
    const fs::path base = stem_dir(config_path, options);
    const auto jobs = all_jobs(cfg);
    std::vector<Trajectory> trajs(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
      trajs[i] = integrate(Scheme::parse(jobs[i].scheme), system, z0, jobs[i].h,
                           cfg.steps_for(jobs[i].h));
    });

    std::vector<fs::path> dirs;
    const std::size_t ns = cfg.schemes.size();
    for (std::size_t hi = 0; hi < cfg.h.size(); ++hi) {
      // jobs are scheme-major: index = scheme * |h| + hi
      const auto traj_of = [&](std::size_t s) -> const Trajectory& {
        return trajs[s * cfg.h.size() + hi];
      };
      std::vector<SeriesReport> diffs;
      std::vector<std::string> header{"t"};
      for (std::size_t a = 0; a < ns; ++a) {
        for (std::size_t b = a + 1; b < ns; ++b) {
          diffs.push_back(energy_difference(system, traj_of(a), traj_of(b)));
          header.push_back(cfg.schemes[a] + "-" + cfg.schemes[b]);
        }
      }
      const fs::path dir = base / "compare" / output::format_short(cfg.h[hi]);
      dirs.push_back(dir);
      output::CsvWriter csv(dir / "compare.csv", header);
      std::vector<double> row;
      const std::size_t n = traj_of(0).size();
      for (std::size_t k = 0; k < n; ++k) {
        row.assign(1, traj_of(0).states[k].t);
        for (const auto& d : diffs) row.push_back(d.values[k]);
        csv.row(row);
      }
      std::vector<output::PlotSeries> series;
      for (std::size_t i = 0; i < diffs.size(); ++i) {
        series.push_back({header[i + 1], diffs[i].times, diffs[i].values});
      }
      output::write_text(dir / "compare.svg",
                         output::render_svg({.title = "Energy difference between methods h=" +
                                                      output::format_short(cfg.h[hi]),
                                             .x_label = "t",
                                             .y_label = "|dH|",
                                             .log_y = true},
                                            series));
    }
    write_index(base, "compare", dirs);
  });
}

int run_command(const std::string& command, const fs::path& config_path,
                const RunOptions& options) {
  if (command == "run") return cmd_run(config_path, options);
  if (command == "converge") return cmd_converge(config_path, options);
  if (command == "phase") return cmd_phase(config_path, options);
  if (command == "releq") return cmd_releq(config_path, options);
  if (command == "compare") return cmd_compare(config_path, options);
  std::cerr << "unknown command '" << command << "'\n";
  return kExitConfig;
}

}  // namespace rayleigh
