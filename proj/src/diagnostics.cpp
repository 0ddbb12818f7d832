#include "rayleigh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rayleigh {

SeriesReport energy_series(const RayleighSystem& system, const Trajectory& traj) {
  SeriesReport out{.label = "H"};
  out.times.reserve(traj.size());
  out.values.reserve(traj.size());
  for (const auto& z : traj.states) {
    out.times.push_back(z.t);
    out.values.push_back(hamiltonian(system, z));
  }
  return out;
}

SeriesReport momentum_series(const SymmetryGenerator& gen, const Trajectory& traj) {
  SeriesReport out{.label = "J3"};
  out.times.reserve(traj.size());
  out.values.reserve(traj.size());
  for (const auto& z : traj.states) {
    out.times.push_back(z.t);
    out.values.push_back(momentum(gen, z));
  }
  return out;
}

SeriesReport dissipation_defect(const RayleighSystem& system, const Scheme& scheme,
                                const Trajectory& traj) {
  if (traj.size() < 2) throw InvalidArgument("defect needs at least two states");
  const double h = traj.step_size;
  SeriesReport out{.label = "defect"};
  out.times.reserve(traj.size() - 1);
  out.values.reserve(traj.size() - 1);
  double rate_left = rayleigh_rate(system, traj.states[0]);
  double energy_left = hamiltonian(system, traj.states[0]);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const PhaseState& left = traj.states[k];
    const PhaseState& right = traj.states[k + 1];
    const PhaseState mid = step(scheme, system, 0.5 * h, left);
    const double rate_right = rayleigh_rate(system, right);
    const double energy_right = hamiltonian(system, right);
    const double quadrature =
        h / 6.0 * (rate_left + 4.0 * rayleigh_rate(system, mid) + rate_right);
    out.times.push_back(left.t);
    out.values.push_back(energy_right - energy_left + system.epsilon * quadrature);
    rate_left = rate_right;
    energy_left = energy_right;
  }
  return out;
}

SeriesReport dissipation_defect(const RayleighSystem& system, const Trajectory& traj) {
  return dissipation_defect(system, Scheme::parse(traj.scheme), traj);
}

Trajectory reference_trajectory(const RayleighSystem& system, const PhaseState& z0,
                                double h_out, std::size_t n_steps, int refinement) {
  if (refinement < 100) throw InvalidArgument("reference refinement must be >= 100");
  return integrate(Scheme::substeps(Scheme::three_term(), refinement), system, z0, h_out,
                   n_steps);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("slope fit needs two equal-length series of >= 2 points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit with constant abscissa");
  return sxy / sxx;
}

std::size_t step_count(double T, double h) {
  if (!(h > 0.0) || !(T >= 0.0)) throw InvalidArgument("need h > 0 and T >= 0");
  const double ratio = T / h;
  const double rounded = std::round(ratio);
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, rounded);
  if (std::abs(ratio - rounded) > tol) {
    throw InvalidArgument("step size " + std::to_string(h) + " does not divide " +
                          std::to_string(T));
  }
  return static_cast<std::size_t>(rounded);
}

namespace {

double state_distance(const PhaseState& a, const PhaseState& b) {
  return std::sqrt((a.q - b.q).squaredNorm() + (a.p - b.p).squaredNorm());
}

}  // namespace

ConvergenceReport convergence_order(const Scheme& scheme, const RayleighSystem& system,
                                    const PhaseState& z0, double T,
                                    std::vector<double> step_sizes, int refinement) {
  if (step_sizes.size() < 3) throw InvalidArgument("convergence needs >= 3 step sizes");
  std::sort(step_sizes.begin(), step_sizes.end(), std::greater<>());
  if (std::adjacent_find(step_sizes.begin(), step_sizes.end()) != step_sizes.end()) {
    throw InvalidArgument("step sizes must be distinct");
  }
  for (double h : step_sizes) step_count(T, h);

  const double h_min = step_sizes.back();
  PhaseState exact;
  try {
    exact = reference_trajectory(system, z0, h_min, step_count(T, h_min), refinement)
                .states.back();
  } catch (const Error& e) {
    throw SolverError(std::string("reference run failed: ") + e.what());
  }

  ConvergenceReport report;
  std::vector<double> log_h, log_err;
  for (double h : step_sizes) {
    PhaseState z;
    try {
      z = integrate(scheme, system, z0, h, step_count(T, h)).states.back();
    } catch (const Error& e) {
      throw SolverError("run with h = " + std::to_string(h) + " failed: " + e.what());
    }
    const double err = state_distance(z, exact);
    if (!(err > 0.0) || !std::isfinite(err)) {
      throw SolverError("global error is not positive and finite");
    }
    report.step_sizes.push_back(h);
    report.global_errors.push_back(err);
    log_h.push_back(std::log(h));
    log_err.push_back(std::log(err));
  }
  report.fitted_slope = least_squares_slope(log_h, log_err);
  return report;
}

namespace {

struct Balance {
  Eigen::Vector2d residual;
  Eigen::Matrix2d jacobian;
};

Balance reduced_balance(const ElasticPendulumParams& P, double mu, double rho, double z) {
  const double r2 = rho * rho + z * z;
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  const double s = P.ell / r - 1.0;
  Balance b;
  b.residual << P.k * rho * s + mu * mu / (P.m * rho * rho * rho),
      P.k * z * s - P.m * P.gravity_magnitude();
  // d(ell/r)/d rho = -ell rho / r^3, d(ell/r)/dz = -ell z / r^3
  b.jacobian << P.k * s - P.k * P.ell * rho * rho / r3 -
                    3.0 * mu * mu / (P.m * rho * rho * rho * rho),
      -P.k * P.ell * rho * z / r3, -P.k * P.ell * rho * z / r3,
      P.k * s - P.k * P.ell * z * z / r3;
  return b;
}

}  // namespace

EquilibriumSolution solve_relative_equilibrium(const ElasticPendulumParams& params,
                                               double mu, NewtonOptions options) {
  params.validate();
  if (mu == 0.0) {
    throw DegenerateMomentum("mu = 0 has only the hanging equilibrium on the axis");
  }
  double rho = params.ell;
  double z = -0.5 * params.ell;
  Balance bal = reduced_balance(params, mu, rho, z);
  double norm = bal.residual.norm();
  EquilibriumSolution sol{.mu = mu};
  sol.residual_history.push_back(norm);
  for (int it = 1; it <= options.max_iterations; ++it) {
    if (norm <= options.tolerance) break;
    const Eigen::Vector2d delta = bal.jacobian.partialPivLu().solve(-bal.residual);
    double lambda = 1.0;
    double rho_new = rho, z_new = z;
    Balance trial;
    double trial_norm = std::numeric_limits<double>::infinity();
    for (int halvings = 0; halvings < 30; ++halvings, lambda *= 0.5) {
      rho_new = rho + lambda * delta(0);
      z_new = z + lambda * delta(1);
      if (!(rho_new > 0.0)) continue;
      trial = reduced_balance(params, mu, rho_new, z_new);
      trial_norm = trial.residual.norm();
      if (trial_norm < norm || trial_norm <= options.tolerance) break;
    }
    if (!std::isfinite(trial_norm)) break;
    rho = rho_new;
    z = z_new;
    bal = trial;
    norm = trial_norm;
    sol.iterations = it;
    sol.residual_history.push_back(norm);
  }
  sol.rho = rho;
  sol.z = z;
  sol.residual_norm = norm;
  if (!(norm <= options.tolerance)) {
    throw NoConvergence("relative equilibrium: residual " + std::to_string(norm) +
                        " after " + std::to_string(sol.iterations) + " iterations");
  }
  return sol;
}

PhaseState relative_equilibrium_state(const EquilibriumSolution& eq) {
  PhaseState z{Vector::Zero(3), Vector::Zero(3), 0.0};
  z.q << 0.0, eq.rho, eq.z;
  z.p << -eq.mu / eq.rho, 0.0, 0.0;
  return z;
}

SeriesReport equilibrium_drift(const ElasticPendulumParams&, const Trajectory& traj,
                               const EquilibriumSolution& eq) {
  SeriesReport out{.label = "dist"};
  out.times.reserve(traj.size());
  out.values.reserve(traj.size());
  for (const auto& state : traj.states) {
    const ReducedState s = to_cylindrical(state);
    const double d_rho = s.rho - eq.rho;
    const double d_z = s.z - eq.z;
    out.times.push_back(state.t);
    out.values.push_back(
        std::sqrt(d_rho * d_rho + d_z * d_z + s.p_rho * s.p_rho + s.p_z * s.p_z));
  }
  return out;
}

double plateau_value(const SeriesReport& series) {
  if (series.values.empty()) throw InvalidArgument("plateau of an empty series");
  const std::size_t n = series.values.size();
  const std::size_t start = n - std::max<std::size_t>(1, n / 4);
  std::vector<double> tail(series.values.begin() + static_cast<std::ptrdiff_t>(start),
                           series.values.end());
  const std::size_t mid = tail.size() / 2;
  std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(mid), tail.end());
  if (tail.size() % 2 == 1) return tail[mid];
  const double upper = tail[mid];
  const double lower = *std::max_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

void check_same_grid(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw GridMismatch("trajectories have " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()) + " states");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ta = a.states[k].t, tb = b.states[k].t;
    if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::abs(ta))) {
      throw GridMismatch("time grids differ at index " + std::to_string(k));
    }
  }
}

}  // namespace

SeriesReport energy_difference(const RayleighSystem& system, const Trajectory& a,
                               const Trajectory& b) {
  check_same_grid(a, b);
  SeriesReport out{.label = a.scheme + "-" + b.scheme};
  out.times.reserve(a.size());
  out.values.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.times.push_back(a.states[k].t);
    out.values.push_back(
        std::abs(hamiltonian(system, a.states[k]) - hamiltonian(system, b.states[k])));
  }
  return out;
}

double secular_energy_slope(const RayleighSystem& system, const Trajectory& traj,
                            const Trajectory& reference, double fit_from) {
  if (!(fit_from >= 0.0 && fit_from < 1.0)) {
    throw InvalidArgument("fit window start must lie in [0, 1)");
  }
  const SeriesReport diff = energy_difference(system, traj, reference);
  const std::size_t n = diff.times.size();
  if (n < 4) throw InvalidArgument("secular slope needs at least four states");
  const std::size_t start =
      std::min(n - 2, static_cast<std::size_t>(fit_from * static_cast<double>(n)));
  return least_squares_slope(std::span(diff.times).subspan(start),
                             std::span(diff.values).subspan(start));
}

std::vector<double> windowed_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw InvalidArgument("window must be positive");
  std::vector<double> out;
  if (values.size() < window) return out;
  out.reserve(values.size() - window + 1);
  // Summed afresh per window, no running sum.
  for (std::size_t k = 0; k + window <= values.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < window; ++i) sum += values[k + i];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

double inner_hole_radius(const Trajectory& traj, double t_from) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : traj.states) {
    if (z.t > t_from) best = std::min(best, std::sqrt(z.q.squaredNorm() + z.p.squaredNorm()));
  }
  if (!std::isfinite(best)) throw InvalidArgument("no states after t_from");
  return best;
}

}  // namespace rayleigh
