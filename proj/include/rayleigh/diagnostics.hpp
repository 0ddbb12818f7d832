#pragma once

// Post-hoc analyses of trajectories: energy and momentum series, the
// discrete energy-balance defect, convergence orders against a fine-step
// reference, and relative-equilibrium solving and drift for the elastic
// pendulum.

#include <span>
#include <string>
#include <vector>

#include "rayleigh/core.hpp"
#include "rayleigh/integrators.hpp"
#include "rayleigh/problems.hpp"

namespace rayleigh {

struct SeriesReport {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;
};

struct ConvergenceReport {
  std::vector<double> step_sizes;     ///< strictly decreasing
  std::vector<double> global_errors;  ///< positive
  double fitted_slope = 0.0;
};

struct EquilibriumSolution {
  double rho = 0.0;
  double z = 0.0;
  double mu = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;  ///< residual norm per iterate
};

SeriesReport energy_series(const RayleighSystem& system, const Trajectory& traj);

SeriesReport momentum_series(const SymmetryGenerator& gen, const Trajectory& traj);

/// defect_k = H(z_{k+1}) - H(z_k) + eps * Q_k, with Q_k the Simpson rule for
/// the integral of d_q(p#, p#) over the step, using a midpoint state
/// regenerated by a half step of `scheme` from z_k. times[k] = t_k.
SeriesReport dissipation_defect(const RayleighSystem& system, const Scheme& scheme,
                                const Trajectory& traj);
/// As above with the scheme recovered from traj.scheme.
SeriesReport dissipation_defect(const RayleighSystem& system, const Trajectory& traj);

inline constexpr int kDefaultRefinement = 1000;

/// SUB(3S,refinement): 3S at inner step h_out / refinement, sampled on the
/// h_out grid.
/// Throws InvalidArgument for refinement < 100.
Trajectory reference_trajectory(const RayleighSystem& system, const PhaseState& z0,
                                double h_out, std::size_t n_steps,
                                int refinement = kDefaultRefinement);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Global error at time T (Euclidean norm over (q, p)) for each step size,
/// against a reference run at the finest step size. Needs >= 3 distinct step
/// sizes (any order; the report is sorted decreasing), each dividing T. Throws InvalidArgument on bad input and SolverError when a
/// run fails.
ConvergenceReport convergence_order(const Scheme& scheme, const RayleighSystem& system,
                                    const PhaseState& z0, double T,
                                    std::vector<double> step_sizes,
                                    int refinement = kDefaultRefinement);

/// Number of steps of size h in T; throws InvalidArgument unless T / h is an
/// integer to within a few ulps.
std::size_t step_count(double T, double h);

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
};

/// Newton iteration on the reduced balance
///   k rho (ell/r - 1) + mu^2 / (m rho^3) = 0,  k z (ell/r - 1) - m g = 0
/// from (rho, z) = (ell, -ell/2), halving steps that increase the residual
/// or would make rho <= 0. Throws DegenerateMomentum for mu = 0 and NoConvergence
/// when the tolerance is not met.
EquilibriumSolution solve_relative_equilibrium(const ElasticPendulumParams& params,
                                               double mu, NewtonOptions options = {});

/// Cartesian point of the relative equilibrium placed on the y axis:
/// q = (0, rho, z), p = (-mu / rho, 0, 0), so that J_3 = mu.
PhaseState relative_equilibrium_state(const EquilibriumSolution& eq);

/// Distance in (rho, z, p_rho, p_z) from (eq.rho, eq.z, 0, 0) along traj.
SeriesReport equilibrium_drift(const ElasticPendulumParams& params,
                               const Trajectory& traj, const EquilibriumSolution& eq);

/// Median of the final quarter of the series.
double plateau_value(const SeriesReport& series);

/// Least-squares slope of |H(z_k) - H(ref_k)| against t over the states from
/// index floor(fit_from * n) on; the default fits the second half of the
/// horizon, fit_from = 0 the whole run. Throws GridMismatch unless the grids
/// agree.
double secular_energy_slope(const RayleighSystem& system, const Trajectory& traj,
                            const Trajectory& reference, double fit_from = 0.5);

/// Moving average of `values` with `window` samples; entry k covers
/// values[k .. k + window - 1].
std::vector<double> windowed_average(std::span<const double> values, std::size_t window);

/// |H(a_k) - H(b_k)| on a shared grid. Throws GridMismatch otherwise.
SeriesReport energy_difference(const RayleighSystem& system, const Trajectory& a,
                               const Trajectory& b);

/// min_k sqrt(q_k^2 + p_k^2) over states with t > t_from (planar pendulum:
/// radius of the hole in the phase portrait). Throws InvalidArgument if no
/// state lies after t_from.
double inner_hole_radius(const Trajectory& traj, double t_from);

}  // namespace rayleigh
