#pragma once

// Benchmark systems: the damped planar pendulum and the elastic spherical
// pendulum with Rayleigh damping along the spring, plus the cylindrical
// reduction of the latter used for relative-equilibrium diagnostics.

#include <array>

#include "rayleigh/core.hpp"

namespace rayleigh {

/// M = 1, D = 1, V(q) = 1 - cos q. Negative epsilon throws InvalidArgument.
RayleighSystem planar_pendulum(double epsilon = 0.0);

struct ElasticPendulumParams {
  double m = 1.0;
  double k = 1.0;
  double ell = 1.0;
  Eigen::Vector3d gravity{0.0, 0.0, -1.0};

  /// g_mag with gravity = (0, 0, -g_mag).
  double gravity_magnitude() const { return -gravity.z(); }
  /// Throws InvalidArgument unless m, k, ell > 0 and gravity is finite.
  void validate() const;
};

/// M = m I, D(q) = q q^T / |q|^2, V(q) = k/2 (ell - |q|)^2 - m q^T gravity,
/// singular radius 1e-9.
RayleighSystem elastic_pendulum(const ElasticPendulumParams& params,
                                double epsilon = 0.0);

/// xi_Q(q) = e_3 x q; its momentum is J_3 = (q x p)_3.
SymmetryGenerator rotation_about_e3();

/// Point in the reduced space (rho, z, p_rho, p_z) at momentum value mu.
struct ReducedState {
  double rho = 1.0;
  double z = 0.0;
  double p_rho = 0.0;
  double p_z = 0.0;
  double mu = 0.0;
};

/// (rho', z', p_rho', p_z').
using ReducedTangent = std::array<double, 4>;

/// Reduced cylindrical equations with p_phi replaced by mu. The centrifugal
/// term enters p_rho' as +mu^2 / (m rho^3). Throws DomainError if rho <= 0.
ReducedTangent reduced_vector_field(const ElasticPendulumParams& params,
                                    double mu, const ReducedState& s,
                                    double epsilon);

/// Cartesian (q, p) -> (rho, z, p_rho, p_z) with mu = p_phi = J_3.
/// Throws DomainError on the symmetry axis.
ReducedState to_cylindrical(const PhaseState& z);

}  // namespace rayleigh
