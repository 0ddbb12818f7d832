#pragma once

// Exact flows of the pieces of the split vector field
//   Z = X_T + X_V + epsilon * Y,
// with X_T the kinetic drift, X_V the potential kick and Y the linear
// Rayleigh decay on each cotangent fiber. Time t may be negative (t < 0 runs
// the dissipation backwards, which composition methods need).

#include "rayleigh/core.hpp"

namespace rayleigh {

enum class FlowKind { Kinetic, Potential, Dissipation, PotentialDissipation };

/// q' = q + t M^{-1} p.
PhaseState flow_kinetic(const RayleighSystem& system, double t,
                        const PhaseState& z);

/// p' = p - t grad V(q).
PhaseState flow_potential(const RayleighSystem& system, double t,
                          const PhaseState& z);

/// p' = exp(-epsilon t C(q)) p with C(q) = D(q) M^{-1}.
PhaseState flow_dissipation(const RayleighSystem& system, double epsilon,
                            double t, const PhaseState& z);

/// Exact solution of the frozen-q affine system p' = -grad V(q) - eps C(q) p:
/// p' = exp(-eps t C) p - t phi_1(-eps t C) grad V(q).
PhaseState flow_potential_dissipation(const RayleighSystem& system,
                                      double epsilon, double t,
                                      const PhaseState& z);

/// Dispatch on `kind`, using system.epsilon for the dissipative flows.
PhaseState flow(FlowKind kind, const RayleighSystem& system, double t,
                const PhaseState& z);

}  // namespace rayleigh
