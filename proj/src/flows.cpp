#include "rayleigh/flows.hpp"

#include "rayleigh/matrix_functions.hpp"

namespace rayleigh {

PhaseState flow_kinetic(const RayleighSystem& system, double t,
                        const PhaseState& z) {
  PhaseState out = z;
  out.q = z.q + t * sharp(system, z.p);
  out.t = z.t + t;
  return out;
}

PhaseState flow_potential(const RayleighSystem& system, double t,
                          const PhaseState& z) {
  check_configuration(system, z.q);
  PhaseState out = z;
  out.p = z.p - t * system.potential.gradient(z.q);
  out.t = z.t + t;
  return out;
}

PhaseState flow_dissipation(const RayleighSystem& system, double epsilon,
                            double t, const PhaseState& z) {
  PhaseState out = z;
  out.t = z.t + t;
  const double scale = epsilon * t;
  if (scale == 0.0) return out;
  check_configuration(system, z.q);
  out.p = expm(-scale * damping_operator(system, z.q)) * z.p;
  return out;
}

PhaseState flow_potential_dissipation(const RayleighSystem& system,
                                      double epsilon, double t,
                                      const PhaseState& z) {
  check_configuration(system, z.q);
  const Matrix A = -(epsilon * t) * damping_operator(system, z.q);
  const Vector b = -t * system.potential.gradient(z.q);
  const AffineExponential e = exp_affine(A, b);
  PhaseState out = z;
  out.p = e.exp_a * z.p + e.phi1_b;
  out.t = z.t + t;
  return out;
}

PhaseState flow(FlowKind kind, const RayleighSystem& system, double t,
                const PhaseState& z) {
  switch (kind) {
    case FlowKind::Kinetic:
      return flow_kinetic(system, t, z);
    case FlowKind::Potential:
      return flow_potential(system, t, z);
    case FlowKind::Dissipation:
      return flow_dissipation(system, system.epsilon, t, z);
    case FlowKind::PotentialDissipation:
      return flow_potential_dissipation(system, system.epsilon, t, z);
  }
  throw InvalidArgument("unknown flow kind");
}

}  // namespace rayleigh
