#include "rayleigh/problems.hpp"

#include <cmath>

namespace rayleigh {

RayleighSystem planar_pendulum(double epsilon) {
  return RayleighSystem{
      .name = "planar",
      .mass = MassMatrix::identity(1),
      .dissipation = {[](const Vector&) { return Matrix::Identity(1, 1); }, 1},
      .potential = {[](const Vector& q) { return 1.0 - std::cos(q(0)); },
                    [](const Vector& q) {
                      Vector g(1);
                      g(0) = std::sin(q(0));
                      return g;
                    }},
      .singular_radius = 0.0,
  }.with_epsilon(epsilon);
}

void ElasticPendulumParams::validate() const {
  if (!(m > 0.0) || !(k > 0.0) || !(ell > 0.0)) {
    throw InvalidArgument("elastic pendulum needs m, k, ell > 0");
  }
  if (!gravity.allFinite()) throw InvalidArgument("gravity is not finite");
}

RayleighSystem elastic_pendulum(const ElasticPendulumParams& params,
                                double epsilon) {
  params.validate();
  const ElasticPendulumParams P = params;
  return RayleighSystem{
      .name = "elastic",
      .mass = MassMatrix::scalar(3, P.m),
      .dissipation = {[](const Vector& q) -> Matrix {
                        return (q * q.transpose()) / q.squaredNorm();
                      },
                      1},
      .potential = {[P](const Vector& q) {
                      const double stretch = P.ell - q.norm();
                      return 0.5 * P.k * stretch * stretch - P.m * q.dot(P.gravity);
                    },
                    [P](const Vector& q) -> Vector {
                      return P.k * (1.0 - P.ell / q.norm()) * q - P.m * P.gravity;
                    }},
      .singular_radius = 1e-9,
  }.with_epsilon(epsilon);
}

SymmetryGenerator rotation_about_e3() {
  return {[](const Vector& q) {
    Vector xi(3);
    xi << -q(1), q(0), 0.0;
    return xi;
  }};
}

ReducedTangent reduced_vector_field(const ElasticPendulumParams& params,
                                    double mu, const ReducedState& s,
                                    double epsilon) {
  if (!(s.rho > 0.0)) throw DomainError("reduced state needs rho > 0");
  const double m = params.m;
  const double k = params.k;
  const double r2 = s.rho * s.rho + s.z * s.z;
  const double r = std::sqrt(r2);
  const double spring = params.ell / r - 1.0;
  const double radial_rate = (s.z * s.p_z + s.rho * s.p_rho) / (m * r2);
  return {
      s.p_rho / m,
      s.p_z / m,
      k * s.rho * spring + mu * mu / (m * s.rho * s.rho * s.rho) -
          epsilon * s.rho * radial_rate,
      k * s.z * spring - m * params.gravity_magnitude() - epsilon * s.z * radial_rate,
  };
}

ReducedState to_cylindrical(const PhaseState& z) {
  if (z.q.size() != 3 || z.p.size() != 3) {
    throw DimensionError("cylindrical projection needs a 3-D state");
  }
  const double x = z.q(0), y = z.q(1);
  const double rho = std::hypot(x, y);
  if (!(rho > 0.0)) throw DomainError("state on the symmetry axis");
  return ReducedState{
      .rho = rho,
      .z = z.q(2),
      .p_rho = (x * z.p(0) + y * z.p(1)) / rho,
      .p_z = z.p(2),
      .mu = x * z.p(1) - y * z.p(0),
  };
}

}  // namespace rayleigh
