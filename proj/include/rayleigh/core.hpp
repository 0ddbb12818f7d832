#pragma once

// Geometric data of a Rayleigh-damped mechanical system in a fixed Euclidean
// chart: constant mass matrix M, dissipation tensor D(q), potential V(q) and
// the damping parameter epsilon. The equations of motion are
//
//   q' = M^{-1} p
//   p' = -grad V(q) - epsilon * D(q) M^{-1} p
//
// and the energy H = 1/2 p^T M^{-1} p + V(q) decays at the rate
// -epsilon * (M^{-1}p)^T D(q) (M^{-1}p).

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "rayleigh/errors.hpp"

namespace rayleigh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric positive definite, constant mass matrix with cached inverse.
class MassMatrix {
 public:
  /// Throws InvalidArgument unless `m` is square, finite, symmetric to 1e-12
  /// (relative) and positive definite.
  explicit MassMatrix(Matrix m);

  static MassMatrix identity(Eigen::Index n);
  static MassMatrix scalar(Eigen::Index n, double mass);

  const Matrix& matrix() const noexcept { return matrix_; }
  const Matrix& inverse() const noexcept { return inverse_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  Matrix matrix_;
  Matrix inverse_;
};

/// q -> D(q), with d_q(u, v) = u^T D(q) v. D(q) must be symmetric PSD of
/// constant rank `declared_rank`.
struct DissipationField {
  std::function<Matrix(const Vector&)> evaluate;
  int declared_rank = 0;

  Matrix operator()(const Vector& q) const { return evaluate(q); }
};

struct PotentialField {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// Infinitesimal generator xi_Q(q) of a symmetry action for a fixed xi.
struct SymmetryGenerator {
  std::function<Vector(const Vector&)> generator;

  Vector operator()(const Vector& q) const { return generator(q); }
};

struct RayleighSystem {
  std::string name;
  MassMatrix mass;
  DissipationField dissipation;
  PotentialField potential;
  double epsilon = 0.0;
  /// Configurations with |q| <= singular_radius are rejected; 0 disables.
  double singular_radius = 0.0;

  Eigen::Index dim() const noexcept { return mass.dim(); }

  /// Same data, different damping parameter; throws InvalidArgument unless
  /// eps is finite and >= 0.
  RayleighSystem with_epsilon(double eps) const;
};

struct PhaseState {
  Vector q;
  Vector p;
  double t = 0.0;
};

/// Throws DomainError if q sits inside the guarded singular ball, and
/// DimensionError if q does not match the system dimension.
void check_configuration(const RayleighSystem& system, const Vector& q);

/// p# = M^{-1} p.
Vector sharp(const RayleighSystem& system, const Vector& p);
/// v_flat = M v.
Vector flat(const RayleighSystem& system, const Vector& v);

double kinetic_energy(const RayleighSystem& system, const Vector& p);
double potential_energy(const RayleighSystem& system, const Vector& q);

/// H(q, p) = 1/2 p^T M^{-1} p + V(q).
double hamiltonian(const RayleighSystem& system, const PhaseState& z);

/// d_q(p#, p#); the energy loss rate is epsilon times this value. Throws
/// NegativeRateError if the result is below -1e-12.
double rayleigh_rate(const RayleighSystem& system, const PhaseState& z);

/// <p, xi_Q(q)>.
double momentum(const SymmetryGenerator& gen, const PhaseState& z);

/// C(q) = D(q) M^{-1}, the matrix of the linear fiber field Y.
Matrix damping_operator(const RayleighSystem& system, const Vector& q);

}  // namespace rayleigh
