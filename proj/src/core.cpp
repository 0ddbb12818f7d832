#include "rayleigh/core.hpp"

#include <cmath>
#include <utility>

namespace rayleigh {

MassMatrix::MassMatrix(Matrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw InvalidArgument("mass matrix must be square and non-empty");
  }
  if (!matrix_.allFinite()) {
    throw InvalidArgument("mass matrix has non-finite entries");
  }
  const double scale = matrix_.cwiseAbs().maxCoeff();
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("mass matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(matrix_);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("mass matrix is not positive definite");
  }
  inverse_ = llt.solve(Matrix::Identity(matrix_.rows(), matrix_.cols()));
  // Symmetrize so that p^T M^{-1} p is evaluated on an exactly symmetric form.
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
}

MassMatrix MassMatrix::identity(Eigen::Index n) {
  return MassMatrix(Matrix::Identity(n, n));
}

MassMatrix MassMatrix::scalar(Eigen::Index n, double mass) {
  return MassMatrix(mass * Matrix::Identity(n, n));
}

RayleighSystem RayleighSystem::with_epsilon(double eps) const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("epsilon must be finite and non-negative");
  }
  RayleighSystem copy = *this;
  copy.epsilon = eps;
  return copy;
}

void check_configuration(const RayleighSystem& system, const Vector& q) {
  if (q.size() != system.dim()) {
    throw DimensionError("configuration has dimension " +
                         std::to_string(q.size()) + ", system has " +
                         std::to_string(system.dim()));
  }
  if (system.singular_radius > 0.0 && q.norm() <= system.singular_radius) {
    throw DomainError("configuration inside the singular radius of " +
                      system.name);
  }
}

namespace {

void check_momentum_dim(const RayleighSystem& system, const Vector& p) {
  if (p.size() != system.dim()) {
    throw DimensionError("momentum has dimension " + std::to_string(p.size()) +
                         ", system has " + std::to_string(system.dim()));
  }
}

}  // namespace

Vector sharp(const RayleighSystem& system, const Vector& p) {
  check_momentum_dim(system, p);
  return system.mass.inverse() * p;
}

Vector flat(const RayleighSystem& system, const Vector& v) {
  check_momentum_dim(system, v);
  return system.mass.matrix() * v;
}

double kinetic_energy(const RayleighSystem& system, const Vector& p) {
  return 0.5 * p.dot(sharp(system, p));
}

double potential_energy(const RayleighSystem& system, const Vector& q) {
  check_configuration(system, q);
  return system.potential.value(q);
}

double hamiltonian(const RayleighSystem& system, const PhaseState& z) {
  return kinetic_energy(system, z.p) + potential_energy(system, z.q);
}

double rayleigh_rate(const RayleighSystem& system, const PhaseState& z) {
  check_configuration(system, z.q);
  const Vector v = sharp(system, z.p);
  const double rate = v.dot(system.dissipation(z.q) * v);
  if (rate < -1e-12) {
    throw NegativeRateError("dissipation rate " + std::to_string(rate) +
                            " is negative; D(q) is not positive semi-definite");
  }
  return rate;
}

double momentum(const SymmetryGenerator& gen, const PhaseState& z) {
  return z.p.dot(gen(z.q));
}

Matrix damping_operator(const RayleighSystem& system, const Vector& q) {
  return system.dissipation(q) * system.mass.inverse();
}

}  // namespace rayleigh
