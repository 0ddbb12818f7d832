#pragma once

// Small dense matrix exponential and phi_1 kernels for the exponential-Euler
// sub-flows. phi_1(z) = (e^z - 1) / z, phi_1(0) = 1.

#include "rayleigh/core.hpp"

namespace rayleigh {

inline constexpr Eigen::Index kMaxKernelDim = 16;

/// e^A by Pade approximation with scaling and squaring (degrees 3..13).
/// Throws DimensionError for non-square A or n > 16.
Matrix expm(const Matrix& A);

/// phi_1(A), read off the top-right block of exp([[A, I], [0, 0]]).
Matrix phi1(const Matrix& A);

struct AffineExponential {
  Matrix exp_a;    ///< e^A
  Vector phi1_b;   ///< phi_1(A) b
};

/// e^A and phi_1(A) b from one exponential of the (n+1)x(n+1) matrix
/// [[A, b], [0, 0]]. This is the exact time-1 map of x' = A x + b.
AffineExponential exp_affine(const Matrix& A, const Vector& b);

}  // namespace rayleigh
