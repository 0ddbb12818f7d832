#include "rayleigh/matrix_functions.hpp"

#include <array>
#include <cmath>
#include <string>

namespace rayleigh {
namespace {

// Higham, "The scaling and squaring method for the matrix exponential
// revisited" (2005): Pade degrees and the 1-norm bounds below which each
// degree reaches unit-roundoff backward error.
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2,
                                          2.539398330063230e-1,
                                          9.504178996162932e-1,
                                          2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0,
                                          420.0,   30.0,    1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0,
                                          277200.0,   25200.0,   1512.0,
                                          56.0,       1.0};
constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

double norm1(const Matrix& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

// Low-degree Pade r_m(A) = q_m(A)^{-1} p_m(A) with p_m(A) = U + V,
// q_m(A) = -U + V, U odd part and V even part.
template <std::size_t N>
Matrix pade_low(const Matrix& A, const std::array<double, N>& c) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  Matrix power = I;
  Matrix U_inner = Matrix::Zero(n, n);
  Matrix V = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < N; k += 2) {
    V += c[k] * power;
    U_inner += c[k + 1] * power;
    power = power * A2;
  }
  const Matrix U = A * U_inner;
  return (V - U).partialPivLu().solve(V + U);
}

Matrix pade13(const Matrix& A) {
  const auto& b = kPade13;
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  const Matrix U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
           b[5] * A4 + b[3] * A2 + b[1] * I);
  const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                   b[4] * A4 + b[2] * A2 + b[0] * I;
  return (V - U).partialPivLu().solve(V + U);
}

Matrix expm_any(const Matrix& A) {
  const double norm = norm1(A);
  if (!std::isfinite(norm)) {
    throw DomainError("matrix exponential of a non-finite matrix");
  }
  if (norm <= kTheta[0]) return pade_low(A, kPade3);
  if (norm <= kTheta[1]) return pade_low(A, kPade5);
  if (norm <= kTheta[2]) return pade_low(A, kPade7);
  if (norm <= kTheta[3]) return pade_low(A, kPade9);

  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  }
  Matrix R = pade13(A / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) R = R * R;
  return R;
}

void check_kernel_input(const Matrix& A, const char* what) {
  if (A.rows() != A.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  if (A.rows() > kMaxKernelDim) {
    throw DimensionError(std::string(what) + ": dimension " +
                         std::to_string(A.rows()) + " exceeds " +
                         std::to_string(kMaxKernelDim));
  }
}

}  // namespace

Matrix expm(const Matrix& A) {
  check_kernel_input(A, "expm");
  return expm_any(A);
}

Matrix phi1(const Matrix& A) {
  check_kernel_input(A, "phi1");
  const Eigen::Index n = A.rows();
  Matrix augmented = Matrix::Zero(2 * n, 2 * n);
  augmented.topLeftCorner(n, n) = A;
  augmented.topRightCorner(n, n) = Matrix::Identity(n, n);
  return expm_any(augmented).topRightCorner(n, n);
}

AffineExponential exp_affine(const Matrix& A, const Vector& b) {
  check_kernel_input(A, "exp_affine");
  const Eigen::Index n = A.rows();
  if (b.size() != n) {
    throw DimensionError("exp_affine: vector does not match matrix");
  }
  Matrix augmented = Matrix::Zero(n + 1, n + 1);
  augmented.topLeftCorner(n, n) = A;
  augmented.topRightCorner(n, 1) = b;
  const Matrix E = expm_any(augmented);
  return {E.topLeftCorner(n, n), E.topRightCorner(n, 1)};
}

}  // namespace rayleigh
