#pragma once

// One-step maps for Rayleigh-damped Hamiltonian systems.
//
// The three structure-preserving splittings compose exact sub-flows:
//   3S  : e^{h/2 eps Y} e^{h/2 X_T} e^{h X_V} e^{h/2 X_T} e^{h/2 eps Y}
//   2S  : e^{h/2 X_T} e^{h (X_V + eps Y)} e^{h/2 X_T}
//   RKS : e^{h/2 X_T} Psi^h_{X_V + eps Y} e^{h/2 X_T}
// (rightmost factor applied first). Psi is an explicit Runge-Kutta method run
// on the cotangent fiber with q frozen. All three reduce to Stormer-Verlet
// (drift-kick-drift) when eps = 0.
//
// HeunFull and RKS-B are non-conserving baselines.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rayleigh/core.hpp"

namespace rayleigh {

/// Explicit Runge-Kutta tableau.
class ButcherTableau {
 public:
  /// Throws InvalidArgument unless `a` is strictly lower triangular,
  /// sum(b) = 1 and c_i = sum_j a_ij (both to 1e-14).
  ButcherTableau(Matrix a, Vector b, Vector c, int declared_order,
                 std::string name = "custom");

  static ButcherTableau heun();
  static ButcherTableau explicit_euler();
  static ButcherTableau explicit_midpoint();
  static ButcherTableau rk4();

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  const Vector& c() const noexcept { return c_; }
  int declared_order() const noexcept { return declared_order_; }
  Eigen::Index stages() const noexcept { return b_.size(); }
  const std::string& name() const noexcept { return name_; }

 private:
  Matrix a_;
  Vector b_;
  Vector c_;
  int declared_order_;
  std::string name_;
};

class Scheme;

namespace scheme_kind {
struct ThreeTerm {};
struct TwoTerm {};
struct RungeKuttaSplit {
  ButcherTableau tableau;
};
struct StormerVerlet {};
struct HeunFull {};
struct RKSB {
  ButcherTableau tableau;
};
struct Composed {
  std::shared_ptr<const Scheme> base;
  std::vector<double> coefficients;
};
}  // namespace scheme_kind

/// Integrator selector. Value type; Composed holds its base by shared
/// immutable pointer.
class Scheme {
 public:
  using Kind =
      std::variant<scheme_kind::ThreeTerm, scheme_kind::TwoTerm,
                   scheme_kind::RungeKuttaSplit, scheme_kind::StormerVerlet,
                   scheme_kind::HeunFull, scheme_kind::RKSB,
                   scheme_kind::Composed>;

  static Scheme three_term();
  static Scheme two_term();
  static Scheme runge_kutta_split(ButcherTableau tableau = ButcherTableau::heun());
  static Scheme stormer_verlet();
  static Scheme heun_full();
  static Scheme rksb(ButcherTableau tableau = ButcherTableau::heun());
  /// Throws InvalidArgument unless the coefficients sum to 1 (1e-14).
  static Scheme composed(Scheme base, std::vector<double> coefficients);
  /// Yoshida triple jump: gamma_1 = gamma_3 = 1/(2 - 2^{1/3}), gamma_2 = 1 - 2 gamma_1.
  static Scheme triple_jump(Scheme base);
  /// n equal sub-steps h/n of `base`.
  static Scheme substeps(Scheme base, int n);

  /// Parses "3S", "2S", "RKS", "RKS(<tableau>)", "SV", "Heun", "RKS-B",
  /// "RKS-B(<tableau>)", "TJ(<scheme>)" and "SUB(<scheme>,<n>)". Tableau names: heun, euler,
  /// midpoint, rk4. Throws InvalidArgument on anything else.
  static Scheme parse(const std::string& text);

  /// Canonical descriptor; parse(name()) reproduces the scheme.
  std::string name() const;

  const Kind& kind() const noexcept { return kind_; }

 private:
  explicit Scheme(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

PhaseState step_3s(const RayleighSystem& system, double h, const PhaseState& z);
PhaseState step_2s(const RayleighSystem& system, double h, const PhaseState& z);
PhaseState step_rks(const RayleighSystem& system, const ButcherTableau& tableau,
                    double h, const PhaseState& z);
PhaseState step_sv(const RayleighSystem& system, double h, const PhaseState& z);
PhaseState step_heun_full(const RayleighSystem& system, double h,
                          const PhaseState& z);
PhaseState step_rksb(const RayleighSystem& system, const ButcherTableau& tableau,
                     double h, const PhaseState& z);

/// Applies `scheme` with sub-steps gamma_i * h in order.
PhaseState compose(const Scheme& base, const std::vector<double>& coefficients,
                   const RayleighSystem& system, double h, const PhaseState& z);

/// One step of any scheme.
PhaseState step(const Scheme& scheme, const RayleighSystem& system, double h,
                const PhaseState& z);

/// Full vector field (M^{-1}p, -grad V - eps D M^{-1} p) packed as [q'; p'].
Vector full_vector_field(const RayleighSystem& system, const PhaseState& z);

struct Trajectory {
  std::vector<PhaseState> states;  ///< states[k].t = t0 + k h
  double step_size = 0.0;
  std::string scheme;  ///< Scheme::name()
  std::string system;  ///< RayleighSystem::name

  std::size_t size() const noexcept { return states.size(); }
  double t0() const { return states.front().t; }
};

/// n_steps steps of size h from z0. Throws InvalidArgument for h <= 0 and
/// StepError (with the failing step index) when a step throws.
Trajectory integrate(const Scheme& scheme, const RayleighSystem& system,
                     const PhaseState& z0, double h, std::size_t n_steps);

}  // namespace rayleigh
