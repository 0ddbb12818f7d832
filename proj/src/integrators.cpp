#include "rayleigh/integrators.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <utility>

#include "rayleigh/flows.hpp"

namespace rayleigh {

// --- tableaux -------------------------------------------------------------

ButcherTableau::ButcherTableau(Matrix a, Vector b, Vector c, int declared_order,
                               std::string name)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      declared_order_(declared_order),
      name_(std::move(name)) {
  const Eigen::Index s = b_.size();
  if (s == 0 || a_.rows() != s || a_.cols() != s || c_.size() != s) {
    throw InvalidArgument("tableau dimensions are inconsistent");
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      if (a_(i, j) != 0.0) {
        throw InvalidArgument("tableau is not explicit (a must be strictly lower triangular)");
      }
    }
  }
  if (std::abs(b_.sum() - 1.0) > 1e-14) {
    throw InvalidArgument("tableau weights do not sum to 1");
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    if (std::abs(a_.row(i).sum() - c_(i)) > 1e-14) {
      throw InvalidArgument("tableau nodes do not equal row sums of a");
    }
  }
}

ButcherTableau ButcherTableau::heun() {
  Matrix a(2, 2);
  a << 0.0, 0.0, 1.0, 0.0;
  return ButcherTableau(a, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.0, 1.0),
                        2, "heun");
}

ButcherTableau ButcherTableau::explicit_euler() {
  return ButcherTableau(Matrix::Zero(1, 1), Vector::Ones(1), Vector::Zero(1), 1,
                        "euler");
}

ButcherTableau ButcherTableau::explicit_midpoint() {
  Matrix a(2, 2);
  a << 0.0, 0.0, 0.5, 0.0;
  return ButcherTableau(a, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 0.5),
                        2, "midpoint");
}

ButcherTableau ButcherTableau::rk4() {
  Matrix a = Matrix::Zero(4, 4);
  a(1, 0) = 0.5;
  a(2, 1) = 0.5;
  a(3, 2) = 1.0;
  Vector b(4);
  b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
  Vector c(4);
  c << 0.0, 0.5, 0.5, 1.0;
  return ButcherTableau(a, b, c, 4, "rk4");
}

namespace {

ButcherTableau tableau_by_name(const std::string& name) {
  if (name == "heun") return ButcherTableau::heun();
  if (name == "euler") return ButcherTableau::explicit_euler();
  if (name == "midpoint") return ButcherTableau::explicit_midpoint();
  if (name == "rk4") return ButcherTableau::rk4();
  throw InvalidArgument("unknown tableau '" + name + "'");
}

// Splits "NAME(ARG)" into NAME and ARG; returns false without parentheses.
bool split_call(const std::string& text, std::string& head, std::string& arg) {
  const auto open = text.find('(');
  if (open == std::string::npos) return false;
  if (text.back() != ')') throw InvalidArgument("unbalanced scheme '" + text + "'");
  head = text.substr(0, open);
  arg = text.substr(open + 1, text.size() - open - 2);
  return true;
}

}  // namespace

// --- scheme descriptors ---------------------------------------------------

Scheme Scheme::three_term() { return Scheme(scheme_kind::ThreeTerm{}); }
Scheme Scheme::two_term() { return Scheme(scheme_kind::TwoTerm{}); }
Scheme Scheme::runge_kutta_split(ButcherTableau tableau) {
  return Scheme(scheme_kind::RungeKuttaSplit{std::move(tableau)});
}
Scheme Scheme::stormer_verlet() { return Scheme(scheme_kind::StormerVerlet{}); }
Scheme Scheme::heun_full() { return Scheme(scheme_kind::HeunFull{}); }
Scheme Scheme::rksb(ButcherTableau tableau) {
  return Scheme(scheme_kind::RKSB{std::move(tableau)});
}

Scheme Scheme::composed(Scheme base, std::vector<double> coefficients) {
  if (coefficients.empty()) {
    throw InvalidArgument("composition needs at least one coefficient");
  }
  // Neumaier summation; long uniform compositions must still sum to 1.
  double sum = 0.0, carry = 0.0;
  for (double c : coefficients) {
    const double t = sum + c;
    carry += std::abs(sum) >= std::abs(c) ? (sum - t) + c : (c - t) + sum;
    sum = t;
  }
  sum += carry;
  if (std::abs(sum - 1.0) > 1e-14) {
    throw InvalidArgument("composition coefficients do not sum to 1");
  }
  return Scheme(scheme_kind::Composed{
      std::make_shared<const Scheme>(std::move(base)), std::move(coefficients)});
}

Scheme Scheme::triple_jump(Scheme base) {
  const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double g2 = 1.0 - 2.0 * g1;
  return composed(std::move(base), {g1, g2, g1});
}

Scheme Scheme::substeps(Scheme base, int n) {
  if (n < 1) throw InvalidArgument("substep count must be positive");
  return composed(std::move(base),
                  std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

Scheme Scheme::parse(const std::string& text) {
  if (text == "3S") return three_term();
  if (text == "2S") return two_term();
  if (text == "RKS") return runge_kutta_split();
  if (text == "SV") return stormer_verlet();
  if (text == "Heun") return heun_full();
  if (text == "RKS-B") return rksb();
  std::string head, arg;
  if (split_call(text, head, arg)) {
    if (head == "RKS") return runge_kutta_split(tableau_by_name(arg));
    if (head == "RKS-B") return rksb(tableau_by_name(arg));
    if (head == "TJ") return triple_jump(parse(arg));
    if (head == "SUB") {
      const auto comma = arg.rfind(',');
      if (comma == std::string::npos) throw InvalidArgument("SUB needs (<scheme>,<n>)");
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(arg.substr(comma + 1), &used);
        if (used != arg.size() - comma - 1) throw std::invalid_argument("trailing");
      } catch (const std::logic_error&) {
        throw InvalidArgument("bad substep count in '" + text + "'");
      }
      return substeps(parse(arg.substr(0, comma)), n);
    }
  }
  throw InvalidArgument("unknown scheme '" + text + "'");
}

std::string Scheme::name() const {
  struct Namer {
    std::string operator()(const scheme_kind::ThreeTerm&) const { return "3S"; }
    std::string operator()(const scheme_kind::TwoTerm&) const { return "2S"; }
    std::string operator()(const scheme_kind::RungeKuttaSplit& k) const {
      return k.tableau.name() == "heun" ? "RKS" : "RKS(" + k.tableau.name() + ")";
    }
    std::string operator()(const scheme_kind::StormerVerlet&) const { return "SV"; }
    std::string operator()(const scheme_kind::HeunFull&) const { return "Heun"; }
    std::string operator()(const scheme_kind::RKSB& k) const {
      return k.tableau.name() == "heun" ? "RKS-B" : "RKS-B(" + k.tableau.name() + ")";
    }
    std::string operator()(const scheme_kind::Composed& k) const {
      const auto& c = k.coefficients;
      const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
      if (c.size() == 3 && c[0] == g1 && c[1] == 1.0 - 2.0 * g1 && c[2] == g1) {
        return "TJ(" + k.base->name() + ")";
      }
      const double uniform = 1.0 / static_cast<double>(c.size());
      if (std::all_of(c.begin(), c.end(), [uniform](double x) { return x == uniform; })) {
        return "SUB(" + k.base->name() + "," + std::to_string(c.size()) + ")";
      }
      std::string out = "Composed(" + k.base->name();
      for (double x : c) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",%.17g", x);
        out += buf;
      }
      return out + ")";
    }
  };
  return std::visit(Namer{}, kind_);
}

// --- one-step maps --------------------------------------------------------

namespace {

// Explicit RK on the frozen-q fiber ODE p' = -g - A p with g = grad V(q) and
// A = eps C(q).
Vector fiber_rk(const ButcherTableau& tab, const Vector& g, const Matrix& A,
                double h, const Vector& p) {
  const Eigen::Index s = tab.stages();
  std::vector<Vector> k(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    Vector stage = p;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (tab.a()(i, j) != 0.0) stage += (h * tab.a()(i, j)) * k[j];
    }
    k[i] = -g - A * stage;
  }
  Vector increment = Vector::Zero(p.size());
  for (Eigen::Index i = 0; i < s; ++i) increment += tab.b()(i) * k[i];
  return p + h * increment;
}

// Stacked state for RK on the full phase space.
Vector pack(const PhaseState& z) {
  Vector x(z.q.size() + z.p.size());
  x << z.q, z.p;
  return x;
}

PhaseState unpack(const Vector& x, double t) {
  const Eigen::Index n = x.size() / 2;
  return PhaseState{x.head(n), x.tail(n), t};
}

template <typename Field>
PhaseState phase_rk(const ButcherTableau& tab, Field&& field, double h,
                    const PhaseState& z) {
  const Eigen::Index s = tab.stages();
  const Vector x = pack(z);
  std::vector<Vector> k(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    Vector stage = x;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (tab.a()(i, j) != 0.0) stage += (h * tab.a()(i, j)) * k[j];
    }
    k[i] = field(unpack(stage, z.t + tab.c()(i) * h));
  }
  Vector increment = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < s; ++i) increment += tab.b()(i) * k[i];
  return unpack(x + h * increment, z.t + h);
}

}  // namespace

PhaseState step_sv(const RayleighSystem& system, double h, const PhaseState& z) {
  PhaseState w = flow_kinetic(system, 0.5 * h, z);
  w = flow_potential(system, h, w);
  w = flow_kinetic(system, 0.5 * h, w);
  w.t = z.t + h;
  return w;
}

PhaseState step_3s(const RayleighSystem& system, double h, const PhaseState& z) {
  const double eps = system.epsilon;
  PhaseState w = flow_dissipation(system, eps, 0.5 * h, z);
  w = flow_kinetic(system, 0.5 * h, w);
  w = flow_potential(system, h, w);
  w = flow_kinetic(system, 0.5 * h, w);
  w = flow_dissipation(system, eps, 0.5 * h, w);
  w.t = z.t + h;
  return w;
}

PhaseState step_2s(const RayleighSystem& system, double h, const PhaseState& z) {
  PhaseState w = flow_kinetic(system, 0.5 * h, z);
  w = flow_potential_dissipation(system, system.epsilon, h, w);
  w = flow_kinetic(system, 0.5 * h, w);
  w.t = z.t + h;
  return w;
}

PhaseState step_rks(const RayleighSystem& system, const ButcherTableau& tableau,
                    double h, const PhaseState& z) {
  PhaseState w = flow_kinetic(system, 0.5 * h, z);
  check_configuration(system, w.q);
  const Vector g = system.potential.gradient(w.q);
  const Matrix A = system.epsilon * damping_operator(system, w.q);
  w.p = fiber_rk(tableau, g, A, h, w.p);
  w = flow_kinetic(system, 0.5 * h, w);
  w.t = z.t + h;
  return w;
}

PhaseState step_rksb(const RayleighSystem& system, const ButcherTableau& tableau,
                     double h, const PhaseState& z) {
  PhaseState w = flow_potential(system, 0.5 * h, z);
  // Drift coupled with dissipation: q is not frozen inside the RK step.
  const auto drift_dissipation = [&system](const PhaseState& s) {
    check_configuration(system, s.q);
    const Vector v = sharp(system, s.p);
    Vector out(2 * v.size());
    out << v, -system.epsilon * (system.dissipation(s.q) * v);
    return out;
  };
  w = phase_rk(tableau, drift_dissipation, h, w);
  w = flow_potential(system, 0.5 * h, w);
  w.t = z.t + h;
  return w;
}

Vector full_vector_field(const RayleighSystem& system, const PhaseState& z) {
  check_configuration(system, z.q);
  const Vector v = sharp(system, z.p);
  Vector out(2 * v.size());
  out << v, -system.potential.gradient(z.q) - system.epsilon * (system.dissipation(z.q) * v);
  return out;
}

PhaseState step_heun_full(const RayleighSystem& system, double h,
                          const PhaseState& z) {
  static const ButcherTableau kHeun = ButcherTableau::heun();
  return phase_rk(
      kHeun, [&system](const PhaseState& s) { return full_vector_field(system, s); },
      h, z);
}

PhaseState compose(const Scheme& base, const std::vector<double>& coefficients,
                   const RayleighSystem& system, double h, const PhaseState& z) {
  PhaseState w = z;
  for (double gamma : coefficients) w = step(base, system, gamma * h, w);
  w.t = z.t + h;
  return w;
}

PhaseState step(const Scheme& scheme, const RayleighSystem& system, double h,
                const PhaseState& z) {
  struct Stepper {
    const RayleighSystem& system;
    double h;
    const PhaseState& z;

    PhaseState operator()(const scheme_kind::ThreeTerm&) const { return step_3s(system, h, z); }
    PhaseState operator()(const scheme_kind::TwoTerm&) const { return step_2s(system, h, z); }
    PhaseState operator()(const scheme_kind::RungeKuttaSplit& k) const {
      return step_rks(system, k.tableau, h, z);
    }
    PhaseState operator()(const scheme_kind::StormerVerlet&) const { return step_sv(system, h, z); }
    PhaseState operator()(const scheme_kind::HeunFull&) const { return step_heun_full(system, h, z); }
    PhaseState operator()(const scheme_kind::RKSB& k) const {
      return step_rksb(system, k.tableau, h, z);
    }
    PhaseState operator()(const scheme_kind::Composed& k) const {
      return compose(*k.base, k.coefficients, system, h, z);
    }
  };
  return std::visit(Stepper{system, h, z}, scheme.kind());
}

// --- driver ---------------------------------------------------------------

Trajectory integrate(const Scheme& scheme, const RayleighSystem& system,
                     const PhaseState& z0, double h, std::size_t n_steps) {
  if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
  if (z0.q.size() != system.dim() || z0.p.size() != system.dim()) {
    throw DimensionError("initial state does not match system dimension");
  }
  Trajectory traj;
  traj.step_size = h;
  traj.scheme = scheme.name();
  traj.system = system.name;
  traj.states.reserve(n_steps + 1);
  traj.states.push_back(z0);
  PhaseState z = z0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    try {
      z = step(scheme, system, h, z);
    } catch (const Error& e) {
      throw StepError(k, e.what());
    }
    if (!z.q.allFinite() || !z.p.allFinite()) {
      throw StepError(k, "non-finite state");
    }
    z.t = z0.t + static_cast<double>(k + 1) * h;
    traj.states.push_back(z);
  }
  return traj;
}

}  // namespace rayleigh
