// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rayleigh/diagnostics.hpp"
#include "rayleigh/flows.hpp"
#include "rayleigh/matrix_functions.hpp"

using namespace rayleigh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

class Report {
 public:
  void add(const std::string& label, bool ok) {
    pass_ = pass_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += label + (ok ? "" : " [fails]");
  }
  Outcome done() const { return {pass_, detail_}; }

 private:
  bool pass_ = true;
  std::string detail_;
};

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const PhaseState kPlanarStart{vec({0.9 * oracle::kPi}), vec({0})};
const PhaseState kElasticStart{vec({0, 1.55884573, -0.6}), vec({1.34164079, 0, 0})};

std::vector<Scheme> conserving() {
  return {Scheme::three_term(), Scheme::two_term(), Scheme::runge_kutta_split()};
}

ElasticPendulumParams generic_params() {
  ElasticPendulumParams p;
  p.m = 1.3;
  p.k = 4.0;
  p.gravity = Eigen::Vector3d(0.0, 0.0, -0.8);
  return p;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / std::abs(*lo);
}

// ---------------------------------------------------------------------------

Outcome epsilon_zero_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Sampler rng(1001);
  double worst = 0.0;
  for (const auto& sys : {planar_pendulum(0.0), elastic_pendulum(generic_params(), 0.0)}) {
    for (int i = 0; i < 1000; ++i) {
      const auto z = rng.state_for(sys);
      const double h = 0.5 * (1.0 - rng.uniform(0.0, 1.0));
      const Vector sv = oracle::pack(step_sv(sys, h, z));
      worst = std::max(worst, oracle::max_rel_diff(oracle::pack(step_3s(sys, h, z)), sv));
      worst = std::max(worst, oracle::max_rel_diff(oracle::pack(step_2s(sys, h, z)), sv));
      worst = std::max(worst, oracle::max_rel_diff(
                                  oracle::pack(step_rks(sys, ButcherTableau::heun(), h, z)), sv));
    }
  }
  const double elapsed = seconds(t0);
  Report r;
  r.add(fmt("max rel diff %.2e (<= 1e-13)", worst), worst <= 1e-13);
  r.add(fmt("%.2f s (< 1 s)", elapsed), elapsed < 1.0);
  return r.done();
}

Outcome second_order() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = planar_pendulum(0.01);
  Report r;
  for (const auto& scheme : conserving()) {
    const auto rep = convergence_order(scheme, sys, kPlanarStart, 10.0,
                                       {0.1, 0.05, 0.025, 0.0125}, 1000);
    r.add(scheme.name() + fmt(" slope %.4f", rep.fitted_slope),
          rep.fitted_slope >= 1.9 && rep.fitted_slope <= 2.1);
  }
  const double elapsed = seconds(t0);
  r.add(fmt("%.2f s (< 10 s)", elapsed), elapsed < 10.0);
  return r.done();
}

Outcome fourth_order_composition() {
  const auto rep = convergence_order(Scheme::triple_jump(Scheme::stormer_verlet()),
                                     planar_pendulum(0.0), kPlanarStart, 10.0,
                                     {0.2, 0.1, 0.05, 0.025}, 1000);
  Report r;
  r.add(fmt("TJ(SV) slope %.4f in [3.8, 4.2]", rep.fitted_slope),
        rep.fitted_slope >= 3.8 && rep.fitted_slope <= 4.2);
  return r.done();
}

Outcome exact_subflows() {
  oracle::Sampler rng(1004);
  double worst_flow = 0.0;
  for (const auto& base : {planar_pendulum(), elastic_pendulum(generic_params())}) {
    for (int i = 0; i < 50; ++i) {
      const auto z = rng.state_for(base);
      const double eps = rng.uniform(0.05, 1.0);
      const double t = rng.uniform(-1.0, 2.0);
      const Matrix C = damping_operator(base, z.q);
      const Vector g = base.potential.gradient(z.q);
      const Vector decay = oracle::rk4(
          [&](const Vector& p) { return (-eps * C * p).eval(); }, z.p, t, 2000);
      const Vector affine = oracle::rk4(
          [&](const Vector& p) { return (-g - eps * C * p).eval(); }, z.p, t, 2000);
      worst_flow = std::max(
          worst_flow, (flow_dissipation(base, eps, t, z).p - decay).cwiseAbs().maxCoeff());
      worst_flow = std::max(
          worst_flow,
          (flow_potential_dissipation(base, eps, t, z).p - affine).cwiseAbs().maxCoeff());
    }
  }
  double worst_phi = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + i % 6;
    const Matrix a = rng.matrix(n, rng.uniform(0.0, 8.0));
    const Matrix e = expm(a);
    worst_phi = std::max(worst_phi, (a * phi1(a) - (e - Matrix::Identity(n, n))).norm() /
                                        std::max(1.0, e.norm()));
  }
  Report r;
  r.add(fmt("flows vs brute force %.2e (<= 1e-10)", worst_flow), worst_flow <= 1e-10);
  r.add(fmt("phi1 identity %.2e (<= 1e-12)", worst_phi), worst_phi <= 1e-12);
  return r.done();
}

Outcome momentum_conservation() {
  const auto sys = elastic_pendulum({}, 0.1);
  const auto xi = rotation_about_e3();
  const double j0 = momentum(xi, kElasticStart);
  const auto max_dev = [&](const Trajectory& traj, std::size_t upto) {
    double worst = 0.0;
    for (std::size_t k = 0; k <= upto && k < traj.size(); ++k) {
      worst = std::max(worst, std::abs(momentum(xi, traj.states[k]) - j0));
    }
    return worst;
  };
  Report r;
  for (const auto& scheme : conserving()) {
    const double d = max_dev(integrate(scheme, sys, kElasticStart, 0.1, 2000), 2000);
    r.add(scheme.name() + fmt(" %.2e", d), d <= 1e-10);
  }
  for (const auto& scheme : {Scheme::rksb(), Scheme::heun_full()}) {
    const double d = max_dev(integrate(scheme, sys, kElasticStart, 0.1, 10), 10);
    r.add(scheme.name() + fmt(" within 10 steps %.2e (> 1e-8)", d), d > 1e-8);
  }
  return r.done();
}

Outcome equivariance() {
  oracle::Sampler rng(1006);
  const auto sys = elastic_pendulum(generic_params(), 0.1);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto z = rng.elastic();
    const double th = rng.uniform(-oracle::kPi, oracle::kPi);
    const double h = rng.uniform(0.01, 0.5);
    Matrix R = Matrix::Identity(3, 3);
    R.topLeftCorner(2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    for (const auto& scheme : conserving()) {
      const auto a = step(scheme, sys, h, {R * z.q, R * z.p});
      const auto b = step(scheme, sys, h, z);
      worst = std::max(worst, oracle::state_diff(a, {R * b.q, R * b.p}));
    }
  }
  Report r;
  r.add(fmt("max deviation %.2e (<= 1e-12)", worst), worst <= 1e-12);
  return r.done();
}

Outcome coordinate_invariance() {
  oracle::Sampler rng(1007);
  double worst = 0.0;
  for (const auto& sys : {planar_pendulum(0.3), elastic_pendulum(generic_params(), 0.3)}) {
    const DissipationField d = sys.dissipation;
    const PotentialField v = sys.potential;
    RayleighSystem scaled = sys;
    scaled.mass = MassMatrix(4.0 * sys.mass.matrix());
    scaled.dissipation = {[d](const Vector& s) { return (4.0 * d(2.0 * s)).eval(); },
                          d.declared_rank};
    scaled.potential = {[v](const Vector& s) { return v.value(2.0 * s); },
                        [v](const Vector& s) { return (2.0 * v.gradient(2.0 * s)).eval(); }};
    scaled.singular_radius = sys.singular_radius / 2.0;
    for (int i = 0; i < 100; ++i) {
      const auto z = rng.state_for(sys);
      const PhaseState zs{0.5 * z.q, 2.0 * z.p};
      const double h = rng.uniform(0.01, 0.5);
      for (const auto& scheme : conserving()) {
        const auto a = step(scheme, sys, h, {2.0 * zs.q, 0.5 * zs.p});
        const auto s = step(scheme, scaled, h, zs);
        worst = std::max(worst, oracle::state_diff(a, {2.0 * s.q, 0.5 * s.p}));
      }
    }
  }
  Report r;
  r.add(fmt("max deviation %.2e (<= 1e-12)", worst), worst <= 1e-12);
  return r.done();
}

Outcome symplecticity() {
  oracle::Sampler rng(1008);
  const auto sys = planar_pendulum(0.0);
  Matrix J(2, 2);
  J << 0, 1, -1, 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto z = rng.planar();
    const double h = rng.uniform(0.05, 0.5);
    for (const auto& scheme : conserving()) {
      Matrix D(2, 2);
      const double d = 1e-5;
      for (int j = 0; j < 2; ++j) {
        PhaseState a = z, b = z;
        (j == 0 ? a.q : a.p)(0) += d;
        (j == 0 ? b.q : b.p)(0) -= d;
        D.col(j) = (oracle::pack(step(scheme, sys, h, a)) - oracle::pack(step(scheme, sys, h, b))) /
                   (2 * d);
      }
      worst = std::max(worst, (D.transpose() * J * D - J).cwiseAbs().maxCoeff());
    }
  }
  Report r;
  r.add(fmt("max |D^T J D - J| %.2e (<= 1e-6)", worst), worst <= 1e-6);
  return r.done();
}

Outcome step_size_independence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = planar_pendulum(0.01);
  Report r;
  std::vector<Scheme> schemes = conserving();
  schemes.push_back(Scheme::heun_full());
  for (const auto& scheme : schemes) {
    std::vector<double> finals;
    for (double h : {0.2, 0.3, 0.4, 0.5}) {
      const auto n = static_cast<std::size_t>(std::floor(200.0 / h * (1.0 + 1e-15)));
      finals.push_back(hamiltonian(sys, integrate(scheme, sys, kPlanarStart, h, n).states.back()));
    }
    const double s = spread(finals);
    const bool heun = scheme.name() == "Heun";
    r.add(scheme.name() + fmt(heun ? " spread %.3f (>= 0.5)" : " spread %.4f (<= 0.05)", s),
          heun ? s >= 0.5 : s <= 0.05);
  }
  const double elapsed = seconds(t0);
  r.add(fmt("%.2f s (< 5 s)", elapsed), elapsed < 5.0);
  return r.done();
}

struct Fig3 {
  RayleighSystem sys = planar_pendulum(0.01);
  Trajectory ref, s3, s2, rks, heun;

  Fig3() {
    ref = reference_trajectory(sys, kPlanarStart, 0.2, 1000);
    s3 = integrate(Scheme::three_term(), sys, kPlanarStart, 0.2, 1000);
    s2 = integrate(Scheme::two_term(), sys, kPlanarStart, 0.2, 1000);
    rks = integrate(Scheme::runge_kutta_split(), sys, kPlanarStart, 0.2, 1000);
    heun = integrate(Scheme::heun_full(), sys, kPlanarStart, 0.2, 1000);
  }
};

const Fig3& fig3() {
  static const Fig3 data;
  return data;
}

Outcome bounded_vs_linear() {
  const auto& f = fig3();
  const double slope3 = secular_energy_slope(f.sys, f.s3, f.ref, 0.0);
  const double slope_heun = secular_energy_slope(f.sys, f.heun, f.ref, 0.0);
  Report r;
  r.add(fmt("3S slope %.3e", slope3) + fmt(", Heun slope %.3e", slope_heun) +
            fmt(", ratio %.1f (>= 10)", slope_heun / std::abs(slope3)),
        std::abs(slope3) <= 0.1 * slope_heun);
  return r.done();
}

Outcome mutual_agreement() {
  const auto& f = fig3();
  const auto d32 = energy_difference(f.sys, f.s3, f.s2);
  const auto d3r = energy_difference(f.sys, f.s3, f.rks);
  const auto d2r = energy_difference(f.sys, f.s2, f.rks);
  double pair = 0.0;
  for (const auto* d : {&d32, &d3r, &d2r}) {
    pair = std::max(pair, *std::max_element(d->values.begin(), d->values.end()));
  }
  double err = 0.0;
  for (const auto* t : {&f.s3, &f.s2, &f.rks}) {
    const auto e = energy_difference(f.sys, *t, f.ref);
    err = std::max(err, *std::max_element(e.values.begin(), e.values.end()));
  }
  std::size_t below = 0;
  for (std::size_t k = 0; k < d32.values.size(); ++k) {
    if (d2r.values[k] <= d32.values[k]) ++below;
  }
  const double fraction = static_cast<double>(below) / static_cast<double>(d32.values.size());
  Report r;
  r.add(fmt("max pairwise %.3e", pair) + fmt(", max error vs reference %.3e", err) +
            fmt(", ratio %.4f (<= 0.01)", pair / err),
        pair <= 1e-2 * err);
  r.add(fmt("2S-RKS <= 3S-2S at %.3f of points (>= 0.9)", fraction), fraction >= 0.9);
  return r.done();
}

Outcome monotone_decay() {
  Report r;
  for (double eps : {0.01, 0.1}) {
    const auto sys = planar_pendulum(eps);
    for (double h : {0.1, 0.05}) {
      const auto traj = integrate(Scheme::three_term(), sys, kPlanarStart, h, step_count(200.0, h));
      const auto H = energy_series(sys, traj).values;
      const auto avg =
          windowed_average(H, static_cast<std::size_t>(std::lround(2.0 * oracle::kPi / h)));
      double worst = -1e300;
      for (std::size_t k = 1; k < avg.size(); ++k) worst = std::max(worst, avg[k] - avg[k - 1]);
      r.add(fmt("eps=%g", eps) + fmt(" h=%g", h) + fmt(" max increase %.2e", worst),
            worst <= 1e-8);
    }
  }
  return r.done();
}

Outcome defect_scaling() {
  const auto mean_defect = [](double eps, double h) {
    const auto sys = planar_pendulum(eps);
    const auto traj =
        integrate(Scheme::three_term(), sys, kPlanarStart, h, step_count(200.0, h));
    const auto d = dissipation_defect(sys, traj).values;
    double s = 0.0;
    for (double x : d) s += std::abs(x);
    return s / static_cast<double>(d.size());
  };
  const double base = mean_defect(0.01, 0.1);
  const double h_half = mean_defect(0.01, 0.05);
  const double eps_half = mean_defect(0.005, 0.1);
  const double rh = base / h_half, re = base / eps_half;
  Report r;
  r.add(fmt("h-halving factor %.3f in [6, 10]", rh), rh >= 6.0 && rh <= 10.0);
  r.add(fmt("eps-halving factor %.3f in [1.8, 2.2]", re), re >= 1.8 && re <= 2.2);
  return r.done();
}

Outcome equilibrium_solver() {
  const auto eq = solve_relative_equilibrium(oracle::releq_params(), -std::sqrt(1.944));
  const double drho = std::abs(eq.rho - std::sqrt(1.08)), dz = std::abs(eq.z + 0.6);
  Report r;
  r.add(fmt("residual %.2e (<= 1e-12)", eq.residual_norm), eq.residual_norm <= 1e-12);
  r.add(fmt("|rho - sqrt(1.08)| %.2e", drho) + fmt(", |z + 0.6| %.2e (<= 1e-9)", dz),
        drho <= 1e-9 && dz <= 1e-9);
  return r.done();
}

Outcome equilibrium_drift_criterion() {
  const auto params = oracle::releq_params();
  const auto eq = solve_relative_equilibrium(params, -std::sqrt(1.944));
  const auto sys = elastic_pendulum(params, 0.1);
  const PhaseState z0 = relative_equilibrium_state(eq);
  std::vector<double> plateaus;
  bool finite = true;
  for (double h : {0.1, 0.05}) {
    const auto traj = integrate(Scheme::three_term(), sys, z0, h, step_count(1000.0, h));
    const auto d = equilibrium_drift(params, traj, eq);
    const double peak = *std::max_element(d.values.begin(), d.values.end());
    finite = finite && std::isfinite(peak) && peak < 0.1;
    plateaus.push_back(plateau_value(d));
  }
  const double ratio = plateaus[0] / plateaus[1];
  const auto heun = equilibrium_drift(
      params, integrate(Scheme::heun_full(), sys, z0, 0.1, 2000), eq);
  const double growth = heun.values[2000] / heun.values[200];
  Report r;
  r.add(fmt("3S plateau h=0.1 %.3e", plateaus[0]) + fmt(", h=0.05 %.3e", plateaus[1]) +
            (finite ? " (bounded)" : " (unbounded)"),
        finite);
  r.add(fmt("plateau ratio %.3f in [3, 5]", ratio), ratio >= 3.0 && ratio <= 5.0);
  r.add(fmt("Heun d(200)/d(20) %.2f (> 10)", growth), growth > 10.0);
  return r.done();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path tmp = RAYLEIGH_TEST_TMP;
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const fs::path cfg = tmp / "determinism.json";
  std::ofstream(cfg) << R"({"problem": "elastic", "scheme": ["3S", "2S", "RKS", "Heun"],
  "epsilon": 0.1, "h": [0.1, 0.2], "t_final": 20.0, "refinement": 100,
  "initial_q": [0.0, 1.55884573, -0.6], "initial_p": [1.34164079, 0.0, 0.0],
  "outputs": ["states", "energy", "momentum", "defect", "drift"]})";
  const std::string cli = RAYLEIGH_CLI_PATH;
  const auto run = [&](const std::string& out, int jobs) {
    const std::string cmd = "\"" + cli + "\" run \"" + cfg.string() + "\" --out \"" +
                            (tmp / out).string() + "\" --jobs " + std::to_string(jobs);
    return std::system(cmd.c_str());
  };
  Report r;
  const int a = run("a", 1), b = run("b", 1), c = run("c", 3);
  r.add("exit codes " + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c),
        a == 0 && b == 0 && c == 0);
  std::size_t files = 0, mismatched = 0;
  if (fs::exists(tmp / "a")) {
    for (const auto& e : fs::recursive_directory_iterator(tmp / "a")) {
      if (e.path().extension() != ".csv") continue;
      const auto rel = fs::relative(e.path(), tmp / "a");
      const std::string ref = slurp(e.path());
      ++files;
      if (ref != slurp(tmp / "b" / rel) || ref != slurp(tmp / "c" / rel)) ++mismatched;
    }
  }
  r.add(std::to_string(files) + " CSVs compared, " + std::to_string(mismatched) + " differ",
        files == 40 && mismatched == 0);
  return r.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"epsilon=0 reduction to Stormer-Verlet", epsilon_zero_reduction},
      {"order 2 of 3S/2S/RKS", second_order},
      {"order 4 triple-jump composition", fourth_order_composition},
      {"exact sub-flows and phi1 identity", exact_subflows},
      {"momentum conservation", momentum_conservation},
      {"rotation equivariance", equivariance},
      {"coordinate invariance", coordinate_invariance},
      {"symplecticity at epsilon=0", symplecticity},
      {"step-size independent dissipation", step_size_independence},
      {"bounded vs linear energy error", bounded_vs_linear},
      {"mutual agreement of the splittings", mutual_agreement},
      {"monotone windowed energy decay", monotone_decay},
      {"dissipation-defect scaling", defect_scaling},
      {"relative-equilibrium solver", equilibrium_solver},
      {"near-preservation of the relative equilibrium", equilibrium_drift_criterion},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), seconds(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
