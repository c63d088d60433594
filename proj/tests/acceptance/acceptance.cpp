// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status
// is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "thetactl/control_cost.hpp"
#include "thetactl/errors.hpp"
#include "thetactl/initial_data.hpp"
#include "thetactl/optimizer.hpp"
#include "thetactl/particles.hpp"

using namespace thetactl;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpectralField paper_rho(const GridSpec& g) {
  SpectralField f = to_spectral(paper_cossin2_density(g), g);
  normalize_mass(f, g);
  return f;
}

ProblemSpec desk_problem() {
  ProblemSpec spec;
  spec.grid = desk_grid();
  spec.rho0 = paper_rho(spec.grid);
  spec.target = TargetPhase::constant(spec.grid, pi);
  spec.alpha = 1.0;
  spec.epsilon = 0.01;
  spec.initial_guess = ControlSignal::zeros(spec.grid);
  return spec;
}

double linf(const PhysicalField& a, const PhysicalField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    e = std::max(e, std::abs(a.data()[i] - b.data()[i]));
  return e;
}

// Shared by several criteria: the optimized desk control.
OptimizeReport g_report;
bool g_have_report = false;

Outcome monotone_descent() {
  const auto t0 = std::chrono::steady_clock::now();
  g_report = optimize(desk_problem());
  g_have_report = true;
  const double elapsed = seconds_since(t0);
  const auto& it = g_report.iterations;
  bool strict = true;
  for (std::size_t i = 1; i < it.size(); ++i) strict = strict && it[i].cost.total < it[i - 1].cost.total;
  const bool stopped_by_eps = g_report.stop_reason == StopReason::converged;
  const bool below_start = it.back().cost.total < it.front().cost.total;
  std::string detail = "I: ";
  for (const auto& r : it) detail += fmt("%.10f ", r.cost.total);
  detail += std::string("stop=") + to_string(g_report.stop_reason) + fmt(" time=%.1fs", elapsed);
  return {strict && stopped_by_eps && below_start && elapsed < 300.0, detail};
}

struct IncrementGap {
  double formula = 0.0;
  double direct = 0.0;
  [[nodiscard]] double abs_gap() const { return std::abs(formula - direct); }
  [[nodiscard]] double rel_gap() const { return abs_gap() / std::abs(direct); }
};

IncrementGap increment_gap(const GridSpec& g) {
  const SpectralField rho = paper_rho(g);
  const TargetPhase tgt = TargetPhase::constant(g, pi);
  const ControlSignal zero = ControlSignal::zeros(g);
  const ControlSignal u =
      ControlSignal::from_function(g, [&](double t) { return 0.2 * std::sin(2 * pi * t / g.horizon); });
  const Trajectory xi = solve_backward(terminal_dual(tgt, g), zero, g);
  const Trajectory mu = solve_forward(rho, u, g);
  IncrementGap r;
  r.formula = increment_via_formula(mu, xi, u, zero, 1.0, g);
  r.direct = total_cost_p1(u, rho, tgt, 1.0, g).total - total_cost_p1(zero, rho, tgt, 1.0, g).total;
  return r;
}

Outcome increment_identity() {
  const IncrementGap desk = increment_gap(desk_grid());
  // theta and t refined together at fixed d_eta, dt M fixed
  std::vector<double> gaps;
  for (int level : {0, 1, 2}) {
    GridSpec g = desk_grid();
    g.n_modes = 64 << level;
    g.n_steps = 600 << level;
    gaps.push_back(increment_gap(g).abs_gap());
  }
  const double p1 = std::log2(gaps[0] / gaps[1]);
  const double p2 = std::log2(gaps[1] / gaps[2]);
  const bool ok = desk.rel_gap() <= 1e-3 && p1 >= 2.0 && p2 >= 2.0;
  return {ok, fmt("desk rel_gap=%.3e (formula %.10f, direct %.10f); ", desk.rel_gap(), desk.formula,
                  desk.direct) +
                  fmt("ladder gaps %.3e %.3e %.3e", gaps[0], gaps[1], gaps[2]) +
                  fmt(" observed order %.3f %.3f", p1, p2)};
}

Outcome conservation() {
  const GridSpec g = desk_grid();
  const SpectralField rho = paper_rho(g);
  const ControlSignal u = g_have_report ? g_report.final_control : ControlSignal::zeros(g);
  std::vector<double> m0(g.slice_count());
  for (int j = 0; j < g.n_eta; ++j) m0[static_cast<std::size_t>(j)] = slice_mass(rho, j);
  double worst_slice = 0.0, worst_total = 0.0;
  bool ok = true;
  solve_forward(rho, u, g, g.n_steps, [&](int, const SpectralField& f) {
    for (int j = 0; j < g.n_eta; ++j) {
      const double ref = m0[static_cast<std::size_t>(j)];
      const double drift = std::abs(slice_mass(f, j) - ref);
      if (drift > 1e-12 * std::abs(ref)) ok = false;
      if (ref != 0.0) worst_slice = std::max(worst_slice, drift / std::abs(ref));
    }
    const double dm = std::abs(total_mass(f, g) - 1.0);
    worst_total = std::max(worst_total, dm);
    if (dm > 1e-10) ok = false;
  });
  return {ok, fmt("max slice drift %.3e (relative), max |mass-1| %.3e over %g steps", worst_slice,
                  worst_total, g.n_steps)};
}

double round_trip_error(const GridSpec& g, const ControlSignal& u) {
  const SpectralField rho = paper_rho(g);
  const Trajectory fw = solve_forward(rho, u, g);
  const Trajectory bw = solve_backward(fw.final(), u, g);
  return linf(to_physical(bw.initial(), g), to_physical(rho, g));
}

Outcome reversibility() {
  const GridSpec g = desk_grid();
  const double e0 = round_trip_error(g, ControlSignal::zeros(g));
  const double e1 = round_trip_error(
      g, ControlSignal::from_function(g, [&](double t) { return 0.2 * std::sin(2 * pi * t / g.horizon); }));
  std::string detail = fmt("L_inf error %.3e (u = 0), %.3e (u = 0.2 sin(2 pi t / T))", e0, e1);
  if (g_have_report) {
    // The optimized control focuses the density into the dealiasing band, where
    // truncation is not reversible; reported, not judged.
    detail += fmt("; info: %.3e under the optimized control", round_trip_error(g, g_report.final_control));
  }
  return {e0 <= 1e-6 && e1 <= 1e-6, detail};
}

Outcome rigid_rotation() {
  const GridSpec g = desk_grid();
  const SpectralField rho = paper_rho(g);
  const int j1 = g.n_eta - 1;  // eta = 1
  const double scale = 1.0 / (2 * pi);  // normalization of the four-mode density
  double worst = 0.0;
  PhysicalField ref(1, g.n_modes);
  solve_forward(rho, ControlSignal::zeros(g), g, g.n_steps, [&](int step, const SpectralField& f) {
    const PhysicalField p = to_physical(f, g);
    const double t = g.time(step);
    for (int m = 0; m < g.n_modes; ++m) {
      const double th = g.theta(m) - 2 * t;
      const double exact = scale * (2 + 3 * std::cos(2 * th) - 2 * std::sin(2 * th)) * g.eta(j1);
      worst = std::max(worst, std::abs(p(j1, m) - exact));
    }
  });
  return {worst <= 1e-6, fmt("max L_inf deviation %.3e over all %g steps", worst, g.n_steps)};
}

Outcome spiking_frequency() {
  bool ok = true;
  std::string detail;
  for (double eta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double v = spike_period(eta, 1e-4) * std::sqrt(eta);
    ok = ok && std::abs(v - pi) <= 1e-3 * pi;
    detail += fmt("eta=%g: %.7f  ", eta, v);
  }
  return {ok, detail + "(target pi)"};
}

Outcome meanfield_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g = desk_grid();
  const TargetPhase tgt = TargetPhase::constant(g, pi);
  const ControlSignal u = g_have_report ? g_report.final_control : ControlSignal::zeros(g);
  const PhysicalField density = von_mises_density(g, 2.0, 0.0);
  SpectralField rho = to_spectral(density, g);
  normalize_mass(rho, g);
  const double pde = total_cost_p1(u, rho, tgt, 1.0, g).terminal;
  const std::size_t n = 200000;
  const ParticleEnsemble e = simulate(sample_initial(density, g, n, 0), u, g.dt());
  const EmpiricalEstimate est = empirical_terminal_cost(e, tgt, g);
  const double elapsed = seconds_since(t0);
  const double z = std::abs(est.mean - pde) / est.standard_error;
  return {z <= 3.0 && elapsed < 120.0,
          fmt("von Mises(2, 0) x uniform, n=2e5: PDE %.6f, particles %.6f +- %.6f (|z| = %.2f)", pde,
              est.mean, est.standard_error, z) +
              fmt(", time %.1fs", elapsed)};
}

Outcome feedback_optimality() {
  const GridSpec g = desk_grid();
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> alpha_dist(0.05, 10.0);
  const double delta = 1e-3;
  int violations = 0;
  double tightest = std::numeric_limits<double>::infinity();
  // Random band-limited densities (positive by construction) and duals.
  auto random_field = [&](int max_k, bool positive) {
    SpectralField f(g);
    for (int j = 0; j < g.n_eta; ++j) {
      f.set_coeff(j, 0, positive ? 1.0 / (2 * pi) : n01(rng));
      for (int k = 1; k <= max_k; ++k) {
        const Complex c(n01(rng), n01(rng));
        const double scale = positive ? 0.5 / (2 * pi * max_k * std::abs(c)) : 0.3;
        f.set_coeff(j, k, scale * c);
        f.set_coeff(j, -k, scale * std::conj(c));
      }
    }
    if (positive) normalize_mass(f, g);
    return f;
  };
  for (int i = 0; i < 100; ++i) {
    const SpectralField mu = random_field(6, true);
    const SpectralField xi = random_field(4, false);
    const double alpha = alpha_dist(rng);
    const double u = feedback_control(mu, xi, alpha, g);
    const double h = hamiltonian(mu, xi, u, alpha, g);
    for (double s : {-delta, delta}) {
      const double margin = h - hamiltonian(mu, xi, u + s, alpha, g);
      if (margin < 0.0) ++violations;
      tightest = std::min(tightest, margin);
    }
  }
  return {violations == 0, fmt("%g violations in 200 comparisons; smallest margin %.3e", violations, tightest)};
}

std::pair<double, double> p2_costs(const GridSpec& g) {
  const SpectralField rho = paper_rho(g);
  const TargetPhase tgt = TargetPhase::constant(g, pi);
  const double j0 = total_cost_p2(zero_meanfield_control(g), rho, tgt, 1.0, g).total;
  const Trajectory xi = solve_backward(terminal_dual(tgt, g), ControlSignal::zeros(g), g);
  const double j1 = total_cost_p2(meanfield_feedback(xi, 1.0, g), rho, tgt, 1.0, g).total;
  return {j1, j0};
}

Outcome p2_improvement() {
  try {
    const auto [j1, j0] = p2_costs(desk_grid());
    return {j1 < j0, fmt("J[w]=%.10f  J[0]=%.10f", j1, j0)};
  } catch (const NumericError& e) {
    // Same comparison with the theta grid refined far enough to resolve the
    // focused density; reported, not judged.
    GridSpec fine = desk_grid();
    fine.n_modes = 512;
    fine.n_steps = 4800;
    std::string info;
    try {
      const auto [j1, j0] = p2_costs(fine);
      info = fmt("; info: at n_modes=512, n_steps=4800: J[w]=%.6f  J[0]=%.6f", j1, j0);
    } catch (const std::exception& e2) {
      info = std::string("; info: n_modes=512 also failed: ") + e2.what();
    }
    return {false, std::string("numeric error: ") + e.what() + info};
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"monotone_descent", monotone_descent},
      {"increment_identity", increment_identity},
      {"conservation", conservation},
      {"reversibility", reversibility},
      {"rigid_rotation", rigid_rotation},
      {"spiking_frequency", spiking_frequency},
      {"meanfield_consistency", meanfield_consistency},
      {"feedback_optimality", feedback_optimality},
      {"p2_improvement", p2_improvement},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
