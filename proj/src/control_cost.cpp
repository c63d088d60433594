#include "thetactl/control_cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thetactl/errors.hpp"
#include "transport.hpp"

namespace thetactl {

namespace {

// Slack on a-priori cost bounds for the nodal quadrature of |rho0|.
constexpr double kBoundSlack = 1.01;

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
}

double trapezoid(std::span<const double> values, double dt) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dt;
}

// int_0^T (a - b)(t) g(t) dt where a, b are the piecewise-linear control
// interpolants the solvers apply and g is known at the time nodes. g is
// replaced on each interval by the cubic through the four nearest nodes and
// the product is integrated exactly with 3-point Gauss-Legendre.
double pairing_integral(std::span<const double> a, std::span<const double> b,
                        std::span<const double> g, double dt) {
  const std::size_t n = g.size() < 2 ? 0 : g.size() - 1;
  if (n == 0) return 0.0;
  if (n < 3) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = (a[i] - b[i]) * g[i];
    return trapezoid(f, dt);
  }
  static const double r = std::sqrt(0.6) / 2.0;
  const double nodes[3] = {0.5 - r, 0.5, 0.5 + r};
  const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = std::min(i == 0 ? 0 : i - 1, n - 3);
    double interval = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double x = static_cast<double>(i - s) + nodes[q];  // local coordinate on s..s+3
      double gx = 0.0;
      for (int p = 0; p < 4; ++p) {
        double l = 1.0;
        for (int o = 0; o < 4; ++o) {
          if (o != p) l *= (x - o) / static_cast<double>(p - o);
        }
        gx += l * g[s + static_cast<std::size_t>(p)];
      }
      const double c0 = a[i] - b[i];
      const double c1 = a[i + 1] - b[i + 1];
      interval += weights[q] * ((1.0 - nodes[q]) * c0 + nodes[q] * c1) * gx;
    }
    total += interval;
  }
  return total * dt;
}

}  // namespace

double terminal_mismatch(double theta, double target) { return 1.0 - std::cos(theta - target); }

double terminal_cost(const SpectralField& mu_terminal, const TargetPhase& target,
                     const GridSpec& grid) {
  target.check(grid);
  const PhysicalField mu = to_physical(mu_terminal, grid);
  const double dtheta = kTwoPi / grid.n_modes;
  double total = 0.0;
  for (int j = 0; j < grid.n_eta; ++j) {
    const double aim = target.values[static_cast<std::size_t>(j)];
    double s = 0.0;
    for (int m = 0; m < grid.n_modes; ++m) s += mu(j, m) * terminal_mismatch(grid.theta(m), aim);
    total += grid.eta_weight(j) * dtheta * s;
  }
  return total;
}

double control_energy(const ControlSignal& u, double alpha) {
  require_alpha(alpha);
  std::vector<double> sq(u.size());
  std::transform(u.samples().begin(), u.samples().end(), sq.begin(),
                 [](double v) { return v * v; });
  return 0.5 * alpha * trapezoid(sq, u.dt());
}

CostBreakdown total_cost_p1(const ControlSignal& u, const SpectralField& rho0,
                            const TargetPhase& target, double alpha, const GridSpec& grid) {
  require_alpha(alpha);
  const Trajectory mu = solve_forward(rho0, u, grid, grid.n_steps);
  CostBreakdown c;
  c.problem = Problem::p1;
  c.terminal = terminal_cost(mu.final(), target, grid);
  c.running = grid.horizon == 0.0 ? 0.0 : control_energy(u, alpha);
  c.total = c.terminal + c.running;
  return c;
}

double control_pairing(const SpectralField& mu, const SpectralField& xi, const GridSpec& grid) {
  detail::TransportOperator op(grid);
  return op.pairing(to_physical(mu, grid), to_physical(xi, grid));
}

double hamiltonian(const SpectralField& mu, const SpectralField& xi, double u, double alpha,
                   const GridSpec& grid) {
  require_alpha(alpha);
  const double g = control_pairing(mu, xi, grid);
  return u * g - 0.5 * alpha * u * u;
}

double feedback_control(const SpectralField& mu, const SpectralField& xi, double alpha,
                        const GridSpec& grid) {
  require_alpha(alpha);
  return control_pairing(mu, xi, grid) / alpha;
}

double increment_via_formula(const Trajectory& mu_new, const Trajectory& xi_old,
                             const ControlSignal& u_new, const ControlSignal& u_old,
                             double alpha, const GridSpec& grid) {
  require_alpha(alpha);
  mu_new.check_covers(grid);
  xi_old.check_covers(grid);
  if (grid.horizon == 0.0) return 0.0;
  u_new.check(grid);
  u_old.check(grid);

  detail::TransportOperator op(grid);
  PhysicalField mu(grid);
  PhysicalField xi(grid);
  // H(u) - H(u_old) = (u - u_old) g - (alpha/2)(u^2 - u_old^2). The
  // quadratic term uses the same trapezoid as control_energy, so it matches
  // the cost definition exactly.
  std::vector<double> g(static_cast<std::size_t>(grid.n_steps) + 1);
  for (int i = 0; i <= grid.n_steps; ++i) {
    op.to_physical(mu_new.at_step(i), mu);
    op.to_physical(xi_old.at_step(i), xi);
    g[static_cast<std::size_t>(i)] = op.pairing(mu, xi);
  }
  const double gain = pairing_integral(u_new.samples(), u_old.samples(), g, grid.dt());
  return -(gain - (control_energy(u_new, alpha) - control_energy(u_old, alpha)));
}

MeanFieldControl meanfield_feedback(const Trajectory& xi, double alpha, const GridSpec& grid) {
  require_alpha(alpha);
  xi.check_covers(grid);
  detail::TransportOperator op(grid);
  PhysicalField nodal(grid);
  Trajectory w(Direction::forward, xi.stride(), xi.n_steps(), xi.dt());
  for (std::size_t s = 0; s < xi.stored_count(); ++s) {
    op.to_physical(xi.stored(s), nodal);
    for (int j = 0; j < grid.n_eta; ++j) {
      auto row = nodal.slice(j);
      for (int m = 0; m < grid.n_modes; ++m) {
        row[static_cast<std::size_t>(m)] *= op.one_plus_cos(m) / alpha;
      }
    }
    w.append(to_spectral(nodal, grid));
  }
  return MeanFieldControl{std::move(w)};
}

MeanFieldControl zero_meanfield_control(const GridSpec& grid) {
  Trajectory w(Direction::forward, grid.n_steps, grid.n_steps, grid.dt());
  w.append(SpectralField(grid));
  w.append(SpectralField(grid));
  return MeanFieldControl{std::move(w)};
}

CostBreakdown total_cost_p2(const MeanFieldControl& w, const SpectralField& rho0,
                            const TargetPhase& target, double alpha, const GridSpec& grid) {
  require_alpha(alpha);
  grid.validate();
  if (!rho0.matches(grid)) throw ConfigError("total_cost_p2: field shape does not match grid");
  const Trajectory& ws = w.samples;
  ws.check_covers(grid);

  detail::TransportOperator op(grid);
  std::vector<PhysicalField> w_nodal;
  w_nodal.reserve(ws.stored_count());
  double w_max = 0.0;
  for (std::size_t s = 0; s < ws.stored_count(); ++s) {
    PhysicalField p(grid);
    op.to_physical(ws.stored(s), p);
    for (double v : p.data()) w_max = std::max(w_max, std::abs(v));
    w_nodal.push_back(std::move(p));
  }
  // A feedback field is typically far larger than any ensemble control (the
  // dual steepens where characteristics bunch up), so each grid step is
  // split into equal substeps that satisfy the stability guard.
  const double ratio = grid.dt() * grid.n_modes * (2.0 + 2.0 * (w_max + grid.max_abs_eta())) /
                       2.0 / 2.8;
  const int substeps = std::max(1, static_cast<int>(std::ceil(ratio)));
  GridSpec fine = grid;
  fine.n_steps = grid.n_steps * substeps;
  check_stability(fine, w_max);

  PhysicalField w_now(grid);
  auto control_at = [&](double t) -> const PhysicalField& {
    if (w_nodal.size() == 1) return w_nodal.front();
    const double span = ws.dt() * ws.stride();
    const double s = std::clamp(t / span, 0.0, static_cast<double>(w_nodal.size() - 1));
    auto index = static_cast<std::size_t>(s);
    if (index + 1 >= w_nodal.size()) index = w_nodal.size() - 2;
    const double lambda = s - static_cast<double>(index);
    if (lambda == 0.0) return w_nodal[index];
    auto out = w_now.data();
    auto a = w_nodal[index].data();
    auto b = w_nodal[index + 1].data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - lambda) * a[i] + lambda * b[i];
    return w_now;
  };

  PhysicalField mu_nodal(grid);
  PhysicalField w_sq(grid);
  auto running_density = [&](const SpectralField& f, double t) {
    op.to_physical(f, mu_nodal);
    const PhysicalField& wt = control_at(t);
    auto sq = w_sq.data();
    auto src = wt.data();
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = src[i] * src[i];
    return op.weighted_sum(mu_nodal, w_sq);
  };
  // The flow transports |mu| as well, so int |mu_t| = int |rho0| =: V and
  //   |int F dmu_T| <= 2 V,   |int w_t^2 dmu_t| <= max w_t^2 V.
  // A feedback field can concentrate the density below the grid scale; when
  // the discrete solution breaks these bounds its cost means nothing.
  double variation = 0.0;
  {
    op.to_physical(rho0, mu_nodal);
    for (int j = 0; j < grid.n_eta; ++j) {
      double row = 0.0;
      for (double v : mu_nodal.slice(j)) row += std::abs(v);
      variation += grid.eta_weight(j) * row * (kTwoPi / grid.n_modes);
    }
  }
  auto unresolved = [&](double t) {
    return NumericError("total_cost_p2: discrete density violates the a-priori cost bounds at t = " +
                        std::to_string(t) + "; the grid does not resolve this control (refine n_modes)");
  };
  auto check_running = [&](double value, double t) {
    double w_peak = 0.0;
    for (double v : control_at(t).data()) w_peak = std::max(w_peak, v * v);
    if (std::abs(value) > kBoundSlack * w_peak * variation) throw unresolved(t);
  };

  CostBreakdown c;
  c.problem = Problem::p2;
  if (grid.horizon == 0.0) {
    c.terminal = terminal_cost(rho0, target, grid);
    c.total = c.terminal;
    return c;
  }

  detail::Rk4 rk(grid);
  SpectralField f = rho0;
  std::vector<double> running(static_cast<std::size_t>(fine.n_steps) + 1);
  running[0] = running_density(f, 0.0);
  auto rhs = [&](const SpectralField& state, double t, SpectralField& k) {
    op.apply(state, 0.0, &control_at(t), k);
  };
  for (int i = 0; i < fine.n_steps; ++i) {
    rk.step(f, fine.time(i), fine.dt(), rhs);
    if (!f.all_finite()) {
      throw NumericError("total_cost_p2: blow-up at step " + std::to_string(i + 1));
    }
    running[static_cast<std::size_t>(i) + 1] = running_density(f, fine.time(i + 1));
    check_running(running[static_cast<std::size_t>(i) + 1], fine.time(i + 1));
  }
  c.terminal = terminal_cost(f, target, grid);
  if (std::abs(c.terminal) > kBoundSlack * 2.0 * variation) throw unresolved(grid.horizon);
  c.running = 0.5 * alpha * trapezoid(running, fine.dt());
  c.total = c.terminal + c.running;
  return c;
}

}  // namespace thetactl
