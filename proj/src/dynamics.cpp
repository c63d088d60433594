#include "thetactl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thetactl/errors.hpp"
#include "transport.hpp"

namespace thetactl {

namespace {

void require_field(const SpectralField& f, const GridSpec& grid, const char* what) {
  if (!f.matches(grid)) {
    throw ConfigError(std::string(what) + ": field shape does not match grid");
  }
}

void require_stride(int stride, const GridSpec& grid) {
  if (stride < 1 || grid.n_steps % stride != 0) {
    throw ConfigError("storage stride " + std::to_string(stride) + " does not divide n_steps " +
                      std::to_string(grid.n_steps));
  }
}

void require_finite(const SpectralField& f, int step, double t, const char* what) {
  if (!f.all_finite()) {
    throw NumericError(std::string(what) + ": blow-up (non-finite coefficients) at step " +
                       std::to_string(step) + " (t = " + std::to_string(t) + ")");
  }
}

double max_speed(const GridSpec& grid, double max_abs_control) {
  return 2.0 + 2.0 * (std::abs(max_abs_control) + grid.max_abs_eta());
}

}  // namespace

ControlSignal::ControlSignal(std::vector<double> samples, double dt)
    : samples_(std::move(samples)), dt_(dt) {}

ControlSignal ControlSignal::zeros(const GridSpec& grid) {
  return ControlSignal(std::vector<double>(static_cast<std::size_t>(grid.n_steps) + 1, 0.0),
                       grid.dt());
}

ControlSignal ControlSignal::from_function(const GridSpec& grid,
                                           const std::function<double(double)>& u) {
  std::vector<double> s(static_cast<std::size_t>(grid.n_steps) + 1);
  for (int i = 0; i <= grid.n_steps; ++i) s[static_cast<std::size_t>(i)] = u(grid.time(i));
  return ControlSignal(std::move(s), grid.dt());
}

double ControlSignal::operator()(double t) const {
  if (samples_.empty()) return 0.0;
  const std::size_t last = samples_.size() - 1;
  if (last == 0 || !(dt_ > 0.0) || t <= 0.0) return samples_.front();
  const double s = t / dt_;
  if (s >= static_cast<double>(last)) return samples_.back();
  const auto i = static_cast<std::size_t>(s);
  const double lambda = s - static_cast<double>(i);
  if (lambda == 0.0) return samples_[i];
  return (1.0 - lambda) * samples_[i] + lambda * samples_[i + 1];
}

double ControlSignal::horizon() const {
  return samples_.empty() ? 0.0 : dt_ * static_cast<double>(samples_.size() - 1);
}

double ControlSignal::max_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

void ControlSignal::check(const GridSpec& grid) const {
  if (samples_.size() != static_cast<std::size_t>(grid.n_steps) + 1) {
    throw ConfigError("control: expected " + std::to_string(grid.n_steps + 1) +
                      " samples, got " + std::to_string(samples_.size()));
  }
  if (std::abs(dt_ - grid.dt()) > 1e-12 * std::max(1.0, grid.dt())) {
    throw ConfigError("control: sample spacing does not match the grid time step");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw ConfigError("control: non-finite sample");
  }
}

TargetPhase TargetPhase::constant(const GridSpec& grid, double phase) {
  return TargetPhase{std::vector<double>(grid.slice_count(), phase)};
}

double TargetPhase::at_eta(double eta, const GridSpec& grid) const {
  if (values.size() == 1 || grid.n_eta == 1) return values.front();
  const double h = grid.eta_span() / (grid.n_eta - 1);
  const double s = (eta - grid.eta_min) / h;
  if (s <= 0.0) return values.front();
  if (s >= grid.n_eta - 1) return values.back();
  const auto i = static_cast<std::size_t>(s);
  const double lambda = s - static_cast<double>(i);
  return (1.0 - lambda) * values[i] + lambda * values[i + 1];
}

void TargetPhase::check(const GridSpec& grid) const {
  if (values.size() != grid.slice_count()) {
    throw ConfigError("target: expected one phase per eta node (" + std::to_string(grid.n_eta) +
                      "), got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("target: non-finite phase");
  }
}

Trajectory::Trajectory(Direction direction, int stride, int n_steps, double dt)
    : direction_(direction), stride_(stride), n_steps_(n_steps), dt_(dt) {}

SpectralField Trajectory::at_step(int step) const {
  if (step < 0 || step > n_steps_) {
    throw ConfigError("trajectory: step " + std::to_string(step) + " outside [0, " +
                      std::to_string(n_steps_) + "]");
  }
  const auto index = static_cast<std::size_t>(step / stride_);
  const int rem = step % stride_;
  if (rem == 0) return fields_.at(index);
  const double lambda = static_cast<double>(rem) / stride_;
  SpectralField out = fields_.at(index);
  out *= 1.0 - lambda;
  out.add_scaled(fields_.at(index + 1), lambda);
  return out;
}

SpectralField Trajectory::at_time(double t) const {
  if (fields_.size() == 1 || !(dt_ > 0.0)) return fields_.front();
  const double s = std::clamp(t / (dt_ * stride_), 0.0, static_cast<double>(fields_.size() - 1));
  const auto index = static_cast<std::size_t>(s);
  const double lambda = s - static_cast<double>(index);
  if (lambda == 0.0 || index + 1 >= fields_.size()) return fields_[index];
  SpectralField out = fields_[index];
  out *= 1.0 - lambda;
  out.add_scaled(fields_[index + 1], lambda);
  return out;
}

void Trajectory::check_covers(const GridSpec& grid) const {
  if (fields_.empty()) throw ConfigError("trajectory: empty");
  if (grid.horizon == 0.0) return;
  if (n_steps_ != grid.n_steps || std::abs(dt_ - grid.dt()) > 1e-12 * grid.dt()) {
    throw ConfigError("trajectory: time grid does not match (" + std::to_string(n_steps_) +
                      " steps vs " + std::to_string(grid.n_steps) + ")");
  }
  if (grid.n_steps % stride_ != 0 ||
      fields_.size() != static_cast<std::size_t>(grid.n_steps / stride_) + 1) {
    throw ConfigError("trajectory: stored entries do not cover [0, T] at stride " +
                      std::to_string(stride_));
  }
  if (!fields_.front().matches(grid)) throw ConfigError("trajectory: field shape mismatch");
}

void Trajectory::reverse_storage() { std::reverse(fields_.begin(), fields_.end()); }

double velocity(double theta, double eta, double u) {
  const double c = std::cos(theta);
  return (1.0 - c) + (1.0 + c) * (u + eta);
}

SpectralField continuity_rhs(const SpectralField& f, double u, const GridSpec& grid) {
  require_field(f, grid, "continuity_rhs");
  detail::TransportOperator op(grid);
  SpectralField out(grid);
  op.apply(f, u, nullptr, out);
  return out;
}

SpectralField step_rk4(const SpectralField& f, const std::function<double(double)>& u_of_t,
                       double t, double dt, int sign, const GridSpec& grid) {
  require_field(f, grid, "step_rk4");
  if (sign != 1 && sign != -1) throw ConfigError("step_rk4: sign must be +1 or -1");
  detail::TransportOperator op(grid);
  detail::Rk4 rk(grid);
  SpectralField out = f;
  rk.step(out, t, sign * dt, [&](const SpectralField& state, double time, SpectralField& k) {
    op.apply(state, u_of_t(time), nullptr, k);
  });
  require_finite(out, 1, t + sign * dt, "step_rk4");
  return out;
}

double stability_limit(const GridSpec& grid) { return 2.0 * 2.8 / (grid.dt() * grid.n_modes); }

void check_stability(const GridSpec& grid, double max_abs_control) {
  if (grid.horizon == 0.0) return;
  const double speed = max_speed(grid, max_abs_control);
  const double number = grid.dt() * grid.n_modes * speed / 2.0;
  if (!(number <= 2.8)) {
    throw StabilityError("stability guard: dt*M*max|v|/2 = " + std::to_string(number) +
                         " exceeds 2.8 (max|u| = " + std::to_string(max_abs_control) +
                         ", dt = " + std::to_string(grid.dt()) +
                         ", M = " + std::to_string(grid.n_modes) + ")");
  }
}

int default_storage_stride(const GridSpec& grid, std::size_t budget_bytes) {
  const std::size_t per_field = grid.node_count() * sizeof(Complex);
  const std::size_t max_fields = per_field == 0 ? 0 : budget_bytes / per_field;
  for (int s = 1; s <= grid.n_steps; ++s) {
    if (grid.n_steps % s != 0) continue;
    if (static_cast<std::size_t>(grid.n_steps / s) + 1 <= max_fields) return s;
  }
  return grid.n_steps;
}

Trajectory solve_forward(const SpectralField& rho0, const ControlSignal& u, const GridSpec& grid,
                         int stride, const StepObserver& observer) {
  grid.validate();
  require_field(rho0, grid, "solve_forward");
  if (grid.horizon == 0.0) {
    Trajectory traj(Direction::forward, 1, 0, 0.0);
    traj.append(rho0);
    if (observer) observer(0, rho0);
    return traj;
  }
  u.check(grid);
  require_stride(stride, grid);
  check_stability(grid, u.max_abs());

  detail::TransportOperator op(grid);
  detail::Rk4 rk(grid);
  const double dt = grid.dt();
  Trajectory traj(Direction::forward, stride, grid.n_steps, dt);
  SpectralField f = rho0;
  traj.append(f);
  if (observer) observer(0, f);
  auto rhs = [&](const SpectralField& state, double t, SpectralField& k) {
    op.apply(state, u(t), nullptr, k);
  };
  for (int i = 0; i < grid.n_steps; ++i) {
    rk.step(f, grid.time(i), dt, rhs);
    require_finite(f, i + 1, grid.time(i + 1), "solve_forward");
    if ((i + 1) % stride == 0) traj.append(f);
    if (observer) observer(i + 1, f);
  }
  return traj;
}

SpectralField terminal_dual(const TargetPhase& target, const GridSpec& grid) {
  grid.validate();
  target.check(grid);
  SpectralField xi(grid);
  // sin(a - theta) = (e^{ia} e^{-i theta} - e^{-ia} e^{i theta}) / (2i)
  const Complex inv_2i(0.0, -0.5);
  for (int j = 0; j < grid.n_eta; ++j) {
    const double a = target.values[static_cast<std::size_t>(j)];
    const Complex e = std::polar(1.0, a);
    xi.set_coeff(j, -1, inv_2i * e);
    xi.set_coeff(j, 1, -inv_2i * std::conj(e));
  }
  return xi;
}

Trajectory solve_backward(const SpectralField& xi_terminal, const ControlSignal& u,
                          const GridSpec& grid, int stride) {
  grid.validate();
  require_field(xi_terminal, grid, "solve_backward");
  if (grid.horizon == 0.0) {
    Trajectory traj(Direction::backward, 1, 0, 0.0);
    traj.append(xi_terminal);
    return traj;
  }
  u.check(grid);
  require_stride(stride, grid);
  check_stability(grid, u.max_abs());

  detail::TransportOperator op(grid);
  detail::Rk4 rk(grid);
  const double dt = grid.dt();
  Trajectory traj(Direction::backward, stride, grid.n_steps, dt);
  SpectralField f = xi_terminal;
  traj.append(f);
  auto rhs = [&](const SpectralField& state, double t, SpectralField& k) {
    op.apply(state, u(t), nullptr, k);
  };
  for (int i = grid.n_steps; i > 0; --i) {
    rk.step(f, grid.time(i), -dt, rhs);
    require_finite(f, i - 1, grid.time(i - 1), "solve_backward");
    if ((i - 1) % stride == 0) traj.append(f);
  }
  traj.reverse_storage();
  return traj;
}

ClosedLoopResult solve_closed_loop(const Trajectory& xi, const SpectralField& rho0, double alpha,
                                   const GridSpec& grid, int stride) {
  grid.validate();
  require_field(rho0, grid, "solve_closed_loop");
  if (!(alpha > 0.0)) throw ConfigError("closed loop: alpha must be > 0");
  xi.check_covers(grid);

  detail::TransportOperator op(grid);
  PhysicalField mu_nodal(grid);
  std::vector<PhysicalField> xi_nodal;
  xi_nodal.reserve(xi.stored_count());
  for (std::size_t s = 0; s < xi.stored_count(); ++s) {
    PhysicalField p(grid);
    op.to_physical(xi.stored(s), p);
    xi_nodal.push_back(std::move(p));
  }

  auto feedback = [&](const PhysicalField& mu, double t) {
    if (xi_nodal.size() == 1) return op.pairing(mu, xi_nodal.front()) / alpha;
    const double span = xi.dt() * xi.stride();
    const double s = std::clamp(t / span, 0.0, static_cast<double>(xi_nodal.size() - 1));
    auto index = static_cast<std::size_t>(s);
    if (index + 1 >= xi_nodal.size()) index = xi_nodal.size() - 2;
    const double lambda = s - static_cast<double>(index);
    double g = (1.0 - lambda) * op.pairing(mu, xi_nodal[index]);
    if (lambda != 0.0) g += lambda * op.pairing(mu, xi_nodal[index + 1]);
    return g / alpha;
  };

  std::vector<double> realized(static_cast<std::size_t>(grid.n_steps) + 1, 0.0);
  if (grid.horizon == 0.0) {
    op.to_physical(rho0, mu_nodal);
    Trajectory traj(Direction::forward, 1, 0, 0.0);
    traj.append(rho0);
    realized.assign(1, feedback(mu_nodal, 0.0));
    return {std::move(traj), ControlSignal(std::move(realized), 0.0)};
  }
  require_stride(stride, grid);

  const double limit = stability_limit(grid);
  const double dt = grid.dt();
  detail::Rk4 rk(grid);
  Trajectory traj(Direction::forward, stride, grid.n_steps, dt);
  SpectralField f = rho0;
  traj.append(f);

  int step = 0;
  bool first_stage = true;
  auto rhs = [&](const SpectralField& state, double t, SpectralField& k) {
    op.to_physical(state, mu_nodal);
    const double u = feedback(mu_nodal, t);
    if (!std::isfinite(u)) {
      throw NumericError("closed loop: non-finite feedback control at step " +
                         std::to_string(step));
    }
    if (max_speed(grid, u) > limit) check_stability(grid, u);
    if (first_stage) {
      realized[static_cast<std::size_t>(step)] = u;
      first_stage = false;
    }
    op.apply_physical(mu_nodal, u, nullptr, k);
  };
  for (step = 0; step < grid.n_steps; ++step) {
    first_stage = true;
    rk.step(f, grid.time(step), dt, rhs);
    require_finite(f, step + 1, grid.time(step + 1), "solve_closed_loop");
    if ((step + 1) % stride == 0) traj.append(f);
  }
  op.to_physical(f, mu_nodal);
  realized.back() = feedback(mu_nodal, grid.horizon);
  return {std::move(traj), ControlSignal(std::move(realized), dt)};
}

}  // namespace thetactl
