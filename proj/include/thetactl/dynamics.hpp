#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "thetactl/grid.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl {

/// Ensemble control u(t) sampled at t_i = i dt, i = 0..n_steps, and read as
/// the continuous piecewise-linear interpolant (clamped outside [0, T]).
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(std::vector<double> samples, double dt);

  static ControlSignal zeros(const GridSpec& grid);
  static ControlSignal from_function(const GridSpec& grid, const std::function<double(double)>& u);

  double operator()(double t) const;

  [[nodiscard]] std::span<const double> samples() const { return samples_; }
  [[nodiscard]] std::span<double> samples() { return samples_; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] double horizon() const;
  [[nodiscard]] double max_abs() const;

  /// Throws ConfigError unless length is n_steps + 1 with the grid's dt and
  /// every sample is finite.
  void check(const GridSpec& grid) const;

  bool operator==(const ControlSignal&) const = default;

 private:
  std::vector<double> samples_;
  double dt_ = 0.0;
};

/// Target phase theta_check(eta_j), one value per eta node.
struct TargetPhase {
  std::vector<double> values;

  static TargetPhase constant(const GridSpec& grid, double phase);
  /// Linear interpolation in eta (nearest end value outside the grid).
  [[nodiscard]] double at_eta(double eta, const GridSpec& grid) const;
  void check(const GridSpec& grid) const;
};

enum class Direction { forward, backward };

/// Time-indexed fields stored every `stride` steps. Stored entry i always
/// holds the field at step i * stride, whichever way it was integrated.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(Direction direction, int stride, int n_steps, double dt);

  [[nodiscard]] Direction direction() const { return direction_; }
  [[nodiscard]] int stride() const { return stride_; }
  [[nodiscard]] int n_steps() const { return n_steps_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] std::size_t stored_count() const { return fields_.size(); }
  [[nodiscard]] int stored_step(std::size_t index) const {
    return static_cast<int>(index) * stride_;
  }

  [[nodiscard]] const SpectralField& stored(std::size_t index) const { return fields_.at(index); }
  [[nodiscard]] const SpectralField& initial() const { return fields_.front(); }
  [[nodiscard]] const SpectralField& final() const { return fields_.back(); }

  /// Field at a time-grid step; linear interpolation between stored entries.
  [[nodiscard]] SpectralField at_step(int step) const;
  /// Field at an arbitrary time in [0, T].
  [[nodiscard]] SpectralField at_time(double t) const;

  /// Throws ConfigError unless the stored entries cover {0, ..., n_steps}
  /// for this grid.
  void check_covers(const GridSpec& grid) const;

  // Used by the solvers while integrating.
  void append(SpectralField field) { fields_.push_back(std::move(field)); }
  void reverse_storage();

 private:
  Direction direction_ = Direction::forward;
  int stride_ = 1;
  int n_steps_ = 0;
  double dt_ = 0.0;
  std::vector<SpectralField> fields_;
};

/// Observer called with (step, field) at every time step of a solve.
using StepObserver = std::function<void(int step, const SpectralField& field)>;

/// Theta-neuron phase velocity (1 - cos theta) + (1 + cos theta)(u + eta).
double velocity(double theta, double eta, double u);

/// -d/dtheta (v_u f) per slice: the product is formed at the collocation
/// nodes, transformed, optionally truncated by the 2/3 rule, and multiplied
/// by -ik. The Nyquist mode of the derivative is set to zero.
SpectralField continuity_rhs(const SpectralField& f, double u, const GridSpec& grid);

/// One classical RK4 step of df/dt = continuity_rhs(f, u(t)) from t to
/// t + sign * dt, with the control evaluated at the stage times.
SpectralField step_rk4(const SpectralField& f, const std::function<double(double)>& u_of_t,
                       double t, double dt, int sign, const GridSpec& grid);

/// Largest admissible max|v| for the grid: 2 * 2.8 / (dt * M).
double stability_limit(const GridSpec& grid);
/// Throws StabilityError when dt * M * (2 + 2(|u| + max|eta|)) / 2 > 2.8.
void check_stability(const GridSpec& grid, double max_abs_control);

/// Smallest divisor of n_steps that keeps a stored trajectory under the
/// byte budget.
int default_storage_stride(const GridSpec& grid, std::size_t budget_bytes = std::size_t{512} << 20);

Trajectory solve_forward(const SpectralField& rho0, const ControlSignal& u, const GridSpec& grid,
                         int stride = 1, const StepObserver& observer = {});

/// Exact Fourier modes of sin(theta_check(eta_j) - theta): only k = +-1.
SpectralField terminal_dual(const TargetPhase& target, const GridSpec& grid);

/// Integrates the same continuity equation from xi_T at t = T down to t = 0.
Trajectory solve_backward(const SpectralField& xi_terminal, const ControlSignal& u,
                          const GridSpec& grid, int stride = 1);

struct ClosedLoopResult {
  Trajectory density;
  ControlSignal control;
};

/// Forward solve under the feedback u_t[mu] = (1/alpha) int xi_t (1 + cos theta) dmu,
/// re-evaluated at every RK4 stage with the stage field. xi is linearly
/// interpolated in time between its stored entries.
ClosedLoopResult solve_closed_loop(const Trajectory& xi, const SpectralField& rho0, double alpha,
                                   const GridSpec& grid, int stride = 1);

}  // namespace thetactl
