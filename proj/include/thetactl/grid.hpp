#pragma once

#include <cstddef>
#include <numbers>

namespace thetactl {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Discretization of the cylinder S^1 x [eta_min, eta_max] and of [0, T].
///
/// Phases use n_modes uniform collocation nodes theta_m = 2 pi m / M. The
/// current eta is sampled on n_eta uniform nodes (a single node at the
/// midpoint when n_eta == 1) and integrated with trapezoidal weights. A
/// single node over a zero-width interval acts as a point mass of weight 1.
struct GridSpec {
  int n_modes = 128;
  int n_eta = 51;
  double eta_min = 0.0;
  double eta_max = 1.0;
  double horizon = 6.0;
  int n_steps = 1200;
  bool dealias = true;

  /// Throws ConfigError on any violated invariant. A zero horizon is
  /// accepted as the degenerate "no evolution" grid.
  void validate() const;

  [[nodiscard]] double dt() const { return horizon / n_steps; }
  [[nodiscard]] double time(int step) const { return step * dt(); }
  [[nodiscard]] double theta(int m) const { return kTwoPi * m / n_modes; }
  [[nodiscard]] double eta(int j) const;
  [[nodiscard]] double eta_weight(int j) const;
  [[nodiscard]] double eta_span() const { return eta_max - eta_min; }
  [[nodiscard]] double max_abs_eta() const;
  [[nodiscard]] std::size_t slice_count() const { return static_cast<std::size_t>(n_eta); }
  [[nodiscard]] std::size_t node_count() const {
    return static_cast<std::size_t>(n_eta) * static_cast<std::size_t>(n_modes);
  }
  /// Largest |k| kept by the 2/3 rule (or M/2 when dealiasing is off).
  [[nodiscard]] int retained_wavenumber() const;

  bool operator==(const GridSpec&) const = default;
};

/// 128 modes, d_eta = 0.02, dt = 0.005 on T = 6, eta in [0, 1].
GridSpec desk_grid();
/// 512 modes, d_eta = dt = 0.002 on T = 6, eta in [0, 1].
GridSpec paper_grid();

}  // namespace thetactl
