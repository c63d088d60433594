#pragma once

#include "thetactl/dynamics.hpp"
#include "thetactl/grid.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl {

/// P1: ensemble control u(t).  P2: mean-field control w_t(theta, eta).
enum class Problem { p1, p2 };

struct CostBreakdown {
  double terminal = 0.0;
  double running = 0.0;
  double total = 0.0;
  Problem problem = Problem::p1;
};

/// Mean-field (distributed) control w_t(theta, eta), stored like a trajectory.
struct MeanFieldControl {
  Trajectory samples;
};

/// F(theta, omega) = 1 - cos(theta - omega).
double terminal_mismatch(double theta, double target);

/// int F(theta, theta_check(eta)) dmu_T.
double terminal_cost(const SpectralField& mu_terminal, const TargetPhase& target,
                     const GridSpec& grid);

/// (alpha / 2) * trapezoid(u^2) over [0, T].
double control_energy(const ControlSignal& u, double alpha);

/// Forward solve under u, then terminal_cost + control_energy.
CostBreakdown total_cost_p1(const ControlSignal& u, const SpectralField& rho0,
                            const TargetPhase& target, double alpha, const GridSpec& grid);

/// g = int xi (1 + cos theta) dmu, products formed at the collocation nodes.
double control_pairing(const SpectralField& mu, const SpectralField& xi, const GridSpec& grid);

/// H(mu, xi, u) = u g - (alpha / 2) u^2.
double hamiltonian(const SpectralField& mu, const SpectralField& xi, double u, double alpha,
                   const GridSpec& grid);

/// argmax_u H(mu, xi, u) = g / alpha.
double feedback_control(const SpectralField& mu, const SpectralField& xi, double alpha,
                        const GridSpec& grid);

/// I[u_new] - I[u_old] from the increment representation
///   -dI = int_0^T H(mu_t, xi_t, u_new) - H(mu_t, xi_t, u_old) dt,
/// where mu follows u_new and xi is the dual of u_old. The pairing term is
/// integrated against the piecewise-linear controls the solvers actually
/// apply (cubic-in-time g, exact per interval); the quadratic term uses the
/// same trapezoid as control_energy.
double increment_via_formula(const Trajectory& mu_new, const Trajectory& xi_old,
                             const ControlSignal& u_new, const ControlSignal& u_old,
                             double alpha, const GridSpec& grid);

/// w_t = (1/alpha) xi_t (1 + cos theta) at every stored entry of xi.
MeanFieldControl meanfield_feedback(const Trajectory& xi, double alpha, const GridSpec& grid);

/// J[w]: forward solve with the distributed control plus
/// (alpha / 2) int_0^T int w_t^2 dmu_t dt (trapezoidal in t). w is linear in
/// t between its stored entries; each grid step is split into as many equal
/// substeps as the stability guard requires for max|w|.
CostBreakdown total_cost_p2(const MeanFieldControl& w, const SpectralField& rho0,
                            const TargetPhase& target, double alpha, const GridSpec& grid);

/// w == 0 on the grid's time axis (stored at both ends only).
MeanFieldControl zero_meanfield_control(const GridSpec& grid);

}  // namespace thetactl
