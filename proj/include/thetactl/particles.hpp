#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "thetactl/dynamics.hpp"
#include "thetactl/grid.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl {

/// Finite theta-neuron ensemble: phases and frozen baseline currents.
struct ParticleEnsemble {
  std::vector<double> thetas;
  std::vector<double> etas;

  [[nodiscard]] std::size_t size() const { return thetas.size(); }
  void check() const;
};

/// SplitMix64 used as a counter-based generator: the value for (seed, counter)
/// does not depend on any other draw.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

/// Inverse-CDF sampling from nodal density values: eta from the trapezoidal
/// marginal over the eta nodes, then theta from the conditional (a linear
/// mix of the two neighbouring slices) with its cumulative tabulated over the
/// collocation cells and interpolated linearly. Particle k uses counters
/// 3k .. 3k+2 only. Throws ConfigError for negative or massless densities.
ParticleEnsemble sample_initial(const PhysicalField& density, const GridSpec& grid, std::size_t n,
                                std::uint64_t seed);

/// RK4 on theta' = v_u(theta, eta) with piecewise-linear u up to T = u.horizon().
/// Phases are wrapped into [0, 2 pi) on output only.
ParticleEnsemble simulate(const ParticleEnsemble& ensemble, const ControlSignal& u, double dt);

/// Free-running (u = 0) interspike interval from theta = pi, located by
/// linear interpolation of the unwrapped phase crossing 3 pi.
double spike_period(double eta, double dt);

struct EmpiricalEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Mean of F(theta_k, theta_check(eta_k)) and its standard error.
EmpiricalEstimate empirical_terminal_cost(const ParticleEnsemble& ensemble,
                                          const TargetPhase& target, const GridSpec& grid);

/// Mean of e^{i theta_k}.
std::complex<double> order_parameter(const ParticleEnsemble& ensemble);
/// int e^{i theta} dmu = sum_j w_j 2 pi c_{-1}(eta_j).
std::complex<double> order_parameter(const SpectralField& field, const GridSpec& grid);

}  // namespace thetactl
