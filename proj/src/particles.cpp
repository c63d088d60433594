#include "thetactl/particles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "thetactl/control_cost.hpp"
#include "thetactl/errors.hpp"
#include "thetactl/initial_data.hpp"

namespace thetactl {

namespace {

/// Position s in [0, 1] with CDF fraction r for a cell whose density varies
/// linearly from a to b.
double invert_linear_cell(double a, double b, double r) {
  const double q = r * 0.5 * (a + b);
  const double disc = a * a + 2.0 * (b - a) * q;
  const double denom = a + std::sqrt(std::max(disc, 0.0));
  if (!(denom > 0.0)) return r;
  return std::clamp(2.0 * q / denom, 0.0, 1.0);
}

/// Cumulative masses of the cells between consecutive samples.
struct CellTable {
  std::vector<double> cumulative;  // size cells + 1, starts at 0

  std::size_t locate(double target) const {
    auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), target);
    auto cell = static_cast<std::size_t>(it - cumulative.begin()) - 1;
    return std::min(cell, cumulative.size() - 2);
  }
  double total() const { return cumulative.back(); }
};

double wrap_phase(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

}  // namespace

void ParticleEnsemble::check() const {
  if (thetas.size() != etas.size()) {
    throw ConfigError("particles: thetas and etas differ in length");
  }
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

ParticleEnsemble sample_initial(const PhysicalField& density, const GridSpec& grid, std::size_t n,
                                std::uint64_t seed) {
  grid.validate();
  if (!density.matches(grid)) throw ConfigError("sample_initial: density does not match grid");
  if (const NegativeNode worst = most_negative_node(density); worst.value < 0.0) {
    throw ConfigError("sample_initial: density is negative (min " + std::to_string(worst.value) +
                      " at eta_j = " + std::to_string(grid.eta(worst.eta_index)) +
                      ", theta_m = " + std::to_string(grid.theta(worst.theta_index)) + ")");
  }

  const int M = grid.n_modes;
  const double dtheta = kTwoPi / M;
  std::vector<CellTable> theta_tables(grid.slice_count());
  std::vector<double> slice_mass_values(grid.slice_count());
  for (int j = 0; j < grid.n_eta; ++j) {
    auto row = density.slice(j);
    auto& cum = theta_tables[static_cast<std::size_t>(j)].cumulative;
    cum.assign(static_cast<std::size_t>(M) + 1, 0.0);
    for (int m = 0; m < M; ++m) {
      const double a = row[static_cast<std::size_t>(m)];
      const double b = row[static_cast<std::size_t>((m + 1) % M)];
      cum[static_cast<std::size_t>(m) + 1] = cum[static_cast<std::size_t>(m)] + 0.5 * (a + b) * dtheta;
    }
    slice_mass_values[static_cast<std::size_t>(j)] = cum.back();
  }

  CellTable eta_table;
  const int eta_cells = std::max(grid.n_eta - 1, 1);
  const double deta = grid.n_eta > 1 ? grid.eta_span() / (grid.n_eta - 1) : 0.0;
  eta_table.cumulative.assign(static_cast<std::size_t>(eta_cells) + 1, 0.0);
  if (grid.n_eta == 1) {
    eta_table.cumulative[1] = slice_mass_values[0];
  } else {
    for (int c = 0; c < eta_cells; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      eta_table.cumulative[ci + 1] =
          eta_table.cumulative[ci] + 0.5 * (slice_mass_values[ci] + slice_mass_values[ci + 1]) * deta;
    }
  }
  if (!(eta_table.total() > 0.0)) throw ConfigError("sample_initial: density has zero mass");

  const CounterRng rng(seed);
  ParticleEnsemble out;
  out.thetas.resize(n);
  out.etas.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t base = 3 * static_cast<std::uint64_t>(k);
    std::size_t slice = 0;
    if (grid.n_eta == 1) {
      out.etas[k] = grid.eta(0);
    } else {
      const double target = rng.uniform(base) * eta_table.total();
      const std::size_t c = eta_table.locate(target);
      const double a = slice_mass_values[c];
      const double b = slice_mass_values[c + 1];
      const double cell_mass = eta_table.cumulative[c + 1] - eta_table.cumulative[c];
      const double r = cell_mass > 0.0 ? (target - eta_table.cumulative[c]) / cell_mass : 0.5;
      const double s = invert_linear_cell(a, b, std::clamp(r, 0.0, 1.0));
      out.etas[k] = std::min(grid.eta(static_cast<int>(c)) + s * deta, grid.eta_max);
      const double upper = s * b;
      const double mix = (1.0 - s) * a + upper;
      const double p_upper = mix > 0.0 ? upper / mix : s;
      slice = rng.uniform(base + 1) < p_upper ? c + 1 : c;
    }
    const CellTable& table = theta_tables[slice];
    const double target = rng.uniform(base + 2) * table.total();
    const std::size_t m = table.locate(target);
    auto row = density.slice(static_cast<int>(slice));
    const double a = row[m];
    const double b = row[(m + 1) % static_cast<std::size_t>(M)];
    const double cell_mass = table.cumulative[m + 1] - table.cumulative[m];
    const double r = cell_mass > 0.0 ? (target - table.cumulative[m]) / cell_mass : 0.5;
    const double s = invert_linear_cell(a, b, std::clamp(r, 0.0, 1.0));
    out.thetas[k] = wrap_phase(grid.theta(static_cast<int>(m)) + s * dtheta);
  }
  return out;
}

ParticleEnsemble simulate(const ParticleEnsemble& ensemble, const ControlSignal& u, double dt) {
  ensemble.check();
  const double horizon = u.horizon();
  ParticleEnsemble out = ensemble;
  if (horizon == 0.0) {
    for (double& th : out.thetas) th = wrap_phase(th);
    return out;
  }
  if (!(dt > 0.0)) throw ConfigError("simulate: dt must be > 0");
  const double steps_real = horizon / dt;
  const auto n_steps = static_cast<long>(std::llround(steps_real));
  if (n_steps < 1 || std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9 * steps_real) {
    throw ConfigError("simulate: dt must divide T");
  }

  std::vector<double> u_start(static_cast<std::size_t>(n_steps));
  std::vector<double> u_mid(static_cast<std::size_t>(n_steps));
  std::vector<double> u_end(static_cast<std::size_t>(n_steps));
  for (long i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const auto ii = static_cast<std::size_t>(i);
    u_start[ii] = u(t);
    u_mid[ii] = u(t + 0.5 * dt);
    u_end[ii] = u(static_cast<double>(i + 1) * dt);
  }

  for (std::size_t k = 0; k < out.size(); ++k) {
    double theta = out.thetas[k];
    const double eta = out.etas[k];
    for (std::size_t i = 0; i < u_start.size(); ++i) {
      const double k1 = velocity(theta, eta, u_start[i]);
      const double k2 = velocity(theta + 0.5 * dt * k1, eta, u_mid[i]);
      const double k3 = velocity(theta + 0.5 * dt * k2, eta, u_mid[i]);
      const double k4 = velocity(theta + dt * k3, eta, u_end[i]);
      theta += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!std::isfinite(theta)) {
      throw NumericError("simulate: non-finite phase for particle " + std::to_string(k));
    }
    out.thetas[k] = wrap_phase(theta);
  }
  return out;
}

double spike_period(double eta, double dt) {
  if (!(eta > 0.0)) throw ConfigError("spike_period: eta must be > 0");
  if (!(dt > 0.0)) throw ConfigError("spike_period: dt must be > 0");
  constexpr double pi = std::numbers::pi;
  const double limit = 10.0 * pi / std::sqrt(eta);
  const double target = 3.0 * pi;
  double theta = pi;
  double t = 0.0;
  while (t <= limit) {
    const double k1 = velocity(theta, eta, 0.0);
    const double k2 = velocity(theta + 0.5 * dt * k1, eta, 0.0);
    const double k3 = velocity(theta + 0.5 * dt * k2, eta, 0.0);
    const double k4 = velocity(theta + dt * k3, eta, 0.0);
    const double next = theta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next >= target) return t + dt * (target - theta) / (next - theta);
    theta = next;
    t += dt;
  }
  throw NumericError("spike_period: no spike detected within " + std::to_string(limit));
}

EmpiricalEstimate empirical_terminal_cost(const ParticleEnsemble& ensemble,
                                          const TargetPhase& target, const GridSpec& grid) {
  ensemble.check();
  const std::size_t n = ensemble.size();
  if (n == 0) return {};
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += terminal_mismatch(ensemble.thetas[k], target.at_eta(ensemble.etas[k], grid));
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d =
        terminal_mismatch(ensemble.thetas[k], target.at_eta(ensemble.etas[k], grid)) - mean;
    sq += d * d;
  }
  const double variance = n > 1 ? sq / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(variance / static_cast<double>(n))};
}

std::complex<double> order_parameter(const ParticleEnsemble& ensemble) {
  if (ensemble.size() == 0) return {};
  std::complex<double> sum = 0.0;
  for (double th : ensemble.thetas) sum += std::polar(1.0, th);
  return sum / static_cast<double>(ensemble.size());
}

std::complex<double> order_parameter(const SpectralField& field, const GridSpec& grid) {
  if (!field.matches(grid)) throw ConfigError("order_parameter: field does not match grid");
  std::complex<double> sum = 0.0;
  for (int j = 0; j < grid.n_eta; ++j) sum += grid.eta_weight(j) * kTwoPi * field.coeff(j, -1);
  return sum;
}

}  // namespace thetactl
