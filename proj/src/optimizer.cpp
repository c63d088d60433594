#include "thetactl/optimizer.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "thetactl/errors.hpp"

namespace thetactl {

void ProblemSpec::validate() const {
  grid.validate();
  if (!(grid.horizon > 0.0)) throw ConfigError("problem: horizon must be > 0");
  if (!rho0.matches(grid)) throw ConfigError("problem: initial density does not match the grid");
  target.check(grid);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("problem: alpha must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("problem: epsilon must be > 0");
  if (max_iters < 0) throw ConfigError("problem: max_iters must be >= 0");
  initial_guess.check(grid);
  if (storage_stride < 0 || (storage_stride > 0 && grid.n_steps % storage_stride != 0)) {
    throw ConfigError("problem: storage_stride must divide n_steps");
  }
}

int ProblemSpec::resolved_stride() const {
  return storage_stride > 0 ? storage_stride : default_storage_stride(grid);
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::converged:
      return "converged";
    case StopReason::max_iters:
      return "max_iters";
    case StopReason::nondecrease_guard:
      return "nondecrease_guard";
  }
  return "unknown";
}

double OptimizeReport::final_gap() const {
  if (iterations.size() < 2) return 0.0;
  return iterations[iterations.size() - 2].cost.total - iterations.back().cost.total;
}

std::uint64_t control_checksum(const ControlSignal& u) {
  std::uint64_t h = 14695981039346656037ULL;
  for (double v : u.samples()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

Improvement improve(const ControlSignal& u_bar, const ProblemSpec& spec) {
  const GridSpec& grid = spec.grid;
  const int stride = spec.resolved_stride();
  const SpectralField xi_terminal = terminal_dual(spec.target, grid);
  const Trajectory xi = solve_backward(xi_terminal, u_bar, grid, stride);
  ClosedLoopResult loop = solve_closed_loop(xi, spec.rho0, spec.alpha, grid, stride);
  CostBreakdown cost = total_cost_p1(loop.control, spec.rho0, spec.target, spec.alpha, grid);
  return Improvement{std::move(loop.control), cost, std::move(loop.density)};
}

OptimizeReport optimize(const ProblemSpec& spec, const IterationCallback& on_iteration) {
  spec.validate();
  OptimizeReport report;
  auto record = [&](int k, const CostBreakdown& cost, const ControlSignal& u) {
    report.iterations.push_back(IterationRecord{k, cost, control_checksum(u)});
    if (on_iteration) on_iteration(report.iterations.back());
  };

  ControlSignal current = spec.initial_guess;
  CostBreakdown current_cost =
      total_cost_p1(current, spec.rho0, spec.target, spec.alpha, spec.grid);
  record(0, current_cost, current);

  report.stop_reason = StopReason::max_iters;
  for (int k = 1; k <= spec.max_iters; ++k) {
    Improvement next;
    try {
      next = improve(current, spec);
    } catch (const StabilityError& e) {
      throw StabilityError("iteration " + std::to_string(k) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("iteration " + std::to_string(k) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(k) + ": " + e.what());
    }
    record(k, next.cost, next.control);
    const double drop = current_cost.total - next.cost.total;
    if (!(drop > 0.0)) {
      report.stop_reason = StopReason::nondecrease_guard;
      break;
    }
    current = std::move(next.control);
    current_cost = next.cost;
    if (drop < spec.epsilon) {
      report.stop_reason = StopReason::converged;
      break;
    }
  }
  report.final_control = std::move(current);
  return report;
}

}  // namespace thetactl
