#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "thetactl/control_cost.hpp"
#include "thetactl/dynamics.hpp"

namespace thetactl {

struct ProblemSpec {
  GridSpec grid;
  SpectralField rho0;
  TargetPhase target;
  double alpha = 1.0;
  double epsilon = 0.01;
  int max_iters = 100;
  ControlSignal initial_guess;
  /// Storage stride for the dual and closed-loop trajectories; 0 selects
  /// default_storage_stride(grid).
  int storage_stride = 0;

  void validate() const;
  [[nodiscard]] int resolved_stride() const;
};

enum class StopReason { converged, max_iters, nondecrease_guard };

const char* to_string(StopReason reason);

struct IterationRecord {
  int iteration = 0;
  CostBreakdown cost;
  std::uint64_t control_checksum = 0;
};

struct OptimizeReport {
  /// Entry 0 is the initial guess.
  std::vector<IterationRecord> iterations;
  StopReason stop_reason = StopReason::max_iters;
  /// Lowest-cost control encountered.
  ControlSignal final_control;

  /// I^{k-1} - I^k for the last recorded pair (0 with fewer than two entries).
  [[nodiscard]] double final_gap() const;
};

struct Improvement {
  ControlSignal control;
  CostBreakdown cost;
  Trajectory density;
};

/// 64-bit FNV-1a over the IEEE bit patterns of the samples.
std::uint64_t control_checksum(const ControlSignal& u);

/// One descent step: dual of u_bar backward from xi_T, then the closed-loop
/// forward solve; the realized feedback is the new control.
Improvement improve(const ControlSignal& u_bar, const ProblemSpec& spec);

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Repeats improve() until I^{k-1} - I^k < epsilon, max_iters improvements
/// were made, or a step fails to decrease the cost.
OptimizeReport optimize(const ProblemSpec& spec, const IterationCallback& on_iteration = {});

}  // namespace thetactl
