#pragma once

#include <filesystem>
#include <string>

#include "thetactl/dynamics.hpp"
#include "thetactl/optimizer.hpp"
#include "thetactl/particles.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl {

// All files: mandatory header, '.' decimal separator, LF line endings,
// shortest round-trip number formatting.

/// `t,u`
void write_control_csv(const std::filesystem::path& path, const ControlSignal& u);
ControlSignal read_control_csv(const std::filesystem::path& path, const GridSpec& grid);

/// `theta,<value_name>` rows, eta-major; e.g. `theta,eta,rho`.
void write_field_csv(const std::filesystem::path& path, const PhysicalField& f,
                     const GridSpec& grid, const std::string& value_name = "rho");
/// Reads a table written by write_field_csv; nodes must match the grid.
PhysicalField read_field_csv(const std::filesystem::path& path, const GridSpec& grid,
                             const std::string& value_name = "rho");

/// `iter,terminal,running,total,delta` (delta = previous total - total; nan first).
void write_cost_history_csv(const std::filesystem::path& path, const OptimizeReport& report);

/// `theta,eta`
void write_particles_csv(const std::filesystem::path& path, const ParticleEnsemble& ensemble);

/// `eta,target`; one row per eta node.
TargetPhase read_target_csv(const std::filesystem::path& path, const GridSpec& grid);
void write_target_csv(const std::filesystem::path& path, const TargetPhase& target,
                      const GridSpec& grid);

/// `delta_formula,delta_direct,rel_gap`
void write_increment_report_csv(const std::filesystem::path& path, double formula, double direct,
                                double rel_gap);

/// File-name label for a snapshot time ("density_t" + label + ".csv").
std::string time_label(double t);

}  // namespace thetactl
