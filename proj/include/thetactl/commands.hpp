#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "thetactl/config.hpp"
#include "thetactl/dynamics.hpp"
#include "thetactl/particles.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl {

inline constexpr std::array<std::string_view, 6> kSubcommands = {
    "solve-forward", "optimize",        "simulate-particles",
    "compare",       "increment-check", "export-meanfield"};

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitConfig = 2;

/// Library version written into every manifest.
std::string_view version();

/// Nodal initial density from a spec ("paper_cossin2", "paper_clipped",
/// "uniform", "vonmises:<kappa>:<mean>", "table:<path>"), not normalized.
PhysicalField resolve_density_nodal(std::string_view spec, const GridSpec& grid);
/// Spectral initial density, normalized to unit mass when config.normalize.
SpectralField resolve_density(const RunConfig& config, std::ostream& log);
TargetPhase resolve_target(std::string_view spec, const GridSpec& grid);
/// "zero", "constant:<v>", "sine:<amp>" (amp sin(2 pi t / T)), "table:<path>".
ControlSignal resolve_control(std::string_view spec, const GridSpec& grid);

/// Runs one subcommand, writing its files and manifest.txt under out_dir.
/// Returns 0 on success, 2 on configuration errors (nothing written when
/// the failure is detected before solving), 1 on numeric failures. Errors
/// are reported as a single line on `log`.
int run_subcommand(std::string_view name, const RunConfig& config,
                   const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace thetactl
