#include "thetactl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>

#include "thetactl/control_cost.hpp"
#include "thetactl/csv_io.hpp"
#include "thetactl/errors.hpp"
#include "thetactl/initial_data.hpp"
#include "thetactl/optimizer.hpp"

#ifndef THETACTL_VERSION
#define THETACTL_VERSION "0.0.0"
#endif

namespace thetactl {

namespace fs = std::filesystem;

namespace {

std::vector<int> snapshot_steps(const GridSpec& grid) {
  return {0, grid.n_steps / 2, grid.n_steps};
}

void write_manifest(const fs::path& dir, std::string_view command, const RunConfig& config) {
  std::ofstream out(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest in " + dir.string());
  out << "# thetactl " << version() << '\n'
      << "# command=" << command << '\n'
      << config.to_text();
}

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
}

/// Forward solve recording nodal snapshots at the given steps.
std::map<int, PhysicalField> forward_snapshots(const SpectralField& rho0, const ControlSignal& u,
                                               const GridSpec& grid) {
  std::map<int, PhysicalField> snaps;
  const auto wanted = snapshot_steps(grid);
  solve_forward(rho0, u, grid, grid.n_steps, [&](int step, const SpectralField& f) {
    if (std::find(wanted.begin(), wanted.end(), step) != wanted.end()) {
      snaps.emplace(step, to_physical(f, grid));
    }
  });
  return snaps;
}

void write_snapshots(const fs::path& dir, const std::string& prefix,
                     const std::map<int, PhysicalField>& snaps, const GridSpec& grid,
                     const std::string& value_name) {
  for (const auto& [step, field] : snaps) {
    write_field_csv(dir / (prefix + time_label(grid.time(step)) + ".csv"), field, grid,
                    value_name);
  }
}

struct Context {
  const RunConfig& config;
  const fs::path& out;
  std::ostream& log;
};

void cmd_solve_forward(const Context& ctx) {
  const GridSpec& grid = ctx.config.grid;
  const SpectralField rho0 = resolve_density(ctx.config, ctx.log);
  const TargetPhase target = resolve_target(ctx.config.target, grid);
  const ControlSignal u = resolve_control(ctx.config.control, grid);
  check_stability(grid, u.max_abs());
  prepare_output(ctx.out);

  const auto snaps = forward_snapshots(rho0, u, grid);
  OptimizeReport report;
  report.iterations.push_back(
      {0, total_cost_p1(u, rho0, target, ctx.config.alpha, grid), control_checksum(u)});
  report.final_control = u;
  write_control_csv(ctx.out / "control.csv", u);
  write_cost_history_csv(ctx.out / "cost_history.csv", report);
  write_snapshots(ctx.out, "density_t", snaps, grid, "rho");
}

void cmd_optimize(const Context& ctx) {
  const GridSpec& grid = ctx.config.grid;
  ProblemSpec spec;
  spec.grid = grid;
  spec.rho0 = resolve_density(ctx.config, ctx.log);
  spec.target = resolve_target(ctx.config.target, grid);
  spec.alpha = ctx.config.alpha;
  spec.epsilon = ctx.config.epsilon;
  spec.max_iters = ctx.config.max_iters;
  spec.initial_guess = resolve_control(ctx.config.control, grid);
  spec.storage_stride = ctx.config.storage_stride;
  spec.validate();
  check_stability(grid, spec.initial_guess.max_abs());
  prepare_output(ctx.out);

  const OptimizeReport report = optimize(spec, [&](const IterationRecord& rec) {
    ctx.log << "iter " << rec.iteration << " total=" << format_real(rec.cost.total)
            << " terminal=" << format_real(rec.cost.terminal)
            << " running=" << format_real(rec.cost.running) << '\n';
  });
  ctx.log << "stop: " << to_string(report.stop_reason) << '\n';

  write_control_csv(ctx.out / "control.csv", report.final_control);
  write_cost_history_csv(ctx.out / "cost_history.csv", report);
  write_snapshots(ctx.out, "density_t", forward_snapshots(spec.rho0, report.final_control, grid),
                  grid, "rho");
}

void cmd_simulate_particles(const Context& ctx) {
  const GridSpec& grid = ctx.config.grid;
  const PhysicalField density = resolve_density_nodal(ctx.config.initial_density, grid);
  const ControlSignal u = resolve_control(ctx.config.control, grid);
  const ParticleEnsemble initial =
      sample_initial(density, grid, ctx.config.particles_n, ctx.config.seed);
  prepare_output(ctx.out);
  const ParticleEnsemble final_state = simulate(initial, u, grid.dt());
  write_particles_csv(ctx.out / "particles_initial.csv", initial);
  write_particles_csv(ctx.out / "particles.csv", final_state);
}

void cmd_compare(const Context& ctx) {
  const GridSpec& grid = ctx.config.grid;
  const PhysicalField nodal = resolve_density_nodal(ctx.config.initial_density, grid);
  const SpectralField rho0 = resolve_density(ctx.config, ctx.log);
  const TargetPhase target = resolve_target(ctx.config.target, grid);
  const ControlSignal u = resolve_control(ctx.config.control, grid);
  check_stability(grid, u.max_abs());
  const ParticleEnsemble initial = sample_initial(nodal, grid, ctx.config.particles_n, ctx.config.seed);
  prepare_output(ctx.out);

  const double pde = terminal_cost(solve_forward(rho0, u, grid, grid.n_steps).final(), target, grid);
  const EmpiricalEstimate particle =
      empirical_terminal_cost(simulate(initial, u, grid.dt()), target, grid);
  const double z = particle.standard_error > 0.0
                       ? (particle.mean - pde) / particle.standard_error
                       : 0.0;
  std::ofstream out(ctx.out / "compare.csv", std::ios::binary | std::ios::trunc);
  out << "pde_terminal,particle_terminal,particle_se,n,z_score\n"
      << format_real(pde) << ',' << format_real(particle.mean) << ','
      << format_real(particle.standard_error) << ',' << initial.size() << ','
      << format_real(z) << '\n';
}

void cmd_increment_check(const Context& ctx) {
  const GridSpec& grid = ctx.config.grid;
  const SpectralField rho0 = resolve_density(ctx.config, ctx.log);
  const TargetPhase target = resolve_target(ctx.config.target, grid);
  const ControlSignal u_old = resolve_control(ctx.config.control, grid);
  const ControlSignal u_new = resolve_control(ctx.config.probe_control, grid);
  check_stability(grid, std::max(u_old.max_abs(), u_new.max_abs()));
  prepare_output(ctx.out);

  const int stride = ctx.config.storage_stride > 0 ? ctx.config.storage_stride
                                                   : default_storage_stride(grid);
  const Trajectory xi = solve_backward(terminal_dual(target, grid), u_old, grid, stride);
  const Trajectory mu = solve_forward(rho0, u_new, grid, stride);
  const double formula = increment_via_formula(mu, xi, u_new, u_old, ctx.config.alpha, grid);
  const double direct = total_cost_p1(u_new, rho0, target, ctx.config.alpha, grid).total -
                        total_cost_p1(u_old, rho0, target, ctx.config.alpha, grid).total;
  const double gap = std::abs(formula - direct) / std::abs(direct);
  write_increment_report_csv(ctx.out / "increment_report.csv", formula, direct, gap);
  ctx.log << "delta_formula=" << format_real(formula) << " delta_direct=" << format_real(direct)
          << " rel_gap=" << format_real(gap) << '\n';
}

void cmd_export_meanfield(const Context& ctx) {
  const GridSpec& grid = ctx.config.grid;
  const SpectralField rho0 = resolve_density(ctx.config, ctx.log);
  const TargetPhase target = resolve_target(ctx.config.target, grid);
  const ControlSignal u_bar = resolve_control(ctx.config.control, grid);
  check_stability(grid, u_bar.max_abs());
  prepare_output(ctx.out);

  const int stride = ctx.config.storage_stride > 0 ? ctx.config.storage_stride
                                                   : default_storage_stride(grid);
  const Trajectory xi = solve_backward(terminal_dual(target, grid), u_bar, grid, stride);
  const MeanFieldControl w = meanfield_feedback(xi, ctx.config.alpha, grid);
  std::map<int, PhysicalField> snaps;
  for (int step : snapshot_steps(grid)) snaps.emplace(step, to_physical(w.samples.at_step(step), grid));
  write_snapshots(ctx.out, "meanfield_t", snaps, grid, "w");

  const CostBreakdown zero = total_cost_p2(zero_meanfield_control(grid), rho0, target,
                                           ctx.config.alpha, grid);
  const CostBreakdown fed = total_cost_p2(w, rho0, target, ctx.config.alpha, grid);
  std::ofstream out(ctx.out / "p2_cost.csv", std::ios::binary | std::ios::trunc);
  out << "control,terminal,running,total\n"
      << "zero," << format_real(zero.terminal) << ',' << format_real(zero.running) << ','
      << format_real(zero.total) << '\n'
      << "feedback," << format_real(fed.terminal) << ',' << format_real(fed.running) << ','
      << format_real(fed.total) << '\n';
}

}  // namespace

std::string_view version() { return THETACTL_VERSION; }

PhysicalField resolve_density_nodal(std::string_view spec, const GridSpec& grid) {
  if (spec == "paper_cossin2") return paper_cossin2_density(grid);
  if (spec == "paper_clipped") return paper_clipped_density(grid);
  if (spec == "uniform") return uniform_density(grid);
  if (spec.starts_with("vonmises:")) {
    const auto rest = spec.substr(9);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("initial_density: expected vonmises:<kappa>:<mean>");
    }
    return von_mises_density(grid, parse_real(rest.substr(0, colon), "vonmises kappa"),
                             parse_real(rest.substr(colon + 1), "vonmises mean"));
  }
  if (spec.starts_with("table:")) return read_field_csv(fs::path(spec.substr(6)), grid, "rho");
  throw ConfigError("initial_density: unknown spec '" + std::string(spec) + "'");
}

SpectralField resolve_density(const RunConfig& config, std::ostream& log) {
  const PhysicalField nodal = resolve_density_nodal(config.initial_density, config.grid);
  if (const NegativeNode worst = most_negative_node(nodal); worst.value < 0.0) {
    log << "warning: initial density '" << config.initial_density
        << "' is signed (min " << format_real(worst.value) << " at eta="
        << format_real(config.grid.eta(worst.eta_index))
        << ", theta=" << format_real(config.grid.theta(worst.theta_index))
        << "); the continuity solver is linear and proceeds\n";
  }
  SpectralField rho0 = to_spectral(nodal, config.grid);
  if (config.normalize) normalize_mass(rho0, config.grid);
  return rho0;
}

TargetPhase resolve_target(std::string_view spec, const GridSpec& grid) {
  if (spec.starts_with("constant:")) {
    return TargetPhase::constant(grid, parse_real(spec.substr(9), "target"));
  }
  if (spec.starts_with("table:")) return read_target_csv(fs::path(spec.substr(6)), grid);
  throw ConfigError("target: unknown spec '" + std::string(spec) + "'");
}

ControlSignal resolve_control(std::string_view spec, const GridSpec& grid) {
  if (spec == "zero") return ControlSignal::zeros(grid);
  if (spec.starts_with("constant:")) {
    const double v = parse_real(spec.substr(9), "control");
    return ControlSignal::from_function(grid, [v](double) { return v; });
  }
  if (spec.starts_with("sine:")) {
    const double amp = parse_real(spec.substr(5), "control");
    const double period = grid.horizon;
    return ControlSignal::from_function(
        grid, [amp, period](double t) { return amp * std::sin(kTwoPi * t / period); });
  }
  if (spec.starts_with("table:")) return read_control_csv(fs::path(spec.substr(6)), grid);
  throw ConfigError("control: unknown spec '" + std::string(spec) + "'");
}

int run_subcommand(std::string_view name, const RunConfig& config, const fs::path& out_dir,
                   std::ostream& log) {
  static const std::map<std::string_view, std::function<void(const Context&)>> table = {
      {"solve-forward", cmd_solve_forward},
      {"optimize", cmd_optimize},
      {"simulate-particles", cmd_simulate_particles},
      {"compare", cmd_compare},
      {"increment-check", cmd_increment_check},
      {"export-meanfield", cmd_export_meanfield},
  };
  try {
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown subcommand '" + std::string(name) + "'");
    config.validate();
    it->second(Context{config, out_dir, log});
    write_manifest(out_dir, name, config);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "thetactl: error=config reason=\"" << e.what() << "\"\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    log << "thetactl: error=numeric reason=\"" << e.what() << "\"\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    log << "thetactl: error=internal reason=\"" << e.what() << "\"\n";
    return kExitNumeric;
  }
}

}  // namespace thetactl
