#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "thetactl/commands.hpp"
#include "thetactl/config.hpp"
#include "thetactl/control_cost.hpp"
#include "thetactl/dynamics.hpp"
#include "thetactl/errors.hpp"
#include "thetactl/optimizer.hpp"
#include "thetactl/particles.hpp"

namespace py = pybind11;
using namespace thetactl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PhysicalField nodal_from_array(const Array& a, const GridSpec& grid) {
  if (a.ndim() != 2 || a.shape(0) != grid.n_eta || a.shape(1) != grid.n_modes) {
    throw ConfigError("density array must have shape (n_eta, n_modes)");
  }
  PhysicalField f(grid);
  std::copy(a.data(), a.data() + a.size(), f.data().begin());
  return f;
}

Array array_from_nodal(const PhysicalField& f) {
  Array out({f.n_eta(), f.n_modes()});
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

Array array_from_vector(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ControlSignal control_from_array(const Array& a, const GridSpec& grid) {
  ControlSignal u(std::vector<double>(a.data(), a.data() + a.size()), grid.dt());
  u.check(grid);
  return u;
}

TargetPhase target_from(const py::object& target, const GridSpec& grid) {
  if (py::isinstance<py::float_>(target) || py::isinstance<py::int_>(target)) {
    return TargetPhase::constant(grid, target.cast<double>());
  }
  auto a = target.cast<Array>();
  TargetPhase t{std::vector<double>(a.data(), a.data() + a.size())};
  t.check(grid);
  return t;
}

SpectralField density_from(const Array& a, const GridSpec& grid, bool normalize) {
  SpectralField rho = to_spectral(nodal_from_array(a, grid), grid);
  if (normalize) normalize_mass(rho, grid);
  return rho;
}

py::dict cost_dict(const CostBreakdown& c) {
  py::dict d;
  d["terminal"] = c.terminal;
  d["running"] = c.running;
  d["total"] = c.total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field optimal control of theta-neuron ensembles";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("n_modes", &GridSpec::n_modes)
      .def_readwrite("n_eta", &GridSpec::n_eta)
      .def_readwrite("eta_min", &GridSpec::eta_min)
      .def_readwrite("eta_max", &GridSpec::eta_max)
      .def_readwrite("horizon", &GridSpec::horizon)
      .def_readwrite("n_steps", &GridSpec::n_steps)
      .def_readwrite("dealias", &GridSpec::dealias)
      .def_property_readonly("dt", &GridSpec::dt)
      .def("validate", &GridSpec::validate)
      .def("theta_nodes",
           [](const GridSpec& g) {
             std::vector<double> v;
             for (int k = 0; k < g.n_modes; ++k) v.push_back(g.theta(k));
             return array_from_vector(v);
           })
      .def("eta_nodes", [](const GridSpec& g) {
        std::vector<double> v;
        for (int j = 0; j < g.n_eta; ++j) v.push_back(g.eta(j));
        return array_from_vector(v);
      });

  m.def("desk_grid", &desk_grid);
  m.def("paper_grid", &paper_grid);
  m.def("velocity", &velocity, py::arg("theta"), py::arg("eta"), py::arg("u"));
  m.def("terminal_mismatch", &terminal_mismatch, py::arg("theta"), py::arg("target"));
  m.def("spike_period", &spike_period, py::arg("eta"), py::arg("dt") = 1e-4);

  m.def(
      "initial_density",
      [](const std::string& spec, const GridSpec& grid) {
        return array_from_nodal(resolve_density_nodal(spec, grid));
      },
      py::arg("spec"), py::arg("grid"), "Nodal initial density (not normalized).");

  m.def(
      "solve_forward",
      [](const Array& density, const Array& control, const GridSpec& grid, bool normalize) {
        const SpectralField rho = density_from(density, grid, normalize);
        const Trajectory mu = solve_forward(rho, control_from_array(control, grid), grid, grid.n_steps);
        return array_from_nodal(to_physical(mu.final(), grid));
      },
      py::arg("density"), py::arg("control"), py::arg("grid"), py::arg("normalize") = true,
      "Terminal density at the collocation nodes.");

  m.def(
      "total_cost",
      [](const Array& control, const Array& density, const py::object& target, double alpha,
         const GridSpec& grid) {
        return cost_dict(total_cost_p1(control_from_array(control, grid),
                                       density_from(density, grid, true),
                                       target_from(target, grid), alpha, grid));
      },
      py::arg("control"), py::arg("density"), py::arg("target"), py::arg("alpha"), py::arg("grid"));

  m.def(
      "increment_check",
      [](const Array& u_old, const Array& u_new, const Array& density, const py::object& target,
         double alpha, const GridSpec& grid) {
        const SpectralField rho = density_from(density, grid, true);
        const TargetPhase tgt = target_from(target, grid);
        const ControlSignal a = control_from_array(u_old, grid);
        const ControlSignal b = control_from_array(u_new, grid);
        const Trajectory xi = solve_backward(terminal_dual(tgt, grid), a, grid);
        const Trajectory mu = solve_forward(rho, b, grid);
        const double formula = increment_via_formula(mu, xi, b, a, alpha, grid);
        const double direct = total_cost_p1(b, rho, tgt, alpha, grid).total -
                              total_cost_p1(a, rho, tgt, alpha, grid).total;
        return py::make_tuple(formula, direct);
      },
      py::arg("u_old"), py::arg("u_new"), py::arg("density"), py::arg("target"), py::arg("alpha"),
      py::arg("grid"), "Returns (formula increment, direct increment).");

  m.def(
      "optimize",
      [](const Array& density, const py::object& target, double alpha, double epsilon,
         int max_iters, const GridSpec& grid, const std::optional<Array>& initial_guess) {
        ProblemSpec spec;
        spec.grid = grid;
        spec.rho0 = density_from(density, grid, true);
        spec.target = target_from(target, grid);
        spec.alpha = alpha;
        spec.epsilon = epsilon;
        spec.max_iters = max_iters;
        spec.initial_guess = initial_guess ? control_from_array(*initial_guess, grid)
                                           : ControlSignal::zeros(grid);
        OptimizeReport report;
        {
          py::gil_scoped_release release;
          report = optimize(spec);
        }
        py::list costs;
        for (const auto& rec : report.iterations) costs.append(cost_dict(rec.cost));
        py::dict out;
        out["costs"] = costs;
        out["stop_reason"] = std::string(to_string(report.stop_reason));
        out["control"] = array_from_vector(report.final_control.samples());
        return out;
      },
      py::arg("density"), py::arg("target"), py::arg("alpha"), py::arg("epsilon"),
      py::arg("max_iters"), py::arg("grid"), py::arg("initial_guess") = py::none());

  m.def(
      "sample_particles",
      [](const Array& density, const GridSpec& grid, std::size_t n, std::uint64_t seed) {
        const ParticleEnsemble e = sample_initial(nodal_from_array(density, grid), grid, n, seed);
        return py::make_tuple(array_from_vector(e.thetas), array_from_vector(e.etas));
      },
      py::arg("density"), py::arg("grid"), py::arg("n"), py::arg("seed"));

  m.def(
      "simulate_particles",
      [](const Array& thetas, const Array& etas, const Array& control, const GridSpec& grid) {
        ParticleEnsemble e{std::vector<double>(thetas.data(), thetas.data() + thetas.size()),
                           std::vector<double>(etas.data(), etas.data() + etas.size())};
        return array_from_vector(simulate(e, control_from_array(control, grid), grid.dt()).thetas);
      },
      py::arg("thetas"), py::arg("etas"), py::arg("control"), py::arg("grid"),
      "Phases at T (wrapped into [0, 2 pi)).");

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& out_dir, const std::string& preset,
         const std::vector<std::string>& overrides) {
        ConfigSources sources;
        sources.preset = preset;
        sources.overrides = overrides;
        std::ostringstream log;
        int code = kExitConfig;
        try {
          code = run_subcommand(subcommand, load_config(sources), out_dir, log);
        } catch (const ConfigError& e) {
          log << "thetactl: error=config reason=\"" << e.what() << "\"\n";
        }
        return py::make_tuple(code, log.str());
      },
      py::arg("subcommand"), py::arg("out_dir"), py::arg("preset") = "desk",
      py::arg("overrides") = std::vector<std::string>{},
      "Runs a CLI subcommand in-process; returns (exit status, log text).");

  m.attr("__version__") = std::string(version());
}
