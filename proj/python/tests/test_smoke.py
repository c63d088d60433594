import math
import os
import subprocess

import numpy as np
import pytest

import thetactl as tc


def small_grid():
    g = tc.GridSpec()
    g.n_modes = 32
    g.n_eta = 6
    g.horizon = 2.0
    g.n_steps = 200
    return g


def test_grid_and_presets():
    d = tc.desk_grid()
    assert (d.n_modes, d.n_eta, d.n_steps, d.horizon) == (128, 51, 1200, 6.0)
    assert tc.paper_grid().n_modes == 512
    g = small_grid()
    g.validate()
    assert g.dt == pytest.approx(0.01)
    assert np.allclose(g.theta_nodes(), 2 * np.pi * np.arange(32) / 32)
    assert g.eta_nodes()[0] == 0.0 and g.eta_nodes()[-1] == 1.0


def test_invalid_grid_raises_config_error():
    g = small_grid()
    g.n_modes = 31
    with pytest.raises(tc.ConfigError):
        g.validate()


def test_pointwise_functions():
    assert tc.velocity(0.0, 1.0, 0.0) == pytest.approx(2.0)
    assert tc.velocity(math.pi, 0.3, 5.0) == pytest.approx(2.0)
    assert tc.terminal_mismatch(0.0, math.pi) == pytest.approx(2.0)
    assert tc.spike_period(1.0) == pytest.approx(math.pi, rel=1e-3)


def test_rigid_rotation_at_unit_eta():
    g = small_grid()
    rho = tc.initial_density("paper_cossin2", g)
    assert rho.shape == (6, 32)
    final = tc.solve_forward(rho, np.zeros(g.n_steps + 1), g, normalize=False)
    th = g.theta_nodes() - 2 * g.horizon
    exact = 2 + 3 * np.cos(2 * th) - 2 * np.sin(2 * th)
    assert np.max(np.abs(final[-1] - exact)) < 1e-6


def test_increment_formula_matches_direct():
    g = small_grid()
    rho = tc.initial_density("paper_cossin2", g)
    t = np.linspace(0.0, g.horizon, g.n_steps + 1)
    formula, direct = tc.increment_check(np.zeros_like(t), 0.2 * np.sin(np.pi * t), rho, math.pi, 1.0, g)
    assert abs(formula - direct) <= 1e-3 * abs(direct)


def test_optimize_descends():
    g = small_grid()
    rho = tc.initial_density("paper_cossin2", g)
    out = tc.optimize(rho, math.pi, 1.0, 1e-4, 20, g)
    totals = [c["total"] for c in out["costs"]]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert out["stop_reason"] == "converged"
    assert out["control"].shape == (g.n_steps + 1,)


def test_particles_are_reproducible():
    g = small_grid()
    d = tc.initial_density("uniform", g)
    a = tc.sample_particles(d, g, 100, 7)
    b = tc.sample_particles(d, g, 100, 7)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    out = tc.simulate_particles(a[0], a[1], np.zeros(g.n_steps + 1), g)
    assert out.shape == (100,)
    assert np.all((out >= 0) & (out < 2 * np.pi))


def test_in_process_run(tmp_path):
    code, log = tc.run("solve-forward", str(tmp_path), "desk",
                       ["n_modes=32", "n_eta=6", "horizon=2", "n_steps=200"])
    assert code == 0, log
    assert (tmp_path / "manifest.txt").exists()
    code, log = tc.run("solve-forward", str(tmp_path / "bad"), "desk", ["n_modes=31"])
    assert code == 2
    assert "error=config" in log


@pytest.mark.skipif("THETACTL_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_version():
    out = subprocess.run([os.environ["THETACTL_CLI"], "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert tc.__version__ in out.stdout
