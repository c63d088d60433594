"""Optimal ensemble control of theta-neuron populations."""

from ._core import (  # noqa: F401
    ConfigError,
    GridSpec,
    NumericError,
    __version__,
    desk_grid,
    increment_check,
    initial_density,
    optimize,
    paper_grid,
    run,
    sample_particles,
    simulate_particles,
    solve_forward,
    spike_period,
    terminal_mismatch,
    total_cost,
    velocity,
)
