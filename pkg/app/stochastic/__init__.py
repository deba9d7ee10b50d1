from app.stochastic.clocks import (
    clock_draws,
    sample_alpha_clock,
    sample_inverse_stable,
    sample_iterated_bm_clock,
    sample_stable_subordinator,
    sample_two_sided_clock,
)
from app.stochastic.estimator import RunningMoments, mc_solve, mc_solve_subordinated
from app.stochastic.paths import simulate_killed_path, simulate_killed_paths
from app.stochastic.rng import RngStream


__all__ = [
    "RngStream",
    "RunningMoments",
    "clock_draws",
    "sample_alpha_clock",
    "sample_inverse_stable",
    "sample_iterated_bm_clock",
    "sample_stable_subordinator",
    "sample_two_sided_clock",
    "simulate_killed_path",
    "simulate_killed_paths",
    "mc_solve",
    "mc_solve_subordinated",
]
