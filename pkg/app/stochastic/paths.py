"""Killed Brownian walks on boxes

Walks take Euler steps with increments N(0, 2 dt) per coordinate, the
Brownian motion generated by Δ. A step is killed when it lands outside the
box, or with the Brownian-bridge probability of having crossed a wall in
between:

    P(cross wall b | x → y) = exp(−(b − x)(b − y) / dt)

Survival over one step is the product over all walls of (1 − P). Table
domains are walked on their bounding box.
"""
import math
from typing import Any, Tuple

import numpy as np

from app.exceptions import ParameterError
from app.schema import DomainSpec, KilledPath, require_positive


def _crossing_survival(lengths: np.ndarray, x: np.ndarray, y: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """Probability that bridges from x to y over dt touch no wall; all points inside."""
    dt = dt[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.exp(-x * y / dt)
        upper = np.exp(-(lengths - x) * (lengths - y) / dt)
    return np.prod((1.0 - lower) * (1.0 - upper), axis=1)


def simulate_killed_paths(
    domain: DomainSpec,
    starts: np.ndarray,
    horizons: np.ndarray,
    h: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run one killed walk per start point up to its own horizon.

    Args:
        domain: Box the walks live in; a table domain is killed on its bounding box
        starts: Interior start points, shape (P, d)
        horizons: Nonnegative run lengths, shape (P,)
        h: Step size; the last step of each walk is shortened to hit the horizon
        rng: Generator the increments are drawn from

    Returns:
        (exited flags, positions of shape (P, d), elapsed times); a killed walk
        keeps the last position it held inside the box and its elapsed time
        ends with the step that killed it
    """
    h = require_positive("h", h)
    lengths = np.asarray(domain.lengths, dtype=float)
    positions = np.array(starts, dtype=float).reshape(-1, domain.dimension)
    remaining = np.array(horizons, dtype=float).reshape(-1)
    if remaining.shape[0] != positions.shape[0]:
        raise ParameterError(f"{positions.shape[0]} start points but {remaining.shape[0]} horizons")
    if np.any(remaining < 0):
        raise ParameterError("horizons must be nonnegative")

    exited = np.zeros(positions.shape[0], dtype=bool)
    active = np.flatnonzero(remaining > 0)
    while active.size:
        dt = np.minimum(h, remaining[active])
        x = positions[active]
        y = x + np.sqrt(2.0 * dt)[:, None] * rng.standard_normal(x.shape)
        uniforms = rng.random(active.size)

        inside = np.all((y > 0.0) & (y < lengths), axis=1)
        survive = np.zeros(active.size, dtype=bool)
        survive[inside] = uniforms[inside] < _crossing_survival(lengths, x[inside], y[inside], dt[inside])

        exited[active[~survive]] = True
        positions[active[survive]] = y[survive]
        remaining[active] -= dt
        # Exited walks and walks at their horizon leave the active set
        keep = survive & (remaining[active] > 1e-15 * h)
        active = active[keep]
    return exited, positions, np.array(horizons, dtype=float).reshape(-1) - np.maximum(remaining, 0.0)


def simulate_killed_path(domain: DomainSpec, x0: Any, horizon: float, h: float,
                         rng: np.random.Generator) -> KilledPath:
    """One killed walk from x0; reports whether τ_D ≤ horizon and where the walk ended."""
    point = tuple(float(v) for v in np.atleast_1d(x0))
    if not domain.contains(point):
        raise ParameterError(f"start point {point} is not inside the domain")
    horizon = float(horizon)
    if not (horizon >= 0 and math.isfinite(horizon)):
        raise ParameterError(f"horizon={horizon} must be nonnegative and finite")
    exited, positions, elapsed = simulate_killed_paths(domain, np.array([point]), np.array([horizon]), h, rng)
    return KilledPath(exited=bool(exited[0]), position=tuple(positions[0]), elapsed=float(elapsed[0]))
