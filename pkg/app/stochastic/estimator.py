"""Monte Carlo estimators of clock-subordinated killed semigroups

    u(t,x) = E_x[ f(X(L)) I(τ_D(X) > L) ],   L the clock value at time t

Replicates are drawn in blocks of [montecarlo] block_size. Block b draws
from sub-stream b of the run's RngStream, blocks run on a thread pool, and
block moments are merged pairwise in block order, so the estimate depends
only on (seed, stream_id, parameters).
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from app.config import config
from app.exceptions import ParameterError, RunError
from app.logger import logger
from app.schema import ClockKind, DomainSpec, MCEstimate, coerce_beta, require_positive
from app.spectral.series import as_initial_condition
from app.stochastic.clocks import clock_draws, stable_subordinator_draws
from app.stochastic.paths import simulate_killed_paths
from app.stochastic.rng import RngStream
from app.utils import log_execution_time
from app.utils.enums import ClockVariant


MIN_REPLICATES = 100


class RunningMoments(BaseModel):
    """Count, mean and sum of squared deviations of a sample, mergeable exactly."""

    count: int = Field(0, ge=0)
    mean: float = 0.0
    m2: float = Field(0.0, ge=0)
    rejected: int = Field(0, ge=0)

    class Config:
        frozen = True

    @classmethod
    def from_values(cls, values: np.ndarray, rejected: int = 0) -> "RunningMoments":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls(rejected=rejected)
        mean = float(values.mean())
        return cls(count=int(values.size), mean=mean, m2=float(np.sum((values - mean) ** 2)), rejected=rejected)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        count = self.count + other.count
        rejected = self.rejected + other.rejected
        if self.count == 0 or other.count == 0:
            source = self if other.count == 0 else other
            return RunningMoments(count=source.count, mean=source.mean, m2=source.m2, rejected=rejected)
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return RunningMoments(count=count, mean=mean, m2=m2, rejected=rejected)

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return math.inf
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def merge_pairwise(parts: List[RunningMoments]) -> RunningMoments:
    """Merge adjacent pairs until one remains; the tree depends only on len(parts)."""
    if not parts:
        return RunningMoments()
    while len(parts) > 1:
        merged = [parts[i].merge(parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def _as_stream(rng: Union[RngStream, int, None]) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(seed=int(config.montecarlo.seed if rng is None else rng))


def _block_sizes(n: int, block: int) -> List[int]:
    full, rest = divmod(n, block)
    return [block] * full + ([rest] if rest else [])


def _run_blocks(n: int, stream: RngStream, work: Callable[[int, np.random.Generator], RunningMoments],
                threads: Optional[int]) -> RunningMoments:
    sizes = _block_sizes(n, config.montecarlo.block_size)
    workers = threads or config.thread_count
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda item: work(item[1], stream.child(item[0]).generator()), enumerate(sizes)))
    return merge_pairwise(parts)


def _check_start(domain: DomainSpec, x: Any) -> Tuple[float, ...]:
    point = tuple(float(v) for v in np.atleast_1d(x))
    if not domain.contains(point):
        raise ParameterError(f"start point {point} is not inside the domain")
    return point


def _finish(moments: RunningMoments, n: int, h: float, method: str, point: tuple) -> MCEstimate:
    rate = moments.rejected / n
    if rate > config.montecarlo.max_rejection_rate:
        raise RunError(
            f"{moments.rejected} of {n} clock draws were not finite "
            f"(rate {rate:.2e} above {config.montecarlo.max_rejection_rate})",
            method=method,
            point=point,
        )
    if moments.rejected:
        logger.warning(f"{method}: {moments.rejected} clock draws rejected at {point}")
    return MCEstimate(mean=moments.mean, stderr=moments.stderr, n=moments.count, time_step=h,
                      rejected=moments.rejected)


def _resolve(domain: DomainSpec, t: float, n: Optional[int], h: Optional[float]) -> Tuple[float, int, float]:
    t = float(t)
    if not (t >= 0 and math.isfinite(t)):
        raise ParameterError(f"t={t} must be nonnegative and finite")
    n = int(config.montecarlo.replicates if n is None else n)
    if n < MIN_REPLICATES:
        raise ParameterError(f"n={n} replicates, at least {MIN_REPLICATES} required")
    h = require_positive("h", config.montecarlo.step * domain.scale ** 2 if h is None else h)
    return t, n, h


@log_execution_time(log_level="DEBUG")
def mc_solve(
    domain: DomainSpec,
    f,
    clock: ClockKind,
    t: float,
    x: Any,
    n: Optional[int] = None,
    h: Optional[float] = None,
    rng: Union[RngStream, int, None] = None,
    threads: Optional[int] = None,
) -> MCEstimate:
    """Kill-then-subordinate estimate of u(t, x).

    Each replicate draws a clock value L, runs a killed walk from x up to L and
    scores f(X(L)) if the walk survived. Two-sided clocks score a negative L
    with an independent backward walk run to |L|.

    Args:
        domain: Box (or table bounding box) the walks live in
        f: InitialCondition or vectorized evaluator
        clock: Clock driving the walk
        t: Outer time, t ≥ 0
        x: Interior start point
        n: Replicates (defaults to [montecarlo] replicates), at least 100
        h: Walk step (defaults to [montecarlo] step times the squared domain scale)
        rng: RngStream or integer seed
        threads: Worker threads (defaults to config.thread_count)

    Raises:
        ParameterError: invalid t, n, h or x
        RunError: too many non-finite clock draws
    """
    ic = as_initial_condition(domain, f)
    point = _check_start(domain, x)
    t, n, h = _resolve(domain, t, n, h)
    stream = _as_stream(rng)
    two_sided = clock.variant == ClockVariant.TWO_SIDED_ITERATED

    def work(size: int, generator: np.random.Generator) -> RunningMoments:
        values = clock_draws(clock, t, generator, size)
        finite = np.isfinite(values)
        values = values[finite]
        scores = np.zeros(values.size)
        # Forward walks serve L ≥ 0, backward walks serve L < 0
        for sides in ((values >= 0,) if not two_sided else (values >= 0, values < 0)):
            horizons = np.abs(values[sides])
            starts = np.tile(point, (horizons.size, 1))
            exited, positions, _ = simulate_killed_paths(domain, starts, horizons, h, generator)
            side_scores = np.zeros(horizons.size)
            if np.any(~exited):
                side_scores[~exited] = ic(positions[~exited])
            scores[sides] = side_scores
        return RunningMoments.from_values(scores, rejected=int(size - finite.sum()))

    moments = _run_blocks(n, stream, work, threads)
    logger.debug(f"mc_solve[{clock.label()}] t={t} x={point}: {moments.mean:.6f} ± {moments.stderr:.2e}")
    return _finish(moments, n, h, "mc", (t,) + point)


# =============================================================================
# Subordinate, then kill
# =============================================================================

_CHUNK = 256


def _inverse_clock_grid(beta: float, times: np.ndarray, delta: float, size: int,
                        generator: np.random.Generator) -> np.ndarray:
    """E(s) = δ · #{j ≥ 1 : D(jδ) ≤ s} at each outer time, shape (size, len(times)).

    D is built on the grid jδ from increments δ^{1/β} D_j(1) until it passes
    the last outer time.
    """
    counts = np.zeros((size, times.size))
    level = np.zeros(size)
    active = np.arange(size)
    scale = delta ** (1.0 / beta)
    while active.size:
        steps = scale * stable_subordinator_draws(beta, generator, (active.size, _CHUNK))
        path = level[active, None] + np.cumsum(steps, axis=1)
        for i, s in enumerate(times):
            counts[active, i] += np.sum(path <= s, axis=1)
        level[active] = path[:, -1]
        active = active[~(path[:, -1] > times[-1])]
    return delta * counts


@log_execution_time(log_level="DEBUG")
def mc_solve_subordinated(
    domain: DomainSpec,
    f,
    beta: Any,
    t: float,
    x: Any,
    n: Optional[int] = None,
    h: Optional[float] = None,
    rng: Union[RngStream, int, None] = None,
    outer_steps: int = 32,
    delta: Optional[float] = None,
    threads: Optional[int] = None,
) -> MCEstimate:
    """Subordinate-then-kill estimate of u(t, x) for the inverse stable clock.

    Each replicate builds a stable subordinator path on a δ-grid, reads the
    inverse clock E at `outer_steps` outer times, and advances the walk X(E(s))
    from one outer time to the next with the killed walk, so the
    exit check covers the whole inner interval [0, E(t)].

    Args:
        delta: Grid step of the subordinator path (defaults to h)
        outer_steps: Outer times s_i = i t / outer_steps
    """
    beta = coerce_beta(beta)
    ic = as_initial_condition(domain, f)
    point = _check_start(domain, x)
    t, n, h = _resolve(domain, t, n, h)
    if t == 0:
        raise ParameterError("subordinated paths need t > 0")
    if outer_steps < 1:
        raise ParameterError(f"outer_steps={outer_steps} must be at least 1")
    delta = require_positive("delta", h if delta is None else delta)
    stream = _as_stream(rng)
    times = t * np.arange(1, outer_steps + 1) / outer_steps

    def work(size: int, generator: np.random.Generator) -> RunningMoments:
        clock = _inverse_clock_grid(beta, times, delta, size, generator)
        increments = np.diff(clock, axis=1, prepend=0.0)
        positions = np.tile(point, (size, 1))
        alive = np.ones(size, dtype=bool)
        for i in range(outer_steps):
            idx = np.flatnonzero(alive)
            exited, moved, _ = simulate_killed_paths(domain, positions[idx], increments[idx, i], h, generator)
            positions[idx] = moved
            alive[idx[exited]] = False
        scores = np.zeros(size)
        if np.any(alive):
            scores[alive] = ic(positions[alive])
        return RunningMoments.from_values(scores)

    moments = _run_blocks(n, stream, work, threads)
    logger.debug(f"mc_solve_subordinated(beta={beta}) t={t} x={point}: {moments.mean:.6f} ± {moments.stderr:.2e}")
    return _finish(moments, n, h, "mc", (t,) + point)
