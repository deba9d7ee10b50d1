"""Spectral series solutions

u(t,x) = Σ f̄(n) φ_n(x) E_β(−λ_n t^β)

The number of modes is found by doubling: the series is extended from N to
2N modes until the added block changes no grid value by more than the
tolerance. The error recorded per point is that last change plus a
round-off floor proportional to N·ε·Σ|terms|.
"""
import math
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import config
from app.exceptions import CapacityError, InsufficientDataError, ParameterError
from app.logger import logger
from app.schema import DomainSpec, GridPoint, SeriesValue, SolutionField, coerce_beta
from app.spectral.domain import as_points, eigenpairs, mode_matrix
from app.spectral.initial import InitialCondition
from app.specfun.mittag_leffler import mittag_leffler, mittag_leffler_series_mp
from app.utils import log_execution_time
from app.utils.enums import DomainKind, SolveMethod


_EPS = np.finfo(float).eps
# Pointwise sine evaluation near a zero loses about nπε, covered by this factor
_ROUNDOFF_FACTOR = 4.0

GridLike = Iterable[Union[GridPoint, Tuple[float, Any]]]


def normalize_grid(domain: DomainSpec, grid: GridLike) -> List[GridPoint]:
    """Coerce (t, x) pairs into GridPoints with d-tuples of coordinates."""
    points = []
    for item in grid:
        if isinstance(item, GridPoint):
            t, x = item.t, item.x
        else:
            t, x = item
        coords = tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))
        if len(coords) != domain.dimension:
            raise ParameterError(f"grid point {coords} does not have {domain.dimension} coordinates")
        if t < 0 or not math.isfinite(t):
            raise ParameterError(f"grid time {t} must be nonnegative")
        points.append(GridPoint(t=float(t), x=coords))
    return points


def as_initial_condition(domain: DomainSpec, f) -> InitialCondition:
    if isinstance(f, InitialCondition):
        if f.domain != domain:
            raise ParameterError("initial condition belongs to a different domain")
        return f
    return InitialCondition(domain, f)


def capacity(domain: DomainSpec) -> int:
    """Largest mode count available for the domain."""
    if domain.kind == DomainKind.TABLE:
        return len(domain.modes)
    return config.solver.max_modes


def modal_profile(beta: Any, lambdas: Sequence[float], times: Sequence[float]) -> np.ndarray:
    """Mode profiles E_β(−λ_n t^β) as an array of shape (N, T)."""
    beta = coerce_beta(beta, allow_one=True)
    lambdas = np.asarray(lambdas, dtype=float)
    times = np.asarray(times, dtype=float)
    if np.any(lambdas < 0):
        raise ParameterError("eigenvalues must be nonnegative")
    if np.any(times < 0):
        raise ParameterError("times must be nonnegative")
    scaled = np.power(times, beta)
    return np.vstack([np.atleast_1d(mittag_leffler(beta, lam * scaled)) for lam in lambdas]).reshape(
        lambdas.size, times.size
    )


class ModalSeries:
    """Modal sums Σ f̄(n) (−λ_n)^l profile_n(t) φ_n(x) at fixed grid points.

    `profile(lambdas, times)` returns the time factor of each mode as an
    array of shape (N, T).
    """

    def __init__(
        self,
        domain: DomainSpec,
        ic: InitialCondition,
        times: np.ndarray,
        xs: np.ndarray,
        profile: Callable[[np.ndarray, np.ndarray], np.ndarray],
        laplacian_power: int = 0,
    ):
        self.domain = domain
        self.ic = ic
        self.profile = profile
        self.laplacian_power = laplacian_power
        self.t_unique, self.t_index = np.unique(np.asarray(times, dtype=float), return_inverse=True)
        self.x_unique, self.x_index = np.unique(np.asarray(xs, dtype=float), axis=0, return_inverse=True)
        self.t_index = self.t_index.reshape(-1)
        self.x_index = self.x_index.reshape(-1)

    def block(self, start: int, end: int) -> Tuple[np.ndarray, np.ndarray]:
        """Sum of modes start..end-1 and Σ of term magnitudes, per grid point."""
        modes = eigenpairs(self.domain, end)[start:end]
        coeffs = self.ic.coefficients(end)[start:end]
        lambdas = np.array([mode.eigenvalue for mode in modes])
        sups = np.array([mode.sup_norm for mode in modes])
        weights = coeffs * (-lambdas) ** self.laplacian_power

        profiles = np.asarray(self.profile(lambdas, self.t_unique))[:, self.t_index]
        phis = mode_matrix(modes, self.x_unique)[:, self.x_index]
        terms = weights[:, None] * profiles * phis
        magnitude = (np.abs(weights) * sups)[:, None] * np.abs(profiles)
        return terms.sum(axis=0), magnitude.sum(axis=0)

    def settle(self, tol: float, initial_modes: int, limit: int, label: str) -> Tuple[np.ndarray, np.ndarray, int]:
        """Double the truncation until the added block is below tol everywhere.

        Returns:
            (values, per-point error, final truncation)
        """
        n_low = min(initial_modes, max(1, limit // 2))
        total, magnitude = self.block(0, n_low)
        while True:
            n_high = min(2 * n_low, limit)
            if n_high == n_low:
                raise CapacityError(
                    f"{label}: series not settled below {tol} with {n_low} modes (capacity {limit})",
                    requested=2 * n_low,
                    available=limit,
                )
            extra, extra_magnitude = self.block(n_low, n_high)
            total = total + extra
            magnitude = magnitude + extra_magnitude
            delta = np.abs(extra)
            n_low = n_high
            if float(np.max(delta, initial=0.0)) < tol:
                logger.debug(f"{label}: settled with {n_low} modes, max delta {float(np.max(delta, initial=0.0)):.2e}")
                return total, delta + _ROUNDOFF_FACTOR * n_low * _EPS * magnitude, n_low


@log_execution_time(log_level="DEBUG")
def solve_spectral(
    domain: DomainSpec,
    f,
    beta: Any,
    grid: GridLike,
    *,
    tol: Optional[float] = None,
    laplacian_power: int = 0,
    initial_modes: Optional[int] = None,
    max_modes: Optional[int] = None,
) -> SolutionField:
    """Mittag-Leffler series solution of ∂^β u = Δu, u(0) = f, u = 0 on ∂D.

    Args:
        domain: Domain with Dirichlet eigenpairs
        f: InitialCondition or vectorized evaluator
        beta: FractionalOrder or float in (0, 1]; β = 1 is the heat equation
        grid: (t, x) points; t = 0 returns f(x) exactly
        tol: Pointwise doubling criterion (defaults to [solver] spectral_tol)
        laplacian_power: l ≥ 0; returns the series of Δ^l u instead of u
        initial_modes: First truncation tried
        max_modes: Truncation ceiling (defaults to the domain capacity)

    Returns:
        SolutionField tagged spectral, with the final truncation

    Raises:
        CapacityError: doubling would exceed the available modes
    """
    beta = coerce_beta(beta, allow_one=True)
    if laplacian_power < 0 or int(laplacian_power) != laplacian_power:
        raise ParameterError(f"laplacian_power={laplacian_power} must be a nonnegative integer")
    ic = as_initial_condition(domain, f)
    points = normalize_grid(domain, grid)
    settings = config.solver
    tol = settings.spectral_tol if tol is None else tol
    limit = min(max_modes or capacity(domain), capacity(domain))

    values = np.zeros(len(points))
    err = np.zeros(len(points))
    times = np.array([p.t for p in points])
    xs = np.array([p.x for p in points]).reshape(len(points), domain.dimension)

    # u(0, x) = f(x) exactly; Δ^l u(0, x) still goes through the series
    series = np.ones(len(points), dtype=bool) if laplacian_power else times > 0
    if np.any(~series):
        values[~series] = ic(xs[~series])

    truncation = None
    if np.any(series):
        modal = ModalSeries(domain, ic, times[series], xs[series],
                            lambda lambdas, ts: modal_profile(beta, lambdas, ts), int(laplacian_power))
        total, delta, truncation = modal.settle(
            tol, initial_modes or settings.initial_modes, limit, f"solve_spectral(beta={beta})"
        )
        values[series] = total
        err[series] = delta

    return SolutionField(
        grid=points,
        values=values.tolist(),
        err=err.tolist(),
        method=SolveMethod.SPECTRAL,
        truncation=truncation,
        metadata={"beta": beta, "laplacian_power": int(laplacian_power), "initial_condition": ic.name},
    )


def heat_semigroup(domain: DomainSpec, f, t: float, x, n_modes: int) -> SeriesValue:
    """Killed heat semigroup T_D(t)f(x) = Σ_{n≤N} e^{−λ_n t} φ_n(x) f̄(n).

    The error estimate compares the N-mode sum with the N/2-mode sum.

    Raises:
        ParameterError: t ≤ 0 (evaluate f directly at t = 0)
    """
    if t <= 0:
        raise ParameterError(f"t={t} must be positive; T_D(0)f is f itself")
    if n_modes < 1:
        raise ParameterError(f"n_modes={n_modes} must be at least 1")
    ic = as_initial_condition(domain, f)
    point = as_points(domain, x)
    modal = ModalSeries(domain, ic, np.array([float(t)]), point, lambda lambdas, ts: modal_profile(1.0, lambdas, ts))
    half = n_modes // 2
    head, head_magnitude = modal.block(0, half) if half else (np.zeros(1), np.zeros(1))
    tail, tail_magnitude = modal.block(half, n_modes)
    value = float(head[0] + tail[0])
    floor = _ROUNDOFF_FACTOR * n_modes * _EPS * float(head_magnitude[0] + tail_magnitude[0])
    return SeriesValue(value=value, err=abs(float(tail[0])) + floor, modes=n_modes)


def fixed_truncation(
    domain: DomainSpec,
    f,
    tol: float,
    decay: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    initial_modes: Optional[int] = None,
) -> Tuple[int, float]:
    """Mode count N with Σ_{N<n≤2N} |f̄(n)| sup|φ_n| w_n < tol, found by doubling.

    Used where the series sits inside an integral over time and the truncation
    must be fixed before integration starts. `decay(lambdas)` gives the weight
    w_n, a bound on the time factor of each mode over the grid (1 if omitted).

    Returns:
        (N, the tail sum at N)
    """
    ic = as_initial_condition(domain, f)
    limit = capacity(domain)
    n = min(initial_modes or config.solver.initial_modes, max(1, limit // 2))
    while True:
        upper = min(2 * n, limit)
        if upper == n:
            raise CapacityError(f"coefficient tail not below {tol} within {limit} modes", requested=2 * n, available=limit)
        modes = eigenpairs(domain, upper)[n:upper]
        coeffs = ic.coefficients(upper)[n:upper]
        weights = np.ones(len(modes)) if decay is None else np.asarray(decay(np.array([m.eigenvalue for m in modes])))
        tail = float(np.sum(np.abs(coeffs) * np.array([m.sup_norm for m in modes]) * weights))
        if tail < tol:
            return n, tail
        n = upper


def modal_weights(domain: DomainSpec, f, count: int, x) -> Tuple[np.ndarray, np.ndarray]:
    """(f̄(n) φ_n(x), λ_n) for n ≤ count at one point x."""
    ic = as_initial_condition(domain, f)
    modes = eigenpairs(domain, count)
    phis = mode_matrix(modes, as_points(domain, x))[:, 0]
    return ic.coefficients(count) * phis, np.array([mode.eigenvalue for mode in modes])


# =============================================================================
# Higher-order identity and coefficient decay
# =============================================================================

def per_mode_higher_order_residual(lam: float, m: int, t_grid: Sequence[float]) -> float:
    """Max over t of |R(t)| for one mode of the order-m problem.

    R(t) = d/dt E_{1/m}(−λ t^{1/m}) − Σ_{j=1}^{m−1} t^{j/m−1}/Γ(j/m) (−λ)^j − (−λ)^m E_{1/m}(−λ t^{1/m})

    The derivative is summed term-wise in extended precision; E itself comes
    from the double-precision evaluator.
    """
    if int(m) != m or m < 2:
        raise ParameterError(f"m={m} must be an integer ≥ 2")
    if lam < 0:
        raise ParameterError(f"eigenvalue {lam} must be nonnegative")
    times = np.asarray(list(t_grid), dtype=float)
    if times.size == 0 or np.any(times <= 0):
        raise ParameterError("t_grid must be nonempty and strictly positive")
    if lam == 0:
        return 0.0

    m = int(m)
    beta = 1.0 / m
    worst = 0.0
    for t in times:
        derivative = float(mittag_leffler_series_mp(beta, lam, float(t), derivative=True))
        forcing = sum(t ** (j / m - 1.0) / math.gamma(j / m) * (-lam) ** j for j in range(1, m))
        profile = mittag_leffler(beta, lam * t ** beta)
        worst = max(worst, abs(derivative - forcing - (-lam) ** m * profile))
    return worst


DECAY_MODES = 256
_NONZERO_RATIO = 1e-14
_MIN_NONZERO = 8


def coefficient_decay_check(domain: DomainSpec, f, k: int, modes: int = DECAY_MODES) -> bool:
    """True iff |f̄(n)| decays at least like λ_n^{−k+1/2}.

    The slope of log M_n against log λ_n is fitted over the upper half of the
    nonzero coefficients, where M_n = max_{j≥n} |f̄(j)| is the tail envelope;
    the envelope removes the zeros that symmetric data leave in the spectrum.

    Raises:
        InsufficientDataError: fewer than 8 coefficients above 1e−14·max
    """
    ic = as_initial_condition(domain, f)
    count = min(modes, capacity(domain))
    coeffs = np.abs(ic.coefficients(count))
    lambdas = np.array([mode.eigenvalue for mode in eigenpairs(domain, count)])

    peak = float(np.max(coeffs, initial=0.0))
    nonzero = np.flatnonzero(coeffs > _NONZERO_RATIO * peak) if peak > 0 else np.array([], dtype=int)
    if nonzero.size < _MIN_NONZERO:
        raise InsufficientDataError(
            f"{nonzero.size} nonzero coefficients for {ic.name}, at least {_MIN_NONZERO} needed for a decay fit"
        )

    envelope = np.maximum.accumulate(coeffs[::-1])[::-1]
    upper = nonzero[nonzero.size // 2:]
    slope, _ = np.polyfit(np.log(lambdas[upper]), np.log(envelope[upper]), 1)
    logger.debug(f"coefficient decay of {ic.name}: slope {slope:.3f} against threshold {-k + 0.5}")
    return bool(slope <= -k + 0.5)
