"""Subordination quadrature

Inverse stable clock:
    u(t,x) = ∫_0^∞ T_D(l)f(x) f_t(l) dl
α-stable clock (absolute value of a symmetric α-stable process):
    u(t,x) = 2 ∫_0^∞ T_D(s)f(x) p^α(t,s) ds

T_D(s)f(x) = Σ_{n≤N} f̄(n) φ_n(x) e^{−λ_n s} is summed inside the integrand
with N fixed beforehand. Each integral is split at the clock's median: the
head [0, median] is integrated directly and the tail on a logarithmic axis
l = median·e^y.
"""
import math
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

from app.config import config
from app.exceptions import ParameterError
from app.logger import logger
from app.schema import DomainSpec, SolutionField, coerce_alpha, coerce_beta, require_positive
from app.specfun.mittag_leffler import mittag_leffler
from app.specfun.stable import (
    alpha_stable_abs_median,
    alpha_stable_density_1d,
    inverse_stable_density,
    inverse_stable_median,
)
from app.spectral.domain import eigenpairs
from app.spectral.series import (
    _EPS,
    _ROUNDOFF_FACTOR,
    GridLike,
    ModalSeries,
    as_initial_condition,
    capacity,
    fixed_truncation,
    modal_weights,
    normalize_grid,
)
from app.utils import log_execution_time
from app.utils.enums import SolveMethod
from app.utils.quadrature import integrate


# The log-axis tail stops where the clock density or e^{-λ_1 s} is negligible
_TAIL_SPAN = 1e3
_DECAY_DIGITS = 40.0


def _split_integral(
    integrand: Callable[[float], float],
    median: float,
    upper: float,
    epsabs: float,
    label: str,
    points: Optional[List[float]] = None,
) -> Tuple[float, float]:
    """∫_0^upper split at the median, the tail on l = median·e^y."""
    head_points = [p for p in (points or []) if 0.0 < p < median] or None
    head, head_err = integrate(integrand, 0.0, median, epsabs=epsabs / 2, epsrel=1e-12,
                               points=head_points, label=f"{label} head")
    if upper <= median:
        return head, head_err

    def on_log_axis(y: float) -> float:
        l = median * math.exp(y)
        return integrand(l) * l

    tail, tail_err = integrate(on_log_axis, 0.0, math.log(upper / median), epsabs=epsabs / 2, epsrel=1e-12,
                               label=f"{label} tail")
    return head + tail, head_err + tail_err


def _semigroup(weights: np.ndarray, lambdas: np.ndarray) -> Callable[[float], float]:
    return lambda s: float(np.dot(weights, np.exp(-lambdas * s)))


def _roundoff_floor(domain: DomainSpec, ic, modes: int) -> float:
    """4·N·ε·Σ|f̄(n)| sup|φ_n|, the error of summing N modes near a zero of φ_n."""
    sups = np.array([mode.sup_norm for mode in eigenpairs(domain, modes)])
    return _ROUNDOFF_FACTOR * modes * _EPS * float(np.sum(np.abs(ic.coefficients(modes)) * sups))


# =============================================================================
# Inverse stable clock
# =============================================================================

def _inverse_stable_integral(beta: float, t: float, semigroup: Callable[[float], float], epsabs: float,
                             label: str) -> Tuple[float, float]:
    median = inverse_stable_median(beta, t)
    integrand = lambda l: semigroup(l) * inverse_stable_density(beta, t, l) if l > 0 else semigroup(0.0) * (
        t ** (-beta) / math.gamma(1.0 - beta))
    # f_t switches from its series to the integral representation at l = t^β
    return _split_integral(integrand, median, median * _TAIL_SPAN, epsabs, label, points=[t ** beta])


@log_execution_time(log_level="DEBUG")
def solve_inverse_stable_quadrature(
    domain: DomainSpec,
    f,
    beta: Any,
    grid: GridLike,
    *,
    tol: Optional[float] = None,
) -> SolutionField:
    """u(t,x) = ∫_0^∞ T_D(l)f(x) f_t(l) dl by adaptive quadrature.

    Args:
        domain: Domain with Dirichlet eigenpairs
        f: InitialCondition or vectorized evaluator
        beta: FractionalOrder or float in (0, 1)
        grid: (t, x) points with t > 0
        tol: Absolute tolerance (defaults to [solver] quadrature_tol)

    Raises:
        ParameterError: a grid time is not positive
        NumericError: quadrature failed after all retries
    """
    beta = coerce_beta(beta)
    ic = as_initial_condition(domain, f)
    points = normalize_grid(domain, grid)
    tol = config.solver.quadrature_tol if tol is None else tol
    if any(p.t <= 0 for p in points):
        raise ParameterError("quadrature solutions need grid times t > 0")
    if not points:
        return SolutionField(grid=[], values=[], err=[], method=SolveMethod.QUADRATURE)

    t_min = min(p.t for p in points)
    modes, tail = fixed_truncation(domain, ic, tol / 10,
                                   decay=lambda lambdas: mittag_leffler(beta, lambdas * t_min ** beta))
    logger.debug(f"inverse stable quadrature: {modes} modes fixed, tail {tail:.2e}")
    tail += _roundoff_floor(domain, ic, modes)

    values, err = [], []
    for p in points:
        weights, lambdas = modal_weights(domain, ic, modes, p.x)
        value, abserr = _inverse_stable_integral(beta, p.t, _semigroup(weights, lambdas), tol,
                                                 f"inverse stable quadrature at t={p.t}")
        values.append(value)
        err.append(abserr + tail)
    return SolutionField(grid=points, values=values, err=err, method=SolveMethod.QUADRATURE, truncation=modes,
                         metadata={"beta": beta, "clock": "inverse_stable", "initial_condition": ic.name})


def mode_laplace_identity(beta: Any, lam: float, t: float) -> Tuple[float, float]:
    """(∫_0^∞ e^{−λl} f_t(l) dl, E_β(−λ t^β)).

    The two agree for every λ ≥ 0; at λ = 0 both are exactly 1.
    """
    beta = coerce_beta(beta)
    t = require_positive("t", t)
    if lam < 0:
        raise ParameterError(f"eigenvalue {lam} must be nonnegative")
    series = mittag_leffler(beta, lam * t ** beta)
    if lam == 0:
        return 1.0, series
    value, _ = _inverse_stable_integral(beta, t, lambda l: math.exp(-lam * l), 1e-11,
                                        f"mode laplace identity (beta={beta}, lambda={lam}, t={t})")
    return value, series


# =============================================================================
# α-stable clock
# =============================================================================

def _alpha_clock_integral(alpha: float, t: float, semigroup: Callable[[float], float], lowest: float,
                          epsabs: float, label: str) -> Tuple[float, float]:
    median = alpha_stable_abs_median(alpha, t)
    # e^{-λ_1 s} falls below 10^{-40} past this point
    upper = max(median * _TAIL_SPAN, _DECAY_DIGITS * math.log(10.0) / lowest) if lowest > 0 else median * _TAIL_SPAN
    value, abserr = _split_integral(lambda s: semigroup(s) * alpha_stable_density_1d(alpha, t, s),
                                    median, upper, epsabs / 2, label)
    return 2.0 * value, 2.0 * abserr


def alpha_clock_mode_term(alpha: Any, lam: float, t: float, epsabs: float = 1e-12) -> float:
    """∫_0^∞ e^{−λs} p^α(t,s) ds; for α = 1 it is at most 1/(πtλ)."""
    alpha = coerce_alpha(alpha)
    t = require_positive("t", t)
    lam = require_positive("lambda", lam)
    value, _ = _alpha_clock_integral(alpha, t, lambda s: math.exp(-lam * s), lam, 2.0 * epsabs,
                                     f"alpha clock mode term (alpha={alpha}, lambda={lam}, t={t})")
    return value / 2.0


def alpha_clock_decay(alpha: float, lambdas: np.ndarray, t_min: float) -> np.ndarray:
    """Bound on the mode factors 2∫e^{−λs}p^α(t,s)ds over t ≥ t_min."""
    lambdas = np.asarray(lambdas, dtype=float)
    if alpha == 1.0:
        return np.minimum(1.0, 2.0 / (math.pi * t_min * lambdas))
    # |Y(t)| grows stochastically with t, so the factor is largest at t_min
    return np.array([2.0 * alpha_clock_mode_term(alpha, lam, t_min) for lam in lambdas])


@log_execution_time(log_level="DEBUG")
def solve_alpha_clock_quadrature(
    domain: DomainSpec,
    f,
    alpha: Any,
    grid: GridLike,
    *,
    tol: Optional[float] = None,
) -> SolutionField:
    """u(t,x) = 2 ∫_0^∞ T_D(s)f(x) p^α(t,s) ds by adaptive quadrature.

    Args:
        domain: Domain with Dirichlet eigenpairs
        f: InitialCondition or vectorized evaluator
        alpha: StableClockParam or float in (0, 2]
        grid: (t, x) points with t > 0
        tol: Absolute tolerance (defaults to [solver] quadrature_tol)
    """
    alpha = coerce_alpha(alpha)
    ic = as_initial_condition(domain, f)
    points = normalize_grid(domain, grid)
    tol = config.solver.quadrature_tol if tol is None else tol
    if any(p.t <= 0 for p in points):
        raise ParameterError("quadrature solutions need grid times t > 0")
    if not points:
        return SolutionField(grid=[], values=[], err=[], method=SolveMethod.QUADRATURE)

    modes, tail = fixed_truncation(domain, ic, tol / 10,
                                   decay=lambda lambdas: alpha_clock_decay(alpha, lambdas, min(p.t for p in points)))
    logger.debug(f"alpha clock quadrature: {modes} modes fixed, tail {tail:.2e}")
    tail += _roundoff_floor(domain, ic, modes)

    values, err = [], []
    for p in points:
        weights, lambdas = modal_weights(domain, ic, modes, p.x)
        value, abserr = _alpha_clock_integral(alpha, p.t, _semigroup(weights, lambdas), float(lambdas.min()), tol,
                                              f"alpha clock quadrature at t={p.t}")
        values.append(value)
        err.append(abserr + tail)
    return SolutionField(grid=points, values=values, err=err, method=SolveMethod.QUADRATURE, truncation=modes,
                         metadata={"alpha": alpha, "clock": "alpha_stable", "initial_condition": ic.name})


def alpha_clock_profile(alpha: float, lambdas: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Mode factors 2∫e^{−λ_n s}p^α(t,s)ds, shape (N, T)."""
    return np.array([[2.0 * alpha_clock_mode_term(alpha, lam, t) for t in times] for lam in lambdas])


@log_execution_time(log_level="DEBUG")
def solve_alpha_clock_spectral(
    domain: DomainSpec,
    f,
    alpha: Any,
    grid: GridLike,
    *,
    tol: Optional[float] = None,
    laplacian_power: int = 0,
) -> SolutionField:
    """Series form Σ f̄(n) φ_n(x) 2∫e^{−λ_n s}p^α(t,s)ds, truncated by doubling.

    With laplacian_power = l the series of Δ^l u is returned.
    """
    alpha = coerce_alpha(alpha)
    ic = as_initial_condition(domain, f)
    points = normalize_grid(domain, grid)
    tol = config.solver.quadrature_tol if tol is None else tol
    if any(p.t <= 0 for p in points):
        raise ParameterError("alpha clock series need grid times t > 0")
    if not points:
        return SolutionField(grid=[], values=[], err=[], method=SolveMethod.SPECTRAL)

    times = np.array([p.t for p in points])
    xs = np.array([p.x for p in points]).reshape(len(points), domain.dimension)
    modal = ModalSeries(domain, ic, times, xs, lambda lambdas, ts: alpha_clock_profile(alpha, lambdas, ts),
                        int(laplacian_power))
    values, err, truncation = modal.settle(tol, config.solver.initial_modes, capacity(domain),
                                           f"alpha clock series (alpha={alpha})")
    return SolutionField(grid=points, values=values.tolist(), err=err.tolist(), method=SolveMethod.SPECTRAL,
                         truncation=truncation,
                         metadata={"alpha": alpha, "clock": "alpha_stable", "laplacian_power": int(laplacian_power),
                                   "initial_condition": ic.name})
