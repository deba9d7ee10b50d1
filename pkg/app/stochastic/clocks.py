"""Samplers for the random clocks

Only one-dimensional marginals at a fixed outer time t are drawn:

    inverse_stable(β)    E^β(t) = (t / D(1))^β, D(1) by Kanter's representation
    iterated_bm(k)       |I_k(t)| by nested half-normal draws
    two_sided_iterated   J_k(t) by nested signed normal draws
    alpha_stable(α)      |t^{1/α} S|, S symmetric α-stable (Chambers-Mallows-Stuck)

Brownian motions have generator Δ, so B(s) ~ N(0, 2s).

Each `*_draws` function is vectorized over `size`; the `sample_*` functions
return a single ClockSample.
"""
import math
from typing import Any, Optional, Union

import numpy as np

from app.exceptions import ParameterError
from app.schema import ClockKind, ClockSample, coerce_alpha, coerce_beta
from app.specfun.stable import kanter_a
from app.utils.enums import ClockVariant


Size = Optional[Union[int, tuple]]


def _check_time(t: float) -> float:
    t = float(t)
    if not (t >= 0.0 and math.isfinite(t)):
        raise ParameterError(f"t={t} must be nonnegative and finite")
    return t


def _check_depth(k: int) -> int:
    if int(k) != k or k < 1:
        raise ParameterError(f"k={k} must be an integer ≥ 1")
    return int(k)


# =============================================================================
# Vectorized draws
# =============================================================================

def stable_subordinator_draws(beta: Any, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    """D(1) = (A(U)/W)^{(1−β)/β} with U uniform on (0,1) and W standard exponential."""
    beta = coerce_beta(beta)
    u = rng.random(size)
    w = rng.standard_exponential(size)
    with np.errstate(divide="ignore", over="ignore"):
        return (kanter_a(beta, u) / w) ** ((1.0 - beta) / beta)


def inverse_stable_draws(beta: Any, t: float, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    beta = coerce_beta(beta)
    t = _check_time(t)
    d = stable_subordinator_draws(beta, rng, size)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return (t / d) ** beta


def iterated_bm_draws(k: int, t: float, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    k = _check_depth(k)
    s = np.full(size if size is not None else (), _check_time(t))
    # Innermost B_k(t) first, then B_{k-1} at time |B_k(t)|, and so on
    for _ in range(k):
        s = np.abs(np.sqrt(2.0 * s) * rng.standard_normal(size))
    return s


def two_sided_draws(k: int, t: float, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    k = _check_depth(k)
    s = np.full(size if size is not None else (), _check_time(t))
    # A two-sided motion at a negative time is an independent motion at |time|
    for _ in range(k):
        s = np.sqrt(2.0 * np.abs(s)) * rng.standard_normal(size)
    return s


def symmetric_stable_draws(alpha: Any, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    """Standard symmetric α-stable draws with characteristic function e^{−|θ|^α}."""
    alpha = coerce_alpha(alpha)
    u = math.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(u)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        head = np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
        return head * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)


def alpha_clock_draws(alpha: Any, t: float, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    alpha = coerce_alpha(alpha)
    t = _check_time(t)
    return np.abs(t ** (1.0 / alpha) * symmetric_stable_draws(alpha, rng, size))


def clock_draws(kind: ClockKind, t: float, rng: np.random.Generator, size: Size = None) -> np.ndarray:
    """Draws of the clock `kind` at outer time t."""
    if kind.variant == ClockVariant.INVERSE_STABLE:
        if t == 0:
            return np.zeros(size if size is not None else ())
        return inverse_stable_draws(kind.beta, t, rng, size)
    if kind.variant == ClockVariant.ITERATED_BM:
        return iterated_bm_draws(kind.k, t, rng, size)
    if kind.variant == ClockVariant.TWO_SIDED_ITERATED:
        return two_sided_draws(kind.k, t, rng, size)
    return alpha_clock_draws(kind.alpha, t, rng, size)


# =============================================================================
# Single samples
# =============================================================================

def sample_stable_subordinator(beta: Any, rng: np.random.Generator) -> float:
    return float(stable_subordinator_draws(beta, rng))


def sample_inverse_stable(beta: Any, t: float, rng: np.random.Generator) -> ClockSample:
    beta = coerce_beta(beta)
    if float(t) <= 0:
        raise ParameterError(f"t={t} must be positive")
    return ClockSample(kind=ClockKind.inverse_stable(beta), t=t, value=float(inverse_stable_draws(beta, t, rng)))


def sample_iterated_bm_clock(k: int, t: float, rng: np.random.Generator) -> ClockSample:
    return ClockSample(kind=ClockKind.iterated_bm(_check_depth(k)), t=t, value=float(iterated_bm_draws(k, t, rng)))


def sample_two_sided_clock(k: int, t: float, rng: np.random.Generator) -> ClockSample:
    return ClockSample(kind=ClockKind.two_sided_iterated(_check_depth(k)), t=t, value=float(two_sided_draws(k, t, rng)))


def sample_alpha_clock(alpha: Any, t: float, rng: np.random.Generator) -> ClockSample:
    alpha = coerce_alpha(alpha)
    return ClockSample(kind=ClockKind.alpha_stable(alpha), t=t, value=float(alpha_clock_draws(alpha, t, rng)))
