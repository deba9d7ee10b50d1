"""Mittag-Leffler function on the non-positive real axis

E_β(−x) = Σ (−x)^k / Γ(1+βk) is evaluated in three regions:

    x ≤ 1          Taylor series
    1 < x ≤ 1e6    single real integral over the Laplace spectral density
    x > 1e6        asymptotic series −Σ (−x)^(−k) / Γ(1−βk)

β = 1 returns exp(−x) and β = 1/2 uses the scaled complementary error
function, E_{1/2}(−x) = erfcx(x).

An extended-precision series (mpmath) is kept for oracles and for the time
derivative of a mode profile, where the double-precision series would lose
every digit to cancellation.
"""
import math
from typing import Any, Union

import mpmath
import numpy as np
from scipy import special

from app.exceptions import ParameterError
from app.schema import coerce_beta
from app.utils.quadrature import integrate


TAYLOR_LIMIT = 1.0
ASYMPTOTIC_LIMIT = 1e6
# e^{-w^{1/β}} is below e^{-50} past this power of the integration variable
_TAIL_EXPONENT = 50.0
_ASYMPTOTIC_TERMS = 8


def _taylor(beta: float, x: np.ndarray) -> np.ndarray:
    terms = int(math.ceil(25.0 / beta)) + 20
    k = np.arange(terms)
    # One row of powers per argument
    powers = np.power.outer(-x, k)
    return powers @ special.rgamma(1.0 + beta * k)


def _integral(beta: float, x: float) -> float:
    c = math.cos(beta * math.pi)
    upper = _TAIL_EXPONENT ** beta

    def integrand(w: float) -> float:
        return math.exp(-w ** (1.0 / beta)) * x / (w * w + 2.0 * c * x * w + x * x)

    # Near β=1 the denominator has a narrow well at w = −x cos(βπ)
    well = -c * x
    points = [well] if 0.0 < well < upper else None
    value, _ = integrate(integrand, 0.0, upper, epsabs=1e-14, epsrel=1e-13, points=points,
                         label=f"mittag_leffler(beta={beta}, x={x})")
    return math.sin(beta * math.pi) / (math.pi * beta) * value


def _asymptotic(beta: float, x: np.ndarray) -> np.ndarray:
    k = np.arange(1, _ASYMPTOTIC_TERMS + 1)
    return -np.power.outer(-1.0 / x, k) @ special.rgamma(1.0 - beta * k)


def mittag_leffler(beta: Any, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Evaluate E_β(−x) for x ≥ 0.

    Args:
        beta: FractionalOrder or float in (0, 1]
        x: Nonnegative scalar or array

    Returns:
        E_β(−x), a float for scalar input and an array otherwise

    Raises:
        ParameterError: beta outside (0, 1] or any x < 0
    """
    beta = coerce_beta(beta, allow_one=True)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.isnan(xs)) or np.any(xs < 0):
        raise ParameterError("mittag_leffler is defined here for x ≥ 0 only")

    if beta == 1.0:
        out = np.exp(-xs)
    elif beta == 0.5:
        out = special.erfcx(xs)
    else:
        out = np.empty_like(xs)
        low = xs <= TAYLOR_LIMIT
        high = xs > ASYMPTOTIC_LIMIT
        mid = ~(low | high)
        if np.any(low):
            out[low] = _taylor(beta, xs[low])
        if np.any(high):
            out[high] = _asymptotic(beta, xs[high])
        for idx in np.flatnonzero(mid):
            out[idx] = _integral(beta, float(xs[idx]))
        np.clip(out, 0.0, 1.0, out=out)

    return float(out[0]) if scalar else out


def mode_profile(beta: Any, lam: float, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Time profile E_β(−λ t^β) of one spectral mode."""
    beta = coerce_beta(beta, allow_one=True)
    if lam < 0:
        raise ParameterError(f"eigenvalue {lam} must be nonnegative")
    return mittag_leffler(beta, lam * np.power(t, beta))


def _working_digits(beta: float, x: float, digits: int) -> int:
    # The largest term of Σ x^k/Γ(1+βk) is about exp(x^{1/β})
    peak = x ** (1.0 / beta) if x > 0 else 0.0
    return digits + 10 + int(peak / math.log(10.0))


def mittag_leffler_series_mp(
    beta: Any,
    lam: float,
    t: float,
    derivative: bool = False,
    digits: int = 30,
) -> mpmath.mpf:
    """Extended-precision series for E_β(−λ t^β) or its t-derivative.

    The derivative is summed term-wise:
        d/dt E_β(−λ t^β) = Σ_{k≥1} (−λ)^k t^{βk−1} / Γ(βk)

    Args:
        beta: FractionalOrder or float in (0, 1]
        lam: Nonnegative eigenvalue
        t: Positive time
        derivative: Return the t-derivative instead of the value
        digits: Correct digits requested; working precision grows with λt^β

    Returns:
        mpmath.mpf
    """
    beta = coerce_beta(beta, allow_one=True)
    if lam < 0:
        raise ParameterError(f"eigenvalue {lam} must be nonnegative")
    if t <= 0:
        raise ParameterError(f"t={t} must be positive")
    if lam == 0:
        return mpmath.mpf(0) if derivative else mpmath.mpf(1)

    x = lam * t ** beta
    with mpmath.workdps(_working_digits(beta, x, digits)):
        mb = mpmath.mpf(beta)
        mt = mpmath.mpf(t)
        z = -mpmath.mpf(lam) * mt ** mb
        tolerance = mpmath.mpf(10) ** (-(digits + 5))
        past_peak = int(x ** (1.0 / beta) / beta) + 2

        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        k = 0
        while True:
            if derivative:
                k += 1
                power *= z
                term = power * mt ** (-1) * mpmath.rgamma(mb * k)
            else:
                term = power * mpmath.rgamma(1 + mb * k)
                power *= z
                k += 1
            total += term
            if k > past_peak and abs(term) < tolerance * max(1, abs(total)):
                break
        return +total
