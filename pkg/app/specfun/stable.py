"""Stable densities

One-sided stable law D(1) with Laplace transform e^{−s^β}:
    Kanter's function
        A(u) = [sin(βπu)^β sin((1−β)πu)^{1−β} / sin(πu)]^{1/(1−β)},  0<u<1
    turns the law into a mixture, D(1) = (A(U)/W)^{(1−β)/β} with U uniform and
    W standard exponential, so that
        P(D(1) ≤ x) = ∫_0^1 exp(−A(u) y) du,       y = x^{−β/(1−β)}
        g_β(x)      = β/(1−β) x^{−1/(1−β)} ∫_0^1 A(u) exp(−A(u) y) du
    For large x both are summed from their convergent power series in x^{−β}.

Inverse stable law E^β(t):
    f_t(x) = t/β x^{−1−1/β} g_β(t x^{−1/β}) and P(E^β(t) ≤ x) = P(D(1) ≥ t x^{−1/β}).
    Near x = 0 the density is summed as a Wright series in z = x t^{−β}.

Symmetric α-stable transition density with characteristic function
exp(−t|ξ|^α), by one-sided Fourier inversion.
"""
import functools
import math
from typing import Any, Callable

import numpy as np
from scipy import special
from scipy.optimize import brentq

from app.exceptions import ParameterError
from app.schema import coerce_alpha, coerce_beta, require_positive
from app.utils.quadrature import integrate


# Series in x^{-β} take over once x^{-β} drops below this ratio
_SERIES_RATIO = 0.1
_SERIES_TERMS = 60
# exp(-700) is the edge of double precision
_UNDERFLOW = 700.0


# =============================================================================
# One-sided stable law
# =============================================================================

def kanter_a(beta: float, u: np.ndarray) -> np.ndarray:
    """Kanter's function A(u), written with sinc so that A(0) is finite."""
    u = np.asarray(u, dtype=float)
    inner = (beta * np.sinc(beta * u)) ** beta * ((1.0 - beta) * np.sinc((1.0 - beta) * u)) ** (1.0 - beta)
    with np.errstate(divide="ignore"):
        return (inner / np.sinc(u)) ** (1.0 / (1.0 - beta))


def _kanter_floor(beta: float) -> float:
    # A is increasing on (0, 1) with A(0) = β^{β/(1−β)} (1−β)
    return beta ** (beta / (1.0 - beta)) * (1.0 - beta)


def _series_terms(beta: float, u: float, integrated: bool) -> float:
    """(1/π) Σ_{k≥1} (−1)^{k+1} Γ(βk+c) sin(πβk)/k! u^{−βk}, c=1 for g·u, c=0 for the tail."""
    k = np.arange(1, _SERIES_TERMS + 1)
    shift = 0.0 if integrated else 1.0
    log_mag = special.gammaln(beta * k + shift) - special.gammaln(k + 1.0) - beta * k * math.log(u)
    signs = np.where(k % 2 == 1, 1.0, -1.0)
    return float(np.sum(signs * np.sin(math.pi * beta * k) * np.exp(log_mag)) / math.pi)


def stable_density(beta: Any, u: float) -> float:
    """Density g_β(u) of D(1).

    Args:
        beta: FractionalOrder or float in (0, 1)
        u: Positive argument

    Returns:
        g_β(u) ≥ 0, exactly 0 once the value underflows

    Raises:
        ParameterError: u ≤ 0 or beta out of range
    """
    beta = coerce_beta(beta)
    u = require_positive("u", u)

    if beta == 0.5:
        exponent = 1.0 / (4.0 * u)
        if exponent > _UNDERFLOW:
            return 0.0
        return math.exp(-exponent) / (2.0 * math.sqrt(math.pi) * u ** 1.5)

    if u ** (-beta) < _SERIES_RATIO:
        return max(_series_terms(beta, u, integrated=False) / u, 0.0)

    y = u ** (-beta / (1.0 - beta))
    floor = _kanter_floor(beta)
    if floor * y > _UNDERFLOW:
        return 0.0

    def integrand(v: float) -> float:
        a = float(kanter_a(beta, v))
        if not math.isfinite(a):
            return 0.0
        return a * math.exp(-(a - floor) * y)

    value, _ = integrate(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-11,
                         label=f"stable_density(beta={beta}, u={u})")
    if value <= 0.0:
        return 0.0
    log_density = math.log(beta / (1.0 - beta)) - math.log(u) / (1.0 - beta) - floor * y + math.log(value)
    return math.exp(log_density) if log_density > -_UNDERFLOW else 0.0


def stable_sf(beta: Any, u: float) -> float:
    """Survival function P(D(1) > u)."""
    beta = coerce_beta(beta)
    u = require_positive("u", u)

    if beta == 0.5:
        return float(special.erf(0.5 / math.sqrt(u)))
    if u ** (-beta) < _SERIES_RATIO:
        return min(max(_series_terms(beta, u, integrated=True), 0.0), 1.0)

    y = u ** (-beta / (1.0 - beta))

    def integrand(v: float) -> float:
        a = float(kanter_a(beta, v))
        if not math.isfinite(a):
            return 1.0
        return -math.expm1(-a * y)

    value, _ = integrate(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11,
                         label=f"stable_sf(beta={beta}, u={u})")
    return min(max(value, 0.0), 1.0)


def stable_cdf(beta: Any, u: float) -> float:
    """Distribution function P(D(1) ≤ u)."""
    beta = coerce_beta(beta)
    u = require_positive("u", u)

    if beta == 0.5:
        return float(special.erfc(0.5 / math.sqrt(u)))
    if u ** (-beta) < _SERIES_RATIO:
        return 1.0 - stable_sf(beta, u)

    y = u ** (-beta / (1.0 - beta))
    floor = _kanter_floor(beta)
    if floor * y > _UNDERFLOW:
        return 0.0

    def integrand(v: float) -> float:
        a = float(kanter_a(beta, v))
        if not math.isfinite(a):
            return 0.0
        return math.exp(-a * y)

    value, _ = integrate(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11,
                         label=f"stable_cdf(beta={beta}, u={u})")
    if value > 0.5:
        return 1.0 - stable_sf(beta, u)
    return min(max(value, 0.0), 1.0)


# =============================================================================
# Inverse stable law
# =============================================================================

# Scaled arguments z = x t^{-β} up to this bound use the Wright series
_WRIGHT_LIMIT = 1.0


def _wright_terms(beta: float) -> int:
    # Terms decay like z^k k^{-(1-β)k}
    return int(min(2000, max(40, 60.0 / (1.0 - beta))))


def _wright_m(beta: float, z: float) -> float:
    """M_β(z) = (1/π) Σ_{k≥0} (−z)^k Γ(β(k+1)) sin(πβ(k+1)) / k!."""
    if z == 0.0:
        return float(special.rgamma(1.0 - beta))
    k = np.arange(_wright_terms(beta))
    log_mag = k * math.log(z) + special.gammaln(beta * (k + 1)) - special.gammaln(k + 1.0)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * np.sin(math.pi * beta * (k + 1)) * np.exp(log_mag)) / math.pi)


def inverse_stable_density(beta: Any, t: float, x: float) -> float:
    """Density f_t(x) of E^β(t).

    Args:
        beta: FractionalOrder or float in (0, 1)
        t: Outer time, positive
        x: Clock value, positive

    Returns:
        f_t(x) = t/β x^{−1−1/β} g_β(t x^{−1/β})
    """
    beta = coerce_beta(beta)
    t = require_positive("t", t)
    x = require_positive("x", x)

    z = x * t ** (-beta)
    if z <= _WRIGHT_LIMIT:
        return max(t ** (-beta) * _wright_m(beta, z), 0.0)
    g = stable_density(beta, t * x ** (-1.0 / beta))
    if g == 0.0:
        return 0.0
    return t / beta * x ** (-1.0 - 1.0 / beta) * g


def inverse_stable_cdf(beta: Any, t: float, x: float) -> float:
    """P(E^β(t) ≤ x) = P(D(1) ≥ t x^{−1/β})."""
    beta = coerce_beta(beta)
    t = require_positive("t", t)
    if x <= 0:
        return 0.0
    return stable_sf(beta, t * x ** (-1.0 / beta))


@functools.lru_cache(maxsize=64)
def _unit_inverse_median(beta: float) -> float:
    return brentq(lambda x: inverse_stable_cdf(beta, 1.0, x) - 0.5, 1e-6, 1e3, xtol=1e-12)


def inverse_stable_median(beta: Any, t: float) -> float:
    """Median of E^β(t); E^β(t) has the law of t^β E^β(1)."""
    beta = coerce_beta(beta)
    t = require_positive("t", t)
    return t ** beta * _unit_inverse_median(beta)


# =============================================================================
# Symmetric α-stable law
# =============================================================================

def _unit_alpha_density(alpha: float, y: float) -> float:
    y = abs(y)
    if alpha == 1.0:
        return 1.0 / (math.pi * (1.0 + y * y))
    if alpha == 2.0:
        return math.exp(-y * y / 4.0) / (2.0 * math.sqrt(math.pi))
    if y == 0.0:
        return math.gamma(1.0 + 1.0 / alpha) / math.pi
    if alpha < 1.0 and y ** (-alpha) < _SERIES_RATIO:
        k = np.arange(1, _SERIES_TERMS + 1)
        log_mag = special.gammaln(alpha * k + 1.0) - special.gammaln(k + 1.0) - (alpha * k + 1.0) * math.log(y)
        signs = np.where(k % 2 == 1, 1.0, -1.0)
        return max(float(np.sum(signs * np.sin(0.5 * math.pi * alpha * k) * np.exp(log_mag)) / math.pi), 0.0)

    value, _ = integrate(lambda r: math.exp(-r ** alpha), 0.0, np.inf, epsabs=1e-11,
                         weight="cos", wvar=y, label=f"alpha_stable_density(alpha={alpha}, y={y})")
    return max(value / math.pi, 0.0)


def alpha_stable_density_1d(alpha: Any, t: float, s: float) -> float:
    """Transition density p^α(t, s) of the symmetric α-stable process.

    Args:
        alpha: StableClockParam or float in (0, 2]
        t: Positive time
        s: Position

    Returns:
        p^α(t, s), symmetric in s
    """
    alpha = coerce_alpha(alpha)
    t = require_positive("t", t)
    if alpha == 1.0:
        return t / (math.pi * (t * t + s * s))
    if alpha == 2.0:
        return math.exp(-s * s / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    scale = t ** (1.0 / alpha)
    return _unit_alpha_density(alpha, s / scale) / scale


def alpha_stable_cdf_1d(alpha: Any, t: float, s: float) -> float:
    """P(Y(t) ≤ s) = 1/2 + (1/π) ∫_0^∞ sin(s r) e^{−t r^α} / r dr."""
    alpha = coerce_alpha(alpha)
    t = require_positive("t", t)
    if alpha == 1.0:
        return 0.5 + math.atan(s / t) / math.pi
    if alpha == 2.0:
        return 0.5 * float(special.erfc(-s / (2.0 * math.sqrt(t))))
    if s == 0.0:
        return 0.5

    y = abs(s) / t ** (1.0 / alpha)
    # ∫_0^1 uses sin(yr)/r = y sinc(yr/π), which stays finite at r=0
    head, _ = integrate(lambda r: y * np.sinc(y * r / math.pi) * math.exp(-r ** alpha), 0.0, 1.0,
                        epsabs=1e-12, label=f"alpha_stable_cdf head(alpha={alpha})")
    tail, _ = integrate(lambda r: math.exp(-r ** alpha) / r, 1.0, np.inf, epsabs=1e-11,
                        weight="sin", wvar=y, label=f"alpha_stable_cdf tail(alpha={alpha})")
    half = (head + tail) / math.pi
    return min(max(0.5 + math.copysign(half, s), 0.0), 1.0)


@functools.lru_cache(maxsize=64)
def _unit_abs_median(alpha: float) -> float:
    return brentq(lambda s: alpha_stable_cdf_1d(alpha, 1.0, s) - 0.75, 1e-6, 1e6, xtol=1e-12)


def alpha_stable_abs_median(alpha: Any, t: float) -> float:
    """Median of |Y(t)|; |Y(t)| has the law of t^{1/α} |Y(1)|."""
    alpha = coerce_alpha(alpha)
    t = require_positive("t", t)
    if alpha == 1.0:
        return t
    return t ** (1.0 / alpha) * _unit_abs_median(alpha)


# =============================================================================
# Iterated Brownian motion
# =============================================================================

def _half_normal(s: float, x: float) -> float:
    # Density of |B(s)| for variance 2s
    if s <= 0.0:
        return 0.0
    exponent = x * x / (4.0 * s)
    if exponent > _UNDERFLOW:
        return 0.0
    return math.exp(-exponent) / math.sqrt(math.pi * s)


def _iterated(k: int, t: float) -> Callable[[float], float]:
    if k == 1:
        return lambda x: _half_normal(t, x)
    inner = _iterated(k - 1, t)

    def density(x: float) -> float:
        # |I_k(t)| = |B(s)| with s distributed as |I_{k-1}(t)|
        split = max(x * x, 1e-3)
        head, _ = integrate(lambda s: _half_normal(s, x) * inner(s), 0.0, split, epsabs=1e-12,
                            label=f"iterated_bm_density(k={k}) head")
        tail, _ = integrate(lambda s: _half_normal(s, x) * inner(s), split, np.inf, epsabs=1e-12,
                            label=f"iterated_bm_density(k={k}) tail")
        return head + tail

    return density


def iterated_bm_density(k: int, t: float, x: float) -> float:
    """Density of |I_k(t)| by nested quadrature of half-normal kernels.

    Nesting depth grows with k, so k is limited to 3.
    """
    if int(k) != k or not 1 <= k <= 3:
        raise ParameterError(f"k={k} must be an integer in 1..3")
    t = require_positive("t", t)
    x = require_positive("x", x)
    return _iterated(int(k), t)(x)
