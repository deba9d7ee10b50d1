"""L1 discretization of the Caputo derivative

    ∂^β g(t_n) ≈ τ^{−β}/Γ(2−β) Σ_{j=0}^{n−1} b_j (g_{n−j} − g_{n−j−1}),
    b_j = (j+1)^{1−β} − j^{1−β}

The sum is a convolution of the weights with the first differences and is
evaluated with an FFT.
"""
import math
from typing import Any, Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from app.exceptions import ParameterError
from app.schema import coerce_beta, require_positive


MAX_STEP = 1e-3
_UNIFORM_RTOL = 1e-9


def l1_weights(beta: float, count: int) -> np.ndarray:
    j = np.arange(count, dtype=float)
    return (j + 1.0) ** (1.0 - beta) - j ** (1.0 - beta)


def caputo_l1(
    samples: Sequence[float],
    beta: Any,
    tau: Optional[float] = None,
    times: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """Caputo derivative of order β of g sampled at t_n = nτ, n = 0..N−1.

    Args:
        samples: g(t_0), ..., g(t_{N−1}) with t_0 = 0
        beta: FractionalOrder or float in (0, 1)
        tau: Grid step, at most 1e−3
        times: Sample times instead of tau; they must be uniform and start at 0

    Returns:
        Derivative samples of length N; the value at t_0 is 0

    Raises:
        ParameterError: non-uniform times, a step above 1e−3, or non-finite samples
    """
    beta = coerce_beta(beta)
    g = np.asarray(samples, dtype=float).reshape(-1)
    if not np.all(np.isfinite(g)):
        raise ParameterError("Caputo samples must be finite")
    if times is not None:
        times = np.asarray(times, dtype=float).reshape(-1)
        if times.shape != g.shape:
            raise ParameterError(f"{times.size} times given for {g.size} samples")
        steps = np.diff(times)
        if times.size < 2 or times[0] != 0.0:
            raise ParameterError("Caputo grids start at t=0 and hold at least two points")
        if np.max(np.abs(steps - steps.mean())) > _UNIFORM_RTOL * steps.mean():
            raise ParameterError("Caputo L1 needs a uniform time grid")
        tau = float(steps.mean())
    if tau is None:
        raise ParameterError("either tau or times is required")
    tau = require_positive("tau", tau)
    if tau > MAX_STEP * (1.0 + _UNIFORM_RTOL):
        raise ParameterError(f"tau={tau} above the largest supported step {MAX_STEP}")

    out = np.zeros_like(g)
    if g.size < 2:
        return out
    differences = np.diff(g)
    weights = l1_weights(beta, differences.size)
    out[1:] = fftconvolve(weights, differences)[: differences.size] * tau ** (-beta) / math.gamma(2.0 - beta)
    return out
