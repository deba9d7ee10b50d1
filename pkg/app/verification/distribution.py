"""Kolmogorov-Smirnov tests for clock samplers

A reference given as samples gives a two-sample test. A reference density is
turned into a CDF first: it is integrated cell by cell over cells placed at
quantiles of the sample, the remaining mass above the last cell is
integrated to infinity, and the cumulative values are joined by a monotone
PCHIP interpolant.
"""
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats
from scipy.interpolate import PchipInterpolator

from app.config import config
from app.exceptions import ParameterError, ReferenceDistributionError
from app.logger import logger
from app.schema import KSResult
from app.utils import log_execution_time
from app.utils.quadrature import integrate


MIN_SAMPLES = 1000
NORMALIZATION_TOL = 1e-6

Reference = Union[Sequence[float], np.ndarray, Callable[[float], float]]


def _as_samples(values, label: str) -> np.ndarray:
    samples = np.asarray(values, dtype=float).reshape(-1)
    if samples.size < MIN_SAMPLES:
        raise ParameterError(f"{label} holds {samples.size} samples, at least {MIN_SAMPLES} required")
    if not np.all(np.isfinite(samples)):
        raise ParameterError(f"{label} contains non-finite samples")
    return samples


def reference_cdf(
    density: Callable[[float], float],
    samples: np.ndarray,
    lower: float = 0.0,
    cells: Optional[int] = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of a density supported on [lower, ∞), tabulated over the sample range.

    Raises:
        ReferenceDistributionError: the density does not integrate to 1 within 1e−6
    """
    cells = cells or config.verification.reference_cells
    inner = np.quantile(samples[samples > lower], np.linspace(0.0, 1.0, cells + 1)[1:])
    nodes = np.unique(np.concatenate([[lower], inner]))

    masses = [
        integrate(density, a, b, epsabs=1e-12, epsrel=1e-10, label=f"reference cell [{a:.4g}, {b:.4g}]")[0]
        for a, b in zip(nodes[:-1], nodes[1:])
    ]
    tail, _ = integrate(density, nodes[-1], np.inf, epsabs=1e-12, epsrel=1e-10, label="reference tail")
    cumulative = np.concatenate([[0.0], np.cumsum(masses)])
    total = float(cumulative[-1] + tail)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ReferenceDistributionError(
            f"reference density integrates to {total:.9f}, not 1 within {NORMALIZATION_TOL}"
        )
    interpolant = PchipInterpolator(nodes, np.maximum.accumulate(cumulative), extrapolate=False)

    def cdf(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = np.nan_to_num(interpolant(np.clip(x, lower, nodes[-1])), nan=0.0)
        return np.clip(np.where(x < lower, 0.0, np.where(x > nodes[-1], 1.0, inside)), 0.0, 1.0)

    return cdf


@log_execution_time(log_level="DEBUG")
def ks_distribution_test(
    samples_a: Sequence[float],
    reference: Reference,
    *,
    lower: float = 0.0,
    cdf: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> KSResult:
    """Kolmogorov-Smirnov statistic and asymptotic p-value.

    Args:
        samples_a: At least 1000 draws
        reference: Second sample (two-sample test) or a density evaluator
        lower: Lower end of the reference density's support
        cdf: Closed-form reference CDF; replaces the tabulated one

    Raises:
        ParameterError: too few or non-finite samples
        ReferenceDistributionError: the reference density does not normalize
    """
    a = _as_samples(samples_a, "samples_a")
    if cdf is None and callable(reference):
        cdf = reference_cdf(reference, a, lower)
    if cdf is not None:
        result = stats.kstest(a, cdf, method="asymp")
        logger.debug(f"one-sample KS: D={result.statistic:.4f}, p={result.pvalue:.4f}, n={a.size}")
        return KSResult(statistic=float(result.statistic), p_value=float(result.pvalue), n_a=a.size)

    b = _as_samples(reference, "samples_b")
    result = stats.ks_2samp(a, b, method="asymp")
    logger.debug(f"two-sample KS: D={result.statistic:.4f}, p={result.pvalue:.4f}, n={a.size}/{b.size}")
    return KSResult(statistic=float(result.statistic), p_value=float(result.pvalue), n_a=a.size, n_b=b.size)
