"""Quadrature helpers shared by the solvers

`integrate` wraps scipy's adaptive QUADPACK driver: integration warnings
become retries with a doubled subdivision limit, and a final failure is
reported as NumericError carrying the best estimate reached.

`gauss_legendre_panels` builds composite Gauss-Legendre rules used for
coefficient integrals, where whole modal families are integrated at once.
"""
import functools
import warnings
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from app.config import config
from app.exceptions import NumericError
from app.logger import logger


class QuadratureNotConverged(Exception):
    """One quadrature attempt ended with an integration warning."""

    def __init__(self, value: float, abserr: float, detail: str):
        super().__init__(detail)
        self.value = value
        self.abserr = abserr
        self.detail = detail


def _quad_once(
    func: Callable[[float], float],
    a: float,
    b: float,
    epsabs: float,
    epsrel: float,
    limit: int,
    points: Optional[Sequence[float]],
    weight: Optional[str],
    wvar: Optional[float],
) -> Tuple[float, float]:
    kwargs = {"epsabs": epsabs, "epsrel": epsrel, "limit": limit}
    if points is not None:
        kwargs["points"] = list(points)
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
        if np.isinf(b):
            kwargs["limlst"] = max(50, limit // 4)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, abserr = quad(func, a, b, **kwargs)[:2]

    issues = [w for w in caught if issubclass(w.category, IntegrationWarning)]
    if issues and abserr > max(epsabs, epsrel * abs(value)):
        raise QuadratureNotConverged(value, abserr, str(issues[-1].message))
    return value, abserr


def integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    *,
    epsabs: Optional[float] = None,
    epsrel: float = 0.0,
    points: Optional[Sequence[float]] = None,
    weight: Optional[str] = None,
    wvar: Optional[float] = None,
    limit: Optional[int] = None,
    attempts: Optional[int] = None,
    label: str = "integral",
) -> Tuple[float, float]:
    """Adaptive quadrature with retries.

    Args:
        func: Scalar integrand
        a, b: Limits (b may be inf)
        epsabs: Absolute tolerance (defaults to [solver] quadrature_tol)
        epsrel: Relative tolerance
        points: Break points for finite intervals
        weight, wvar: QUADPACK weight function ('cos' / 'sin' for Fourier integrals)
        limit: Initial subdivision limit, doubled after each failed attempt
        attempts: Number of attempts before giving up
        label: Name used in log lines and errors

    Returns:
        (value, estimated absolute error)

    Raises:
        NumericError: if the last attempt still reports non-convergence
    """
    settings = config.solver
    epsabs = settings.quadrature_tol if epsabs is None else epsabs
    base_limit = limit or settings.quadrature_limit
    attempts = attempts or settings.quadrature_retries

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(attempts),
            retry=retry_if_exception_type(QuadratureNotConverged),
            reraise=True,
        ):
            with attempt:
                number = attempt.retry_state.attempt_number
                current_limit = base_limit * 2 ** (number - 1)
                if number > 1:
                    logger.debug(f"Retrying {label} with limit={current_limit}")
                return _quad_once(func, a, b, epsabs, epsrel, current_limit, points, weight, wvar)
    except QuadratureNotConverged as exc:
        raise NumericError(
            f"{label} did not converge after {attempts} attempts: {exc.detail}",
            estimate=exc.value,
            abserr=exc.abserr,
        ) from exc


@functools.lru_cache(maxsize=32)
def _legendre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_panels(a: float, b: float, panels: int, order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b].

    Args:
        a, b: Interval
        panels: Number of equal sub-intervals
        order: Points per panel

    Returns:
        (nodes, weights), each of length panels * order, nodes increasing
    """
    ref_nodes, ref_weights = _legendre_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref_nodes[None, :]).ravel()
    weights = (half[:, None] * ref_weights[None, :]).ravel()
    return nodes, weights
