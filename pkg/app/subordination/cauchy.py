"""Residual of the Cauchy-clock equation

For the α = 1 clock the solution satisfies

    ∂²u/∂t² = −2Δf(x)/(πt) − Δ²u(t,x)

∂²u/∂t² is taken by central differences on the quadrature value, refined by
one Richardson step; Δf and Δ²u are term-wise spectral multiplications.
"""
import math
from typing import List, Optional, Sequence

import numpy as np

from app.config import config
from app.exceptions import ParameterError
from app.logger import logger
from app.schema import DomainSpec, GridPoint, ResidualReport, require_positive
from app.spectral.series import (
    GridLike,
    as_initial_condition,
    fixed_truncation,
    modal_weights,
    normalize_grid,
    solve_spectral,
)
from app.subordination.quadrature import (
    _alpha_clock_integral,
    _semigroup,
    alpha_clock_decay,
    alpha_clock_mode_term,
    solve_alpha_clock_spectral,
)
from app.utils import log_execution_time
from app.utils.enums import PdeTag


CAUCHY_RESIDUAL_TOL = 1e-4
_VALUE_TOL = 1e-12
_SERIES_TOL = 1e-10


def _second_difference(value, t: float, h: float) -> float:
    """Richardson-extrapolated central second difference (4D(h/2) − D(h))/3."""
    def central(step: float) -> float:
        return (value(t + step) - 2.0 * value(t) + value(t - step)) / step ** 2

    return (4.0 * central(h / 2) - central(h)) / 3.0


@log_execution_time(log_level="DEBUG")
def cauchy_clock_residual(
    domain: DomainSpec,
    f,
    grid: GridLike,
    *,
    h: Optional[float] = None,
    tol: float = CAUCHY_RESIDUAL_TOL,
) -> ResidualReport:
    """max over the grid of |∂²u/∂t² + 2Δf/(πt) + Δ²u| for the α = 1 clock.

    Args:
        domain: Domain with Dirichlet eigenpairs
        f: InitialCondition or vectorized evaluator with a convergent Δf series
        grid: (t, x) points bounded away from t = 0
        h: Finite-difference step (defaults to [verification] fd_step)
        tol: Residual tolerance recorded in the report

    Raises:
        ParameterError: a grid time is within 2h of t = 0, where 1/t is singular
    """
    ic = as_initial_condition(domain, f)
    points = normalize_grid(domain, grid)
    h = require_positive("h", config.verification.fd_step if h is None else h)
    if any(p.t <= 2.0 * h for p in points):
        raise ParameterError(f"residual grid must stay above t={2.0 * h}; the forcing 1/t is singular at t=0")
    if not points:
        return ResidualReport(pde_tag=PdeTag.CAUCHY_CLOCK, grid=[], max_residual=0.0,
                              tolerances={"residual": tol, "fd_step": h})

    t_low = min(p.t for p in points) - h
    modes, tail = fixed_truncation(domain, ic, _VALUE_TOL / 10,
                                   decay=lambda lambdas: alpha_clock_decay(1.0, lambdas, t_low))

    laplace_f = solve_spectral(domain, ic, 1.0, [(0.0, p.x) for p in points], tol=_SERIES_TOL, laplacian_power=1)
    bilaplace_u = solve_alpha_clock_spectral(domain, ic, 1.0, points, tol=_SERIES_TOL, laplacian_power=2)

    residuals: List[float] = []
    for i, p in enumerate(points):
        weights, lambdas = modal_weights(domain, ic, modes, p.x)
        semigroup = _semigroup(weights, lambdas)
        lowest = float(lambdas.min())

        def value(t: float) -> float:
            return _alpha_clock_integral(1.0, t, semigroup, lowest, _VALUE_TOL, f"cauchy residual at t={t}")[0]

        second = _second_difference(value, p.t, h)
        residual = second + 2.0 * laplace_f.values[i] / (math.pi * p.t) + bilaplace_u.values[i]
        residuals.append(abs(residual))

    truncation_error = float(max(laplace_f.err) * 2.0 / (math.pi * t_low) + max(bilaplace_u.err) + tail)
    worst = max(residuals)
    logger.debug(f"cauchy clock residual {worst:.3e} over {len(points)} points ({modes} modes)")
    return ResidualReport(
        pde_tag=PdeTag.CAUCHY_CLOCK,
        grid=points,
        max_residual=worst,
        tolerances={"residual": tol, "fd_step": h},
        inconclusive=truncation_error > tol,
        truncation_error=truncation_error,
    )


def cauchy_mode_identity_residual(lam: float, t_grid: Sequence[float], h: float = 1e-3) -> float:
    """max over t of |V'' − λ/(πt) + λ²V| for V(t) = ∫e^{−λs}p¹(t,s)ds."""
    lam = require_positive("lambda", lam)
    times = [float(t) for t in t_grid]
    if not times or min(times) <= 2.0 * h:
        raise ParameterError(f"t_grid must be nonempty and above t={2.0 * h}")

    def value(t: float) -> float:
        return alpha_clock_mode_term(1.0, lam, t, epsabs=1e-13)

    return max(abs(_second_difference(value, t, h) - lam / (math.pi * t) + lam * lam * value(t)) for t in times)


def cauchy_boundary_check(domain: DomainSpec, f, times: Sequence[float], tol: Optional[float] = None) -> bool:
    """True iff u and Δu of the α = 1 solution vanish on ∂D within their error estimates."""
    ic = as_initial_condition(domain, f)
    boundary = domain.boundary_samples()
    grid = [GridPoint(t=float(t), x=tuple(x)) for t in times for x in boundary]
    for power in (0, 1):
        field = solve_alpha_clock_spectral(domain, ic, 1.0, grid, tol=tol, laplacian_power=power)
        slack = np.abs(np.array(field.values)) - np.array(field.err)
        if np.any(slack > 0):
            logger.warning(f"Δ^{power} u is {float(np.max(np.abs(field.values))):.3e} on the boundary")
            return False
    return True
