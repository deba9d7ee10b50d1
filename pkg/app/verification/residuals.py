"""PDE residuals of the spectral solutions

fractional     ∂^β u − Δu          Caputo by L1 on a fine uniform time grid
heat           ∂u/∂t − Δu          β = 1, Richardson-refined central differences

Δ^l u is always the term-wise series. Grid points with t < max(10τ, 1e−2)
are left out because the solution is not smooth at t = 0. A report whose
series truncation error exceeds the residual tolerance is marked inconclusive.
"""
import math
from typing import Any, Dict, List, Optional

import numpy as np

from app.config import config
from app.exceptions import ParameterError
from app.logger import logger
from app.schema import DomainSpec, GridPoint, ResidualReport, coerce_beta, require_positive
from app.spectral.domain import eigenpairs, mode_matrix
from app.spectral.series import as_initial_condition, modal_profile, normalize_grid, solve_spectral
from app.utils import log_execution_time
from app.utils.enums import PdeTag
from app.verification.caputo import caputo_l1


HEAT_RESIDUAL_TOL = 1e-6
SINGULAR_RADIUS = 1e-2
# Modes whose weight |f̄(n) φ_n(x)| falls below tol times this ratio are left out of the fine grid
_NEGLIGIBLE = 1e-3


def _kept_points(points: List[GridPoint], radius: float) -> List[GridPoint]:
    kept = [p for p in points if p.t >= radius]
    if len(kept) < len(points):
        logger.debug(f"residual grid: {len(points) - len(kept)} points with t < {radius} left out")
    return kept


def _empty_report(tag: PdeTag, tolerances: Dict[str, float], inconclusive: bool) -> ResidualReport:
    return ResidualReport(pde_tag=tag, grid=[], max_residual=0.0, tolerances=tolerances, inconclusive=inconclusive)


@log_execution_time(log_level="DEBUG")
def fractional_residual(
    domain: DomainSpec,
    f,
    beta: Any,
    grid,
    *,
    tau: Optional[float] = None,
    tol: Optional[float] = None,
    series_tol: Optional[float] = None,
) -> ResidualReport:
    """max |∂^β u − Δu| over the grid for the spectral solution.

    β = 1 is delegated to heat_residual.

    Args:
        domain: Domain with Dirichlet eigenpairs
        f: InitialCondition or vectorized evaluator
        beta: FractionalOrder or float in (0, 1]
        grid: (t, x) points with t > 0
        tau: L1 step (defaults to [verification] caputo_step)
        tol: Residual tolerance (defaults to [verification] residual_tol)
        series_tol: Truncation tolerance of the series (defaults to [solver] spectral_tol)
    """
    beta = coerce_beta(beta, allow_one=True)
    if beta == 1.0:
        return heat_residual(domain, f, grid, series_tol=series_tol)
    ic = as_initial_condition(domain, f)
    tau = require_positive("tau", config.verification.caputo_step if tau is None else tau)
    tol = config.verification.residual_tol if tol is None else tol
    tolerances = {"residual": tol, "tau": tau}

    points = normalize_grid(domain, grid)
    if any(p.t <= 0 for p in points):
        raise ParameterError("residual grids need t > 0")
    kept = _kept_points(points, max(10.0 * tau, SINGULAR_RADIUS))
    if not kept:
        logger.warning("fractional residual: every grid point lies in the excluded neighborhood of t=0")
        return _empty_report(PdeTag.FRACTIONAL, tolerances, inconclusive=True)

    value = solve_spectral(domain, ic, beta, kept, tol=series_tol)
    laplacian = solve_spectral(domain, ic, beta, kept, tol=series_tol, laplacian_power=1)
    modes = eigenpairs(domain, value.truncation)
    coeffs = ic.coefficients(value.truncation)
    lambdas = np.array([mode.eigenvalue for mode in modes])

    t_max = max(p.t for p in kept)
    steps = int(math.ceil(t_max / tau))
    fine = np.linspace(0.0, t_max, steps + 1)
    cutoff = _NEGLIGIBLE * tol

    residuals = np.zeros(len(kept))
    dropped = 0.0
    for x in sorted({p.x for p in kept}):
        indices = [i for i, p in enumerate(kept) if p.x == x]
        weights = coeffs * mode_matrix(modes, np.array([x]))[:, 0]
        significant = np.abs(weights) > cutoff
        dropped = max(dropped, float(np.sum(np.abs(weights[~significant]) * (1.0 + lambdas[~significant]))))
        if not np.any(significant):
            continue
        u_fine = weights[significant] @ modal_profile(beta, lambdas[significant], fine)
        derivative = caputo_l1(u_fine, beta, fine[1] - fine[0])
        at = np.array([kept[i].t for i in indices])
        caputo = np.interp(at, fine, derivative)
        residuals[indices] = np.abs(caputo - np.array([laplacian.values[i] for i in indices]))

    truncation_error = float(max(value.err) + max(laplacian.err) + dropped)
    report = ResidualReport(
        pde_tag=PdeTag.FRACTIONAL,
        grid=kept,
        max_residual=float(residuals.max()),
        tolerances=tolerances,
        inconclusive=truncation_error > tol,
        truncation_error=truncation_error,
    )
    logger.debug(f"fractional residual (beta={beta}): {report.max_residual:.3e}, truncation {truncation_error:.2e}")
    return report


def _central_time_derivative(domain: DomainSpec, ic, beta: float, points: List[GridPoint], h: float,
                             series_tol: Optional[float]):
    """Fourth-order difference (8(u(t+h/2) − u(t−h/2)) − (u(t+h) − u(t−h))) / 6h."""
    shifted = [(p.t + s, p.x) for p in points for s in (h, -h, h / 2, -h / 2)]
    field = solve_spectral(domain, ic, beta, shifted, tol=series_tol)
    values = np.array(field.values).reshape(len(points), 4)
    derivative = (8.0 * (values[:, 2] - values[:, 3]) - (values[:, 0] - values[:, 1])) / (6.0 * h)
    return derivative, 3.0 * max(field.err) / h


@log_execution_time(log_level="DEBUG")
def heat_residual(
    domain: DomainSpec,
    f,
    grid,
    *,
    h: Optional[float] = None,
    tol: float = HEAT_RESIDUAL_TOL,
    series_tol: Optional[float] = None,
) -> ResidualReport:
    """max |∂u/∂t − Δu| for the β = 1 series."""
    ic = as_initial_condition(domain, f)
    h = require_positive("h", config.verification.fd_step if h is None else h)
    tolerances = {"residual": tol, "fd_step": h}
    points = normalize_grid(domain, grid)
    if any(p.t <= 0 for p in points):
        raise ParameterError("residual grids need t > 0")
    kept = _kept_points(points, max(10.0 * h, SINGULAR_RADIUS))
    if not kept:
        return _empty_report(PdeTag.HEAT, tolerances, inconclusive=True)

    derivative, derivative_err = _central_time_derivative(domain, ic, 1.0, kept, h, series_tol)
    laplacian = solve_spectral(domain, ic, 1.0, kept, tol=series_tol, laplacian_power=1)
    residuals = np.abs(derivative - np.array(laplacian.values))
    truncation_error = float(derivative_err + max(laplacian.err))
    return ResidualReport(
        pde_tag=PdeTag.HEAT,
        grid=kept,
        max_residual=float(residuals.max()),
        tolerances=tolerances,
        inconclusive=truncation_error > tol,
        truncation_error=truncation_error,
    )

