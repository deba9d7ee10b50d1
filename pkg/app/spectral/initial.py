"""Initial conditions and their modal coefficients f̄(n) = ∫_D φ_n f dx

Coefficients are integrated with composite Gauss-Legendre rules whose panel
count grows with the highest mode index, refined by doubling the panels until
two passes agree within the domain's tolerance. Boxes are integrated as
tensor contractions of per-axis sine matrices.

Coefficients are produced in fixed blocks [0,16), [16,32), [32,64), ... so a
cached value never depends on the order in which counts were requested.
"""
import math
import threading
from typing import Callable, Dict, List

import numpy as np

from app.config import config
from app.exceptions import CapacityError, InputError, NumericError, ParameterError
from app.logger import logger
from app.schema import DomainSpec
from app.spectral.domain import _box_rule, as_points, axis_sine_matrix, eigenpairs, mode_matrix
from app.utils.enums import DomainKind, InitialConditionName
from app.utils.quadrature import gauss_legendre_panels


FIRST_BLOCK = 16
_MAX_REFINEMENTS = 6
_ORDER = 16


def _contract_axis(tensor: np.ndarray, length: float, rows: np.ndarray, nodes: np.ndarray,
                   weights: np.ndarray, chunk: int = 8192) -> np.ndarray:
    """Contract axis 0 of `tensor` with weighted sine rows, in node chunks of fixed order."""
    out = None
    for start in range(0, nodes.size, chunk):
        part = slice(start, start + chunk)
        basis = axis_sine_matrix(length, rows, nodes[part]) * weights[part]
        term = np.tensordot(tensor[part], basis, axes=([0], [1]))
        out = term if out is None else out + term
    return out


def _fixed_blocks(count: int) -> List[tuple]:
    """Blocks covering [0, count) with power-of-two end points."""
    blocks = [(0, FIRST_BLOCK)]
    while blocks[-1][1] < count:
        start = blocks[-1][1]
        blocks.append((start, 2 * start))
    return blocks


class InitialCondition:
    """Pointwise evaluator f with an append-only coefficient cache.

    The evaluator takes points of shape (P, d) and returns P values.
    """

    def __init__(self, domain: DomainSpec, f: Callable[[np.ndarray], np.ndarray], name: str = "custom"):
        self.domain = domain
        self.f = f
        self.name = name
        self._coeffs = np.zeros(0)
        self._lock = threading.Lock()

    def __call__(self, x) -> np.ndarray:
        points = as_points(self.domain, x)
        values = np.asarray(self.f(points), dtype=float).reshape(-1)
        if values.shape[0] != points.shape[0]:
            raise InputError(f"initial condition {self.name} returned {values.shape[0]} values for {points.shape[0]} points")
        if not np.all(np.isfinite(values)):
            raise InputError(f"initial condition {self.name} returned non-finite samples")
        return values

    @property
    def coeff_count(self) -> int:
        return self._coeffs.shape[0]

    def coefficients(self, count: int) -> np.ndarray:
        """First `count` coefficients, computed on demand and cached."""
        if count < 1:
            raise ParameterError(f"count={count} must be at least 1")
        limit = config.solver.max_modes
        if count > limit:
            raise CapacityError(
                f"{count} coefficients requested for {self.name}, capacity is {limit}",
                requested=count,
                available=limit,
            )
        with self._lock:
            if count > self.coeff_count:
                needed = [b for b in _fixed_blocks(count) if b[1] > self.coeff_count]
                if self.domain.kind == DomainKind.TABLE:
                    available = len(self.domain.modes)
                    if count > available:
                        raise CapacityError(
                            f"table domain has {available} modes, {count} coefficients requested",
                            requested=count,
                            available=available,
                        )
                    needed = [(s, min(e, available)) for s, e in needed if s < available]
                parts = [self._coeffs] + [self._block(start, end) for start, end in needed]
                self._coeffs = np.concatenate(parts)
                self._coeffs.setflags(write=False)
            return self._coeffs[:count]

    # ------------------------------------------------------------------
    # Block integration
    # ------------------------------------------------------------------

    def _tolerance(self) -> float:
        if self.domain.kind == DomainKind.INTERVAL:
            return config.solver.coefficient_tol
        return config.solver.box_coefficient_tol

    def _block(self, start: int, end: int) -> np.ndarray:
        modes = eigenpairs(self.domain, end)[start:end]
        if self.domain.kind == DomainKind.TABLE:
            integrate_pass = lambda panels: self._table_pass(modes, panels)
            panels = 32
        else:
            integrate_pass = lambda panels: self._sine_pass(modes, panels)
            panels = 2 * max(max(mode.multi_index) for mode in modes) + 8

        tol = self._tolerance()
        previous = integrate_pass(panels)
        for _ in range(_MAX_REFINEMENTS):
            panels *= 2
            current = integrate_pass(panels)
            delta = float(np.max(np.abs(current - previous)))
            if delta < tol:
                logger.debug(f"{self.name}: coefficients {start + 1}..{end} with {panels} panels (delta={delta:.2e})")
                return current
            previous = current
        raise NumericError(
            f"coefficients {start + 1}..{end} of {self.name} did not settle below {tol}",
            estimate=float(np.max(np.abs(previous))),
            abserr=delta,
        )

    def _sine_pass(self, modes, panels: int) -> np.ndarray:
        lengths = self.domain.lengths
        low = [min(mode.multi_index[axis] for mode in modes) for axis in range(len(lengths))]
        top = [max(mode.multi_index[axis] for mode in modes) for axis in range(len(lengths))]
        # Panels scale with the highest index on each axis
        axes = [gauss_legendre_panels(0.0, L, max(8, panels * n // max(top)), _ORDER) for L, n in zip(lengths, top)]
        grids = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=1)
        samples = self(points).reshape(grids[0].shape)

        # Contract one axis at a time, ending with shape (rows_1, ..., rows_d)
        tensor = samples
        for L, lo, hi, (nodes, weights) in zip(lengths, low, top, axes):
            tensor = _contract_axis(tensor, L, np.arange(lo, hi + 1), nodes, weights)
        return np.array([tensor[tuple(k - lo for k, lo in zip(mode.multi_index, low))] for mode in modes])

    def _table_pass(self, modes, panels: int) -> np.ndarray:
        points, weights = _box_rule(self.domain.lengths, panels, _ORDER)
        samples = self(points)
        return mode_matrix(modes, points) @ (samples * weights)


def coefficients(domain: DomainSpec, f, count: int) -> np.ndarray:
    """Coefficients f̄(1..count) of f on the domain.

    Args:
        domain: Domain the eigenpairs belong to
        f: InitialCondition, or a vectorized evaluator on points of shape (P, d)
        count: Number of coefficients

    Returns:
        Array of length `count`

    Raises:
        InputError: f returns non-finite samples
        CapacityError: count exceeds the solver capacity or table size
    """
    ic = f if isinstance(f, InitialCondition) else InitialCondition(domain, f)
    if ic.domain != domain:
        raise ParameterError("initial condition belongs to a different domain")
    return np.array(ic.coefficients(count))


# =============================================================================
# Built-in initial conditions
# =============================================================================

def _sine(lengths):
    return lambda x: np.sin(math.pi * x[:, 0] / lengths[0])


def _product_sine(lengths):
    wavenumbers = np.pi / np.asarray(lengths)
    return lambda x: np.prod(np.sin(x * wavenumbers), axis=1)


def _bump(lengths):
    lengths = np.asarray(lengths)

    def evaluate(x: np.ndarray) -> np.ndarray:
        gap = x * (lengths - x)
        inside = np.all(gap > 0, axis=1)
        out = np.zeros(x.shape[0])
        # Peak value 1 at the center, where x(L−x) = L²/4
        exponent = np.sum(-1.0 / gap[inside] + 4.0 / lengths ** 2, axis=1)
        out[inside] = np.exp(exponent)
        return out

    return evaluate


def _polynomial(lengths):
    lengths = np.asarray(lengths)
    return lambda x: np.prod(x * (lengths - x), axis=1)


_BUILTINS: Dict[InitialConditionName, Callable] = {
    InitialConditionName.SINE: _sine,
    InitialConditionName.PRODUCT_SINE: _product_sine,
    InitialConditionName.BUMP: _bump,
    InitialConditionName.POLYNOMIAL: _polynomial,
}


def builtin_initial_condition(name, domain: DomainSpec) -> InitialCondition:
    """Named initial condition on an interval or box.

    sine         sin(πx/M) on an interval (rejected on boxes)
    product-sine Π sin(πx_i/L_i)
    bump         Π exp(−1/(x_i(L_i−x_i)) + 4/L_i²), smooth and flat at ∂D
    polynomial   Π x_i(L_i−x_i)
    """
    try:
        key = InitialConditionName(name)
    except ValueError:
        accepted = ", ".join(str(n) for n in InitialConditionName)
        raise ParameterError(f"unknown initial condition {name!r}; accepted: {accepted}")
    if domain.kind == DomainKind.TABLE:
        raise ParameterError("built-in initial conditions need an interval or box domain")
    if key == InitialConditionName.SINE and domain.kind != DomainKind.INTERVAL:
        raise ParameterError("'sine' is defined on intervals; use 'product-sine' on boxes")
    return InitialCondition(domain, _BUILTINS[key](domain.lengths), name=str(key))


def zero_initial_condition(domain: DomainSpec) -> InitialCondition:
    return InitialCondition(domain, lambda x: np.zeros(x.shape[0]), name="zero")
