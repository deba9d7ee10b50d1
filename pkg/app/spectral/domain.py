"""Dirichlet eigenpairs of bounded domains

Intervals (0, M) and boxes Π(0, L_i) use the closed forms

    λ = Σ (n_i π / L_i)²,   φ(x) = Π √(2/L_i) sin(n_i π x_i / L_i)

sorted by eigenvalue with ties broken by the lexicographic multi-index.
Table domains carry user eigenpairs on a bounding box; `register_table`
checks boundary vanishing and orthonormality before accepting them.
"""
import functools
import itertools
import math
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from app.exceptions import CapacityError, ParameterError
from app.logger import logger
from app.schema import DomainSpec, EigenMode, TableMode
from app.utils.enums import DomainKind
from app.utils.quadrature import gauss_legendre_panels


PointsLike = Union[float, Sequence[float], Sequence[Sequence[float]], np.ndarray]

BOUNDARY_TOL = 1e-10
ORTHONORMAL_TOL = 1e-6


def as_points(domain: DomainSpec, x: PointsLike) -> np.ndarray:
    """Coerce a point or a batch of points to shape (P, d)."""
    arr = np.asarray(x, dtype=float)
    d = domain.dimension
    if arr.ndim == 0:
        if d != 1:
            raise ParameterError(f"scalar point given for a {d}-dimensional domain")
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        if d == 1:
            return arr.reshape(-1, 1)
        if arr.shape[0] != d:
            raise ParameterError(f"point {tuple(arr)} does not have {d} coordinates")
        return arr.reshape(1, d)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise ParameterError(f"points of shape {arr.shape} do not match dimension {d}")
    return arr


class SineMode:
    """Tensor product of normalized sines for one multi-index."""

    def __init__(self, multi_index: Tuple[int, ...], lengths: Tuple[float, ...]):
        self.multi_index = multi_index
        self.lengths = lengths
        self.wavenumbers = np.array([n * math.pi / length for n, length in zip(multi_index, lengths)])
        self.amplitude = math.prod(math.sqrt(2.0 / length) for length in lengths)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, len(self.lengths))
        return self.amplitude * np.prod(np.sin(points * self.wavenumbers), axis=1)


def _axis_eigenvalue(n: int, length: float) -> float:
    return (n * math.pi / length) ** 2


@functools.lru_cache(maxsize=32)
def _sorted_indices(lengths: Tuple[float, ...], count: int) -> Tuple[Tuple[float, Tuple[int, ...]], ...]:
    """First `count` (λ, multi-index) pairs of a box in eigenvalue order."""
    # Indices above `cap` on any axis have eigenvalue at least that axis' bound,
    # so the candidate set is complete once the count-th value lies below all bounds.
    cap = max(2, int(math.ceil(count ** (1.0 / len(lengths)))) + 1)
    while True:
        candidates = sorted(
            (round(sum(_axis_eigenvalue(n, length) for n, length in zip(idx, lengths)), 9), idx)
            for idx in itertools.product(range(1, cap + 1), repeat=len(lengths))
        )
        if len(candidates) >= count:
            bound = min(_axis_eigenvalue(cap + 1, length) + sum(
                _axis_eigenvalue(1, other) for j, other in enumerate(lengths) if j != axis)
                for axis, length in enumerate(lengths))
            if candidates[count - 1][0] < bound:
                return tuple(candidates[:count])
        cap *= 2


def eigenpairs(domain: DomainSpec, count: int) -> List[EigenMode]:
    """First `count` Dirichlet eigenpairs of the domain.

    Args:
        domain: Interval, box or table domain
        count: Number of modes, at least 1

    Returns:
        EigenMode list with nondecreasing eigenvalues

    Raises:
        ParameterError: count < 1
        CapacityError: a table domain holds fewer than `count` modes
    """
    if count < 1:
        raise ParameterError(f"count={count} must be at least 1")

    if domain.kind == DomainKind.TABLE:
        available = len(domain.modes)
        if count > available:
            raise CapacityError(
                f"table domain has {available} registered modes, {count} requested",
                requested=count,
                available=available,
            )
        return [
            EigenMode(n=n, multi_index=(n,), eigenvalue=mode.eigenvalue, phi=mode.phi, sup_norm=mode.sup_norm)
            for n, mode in enumerate(domain.modes[:count], start=1)
        ]

    return list(_closed_form_modes(domain.lengths, count))


@functools.lru_cache(maxsize=32)
def _closed_form_modes(lengths: Tuple[float, ...], count: int) -> Tuple[EigenMode, ...]:
    sup_norm = math.prod(math.sqrt(2.0 / length) for length in lengths)
    modes = []
    for n, (_, idx) in enumerate(_sorted_indices(lengths, count), start=1):
        # The rounded key only orders; the eigenvalue itself is exact
        eigenvalue = sum(_axis_eigenvalue(k, length) for k, length in zip(idx, lengths))
        modes.append(EigenMode(n=n, multi_index=idx, eigenvalue=eigenvalue,
                               phi=SineMode(idx, lengths), sup_norm=sup_norm))
    return tuple(modes)


def eigenvalues(domain: DomainSpec, count: int) -> np.ndarray:
    return np.array([mode.eigenvalue for mode in eigenpairs(domain, count)])


def mode_matrix(modes: Sequence[EigenMode], points: np.ndarray) -> np.ndarray:
    """Values φ_n(x_p) as an array of shape (len(modes), P)."""
    return np.vstack([np.asarray(mode(points), dtype=float).reshape(-1) for mode in modes])


def axis_sine_matrix(length: float, rows: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Rows √(2/L) sin(nπx/L) for the indices n in `rows` at the given nodes."""
    return math.sqrt(2.0 / length) * np.sin(np.outer(np.asarray(rows) * math.pi / length, nodes))


# =============================================================================
# Table registration
# =============================================================================

def _box_rule(lengths: Tuple[float, ...], panels: int, order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
    axes = [gauss_legendre_panels(0.0, length, panels, order) for length in lengths]
    grids = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
    weights = functools.reduce(np.multiply.outer, [w for _, w in axes])
    points = np.stack([g.ravel() for g in grids], axis=1)
    return points, weights.ravel()


def register_table(
    lengths: Sequence[float],
    modes: Sequence[Union[TableMode, Tuple[float, Callable, float]]],
    panels: int = 32,
    max_pairs: int = 64,
) -> DomainSpec:
    """Validate user eigenpairs and build a table domain.

    Each eigenfunction must vanish on the bounding box within 1e−10, and
    ∫ φ_n φ_k = δ_nk must hold within 1e−6 for up to `max_pairs` sampled pairs.

    Args:
        lengths: Bounding box side lengths
        modes: TableMode objects or (eigenvalue, phi, sup_norm) triples
        panels: Gauss-Legendre panels per axis for the orthonormality check
        max_pairs: Maximum number of (n, k) pairs checked

    Raises:
        ParameterError: on any failed check
    """
    table = tuple(
        m if isinstance(m, TableMode) else TableMode(eigenvalue=m[0], phi=m[1], sup_norm=m[2]) for m in modes
    )
    try:
        domain = DomainSpec(kind=DomainKind.TABLE, lengths=tuple(float(v) for v in lengths), modes=table)
    except ValueError as e:
        raise ParameterError(f"invalid eigenpair table: {e}") from e

    boundary = np.array(domain.boundary_samples())
    for n, mode in enumerate(table, start=1):
        worst = float(np.max(np.abs(mode.phi(boundary))))
        if worst > BOUNDARY_TOL:
            raise ParameterError(f"table mode {n} is {worst:.3e} on the boundary, above {BOUNDARY_TOL}")

    points, weights = _box_rule(domain.lengths, panels)
    values = np.vstack([np.asarray(mode.phi(points), dtype=float).reshape(-1) for mode in table])
    pairs = [(i, j) for i in range(len(table)) for j in range(i, len(table))]
    if len(pairs) > max_pairs:
        # Diagonal first, then a deterministic spread of off-diagonal pairs
        diagonal = [(i, i) for i in range(len(table))]
        off = [p for p in pairs if p[0] != p[1]]
        stride = max(1, len(off) // max(1, max_pairs - len(diagonal)))
        pairs = diagonal + off[::stride]
    for i, j in pairs:
        gram = float(np.dot(values[i] * values[j], weights))
        expected = 1.0 if i == j else 0.0
        if abs(gram - expected) > ORTHONORMAL_TOL:
            raise ParameterError(
                f"table modes {i + 1},{j + 1}: inner product {gram:.9f}, expected {expected} within {ORTHONORMAL_TOL}"
            )
    logger.debug(f"Registered eigenpair table with {len(table)} modes on box {domain.lengths}")
    return domain
