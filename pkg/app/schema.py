"""Schema definitions for the application

This module contains the Pydantic models shared by the solvers, the
stochastic engine, the verification checks and the run orchestration.
"""

import math
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from app.exceptions import ParameterError
from app.utils.enums import ClockVariant, DomainKind, PdeTag, SolveMethod


# =============================================================================
# Execution States
# =============================================================================

class RunState(str, Enum):
    """Execution state of a Runnable"""
    IDLE = "idle"
    RUNNING = "running"
    FINISHED = "finished"
    ERROR = "error"


class RunEventType(str, Enum):
    """Events emitted while a pipeline runs"""
    STEP = "step"        # Stage marker
    FIELD = "field"      # A solution field was produced
    DONE = "done"        # Pipeline complete
    ERROR = "error"      # Stage failed


class RunEvent(BaseModel):
    """One pipeline event"""

    type: RunEventType
    stage: Optional[str] = None
    content: Optional[str] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)


# =============================================================================
# Orders and clock parameters
# =============================================================================

class FractionalOrder(BaseModel):
    """Order beta of the Caputo derivative, optionally tied to m = 1/beta.

    When m is given beta is stored as the float 1/m.
    """

    beta: float
    m: Optional[int] = None

    class Config:
        frozen = True

    @model_validator(mode="before")
    @classmethod
    def beta_from_m(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("m") is not None and data.get("beta") is None:
            data = {**data, "beta": 1.0 / data["m"]}
        return data

    @model_validator(mode="after")
    def check_range(self) -> "FractionalOrder":
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta={self.beta} outside 0<β<1")
        if self.m is not None:
            if self.m < 2:
                raise ValueError(f"m={self.m} must be an integer ≥ 2")
            if self.beta != 1.0 / self.m:
                raise ValueError(f"beta={self.beta} differs from 1/m for m={self.m}")
        return self

    @classmethod
    def from_m(cls, m: int) -> "FractionalOrder":
        return cls(m=m)


class StableClockParam(BaseModel):
    """Index alpha of a symmetric stable clock, optionally rational l/m."""

    alpha: float
    l: Optional[int] = None
    m: Optional[int] = None

    class Config:
        frozen = True

    @model_validator(mode="before")
    @classmethod
    def alpha_from_ratio(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("alpha") is None and data.get("l") and data.get("m"):
            data = {**data, "alpha": data["l"] / data["m"]}
        return data

    @model_validator(mode="after")
    def check_range(self) -> "StableClockParam":
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha={self.alpha} outside 0<α≤2")
        if (self.l is None) != (self.m is None):
            raise ValueError("l and m must be given together")
        if self.l is not None:
            if self.l < 1 or self.m < 1 or math.gcd(self.l, self.m) != 1:
                raise ValueError(f"l={self.l}, m={self.m} must be coprime positive integers")
            if self.alpha != self.l / self.m:
                raise ValueError(f"alpha={self.alpha} differs from l/m={self.l}/{self.m}")
        return self

    @classmethod
    def rational(cls, l: int, m: int) -> "StableClockParam":
        return cls(l=l, m=m)

    @property
    def is_rational(self) -> bool:
        return self.l is not None


class ClockKind(BaseModel):
    """Which random time change drives the killed Brownian motion."""

    variant: ClockVariant
    beta: Optional[float] = None
    k: Optional[int] = None
    alpha: Optional[float] = None

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_parameters(self) -> "ClockKind":
        if self.variant == ClockVariant.INVERSE_STABLE:
            if self.beta is None or not 0.0 < self.beta < 1.0:
                raise ValueError(f"inverse_stable clock needs 0<β<1, got {self.beta}")
        elif self.variant in (ClockVariant.ITERATED_BM, ClockVariant.TWO_SIDED_ITERATED):
            if self.k is None or self.k < 1:
                raise ValueError(f"{self.variant} clock needs integer k ≥ 1, got {self.k}")
        elif self.variant == ClockVariant.ALPHA_STABLE:
            if self.alpha is None or not 0.0 < self.alpha <= 2.0:
                raise ValueError(f"alpha_stable clock needs 0<α≤2, got {self.alpha}")
        return self

    @classmethod
    def inverse_stable(cls, beta: float) -> "ClockKind":
        return cls(variant=ClockVariant.INVERSE_STABLE, beta=beta)

    @classmethod
    def iterated_bm(cls, k: int) -> "ClockKind":
        return cls(variant=ClockVariant.ITERATED_BM, k=k)

    @classmethod
    def two_sided_iterated(cls, k: int) -> "ClockKind":
        return cls(variant=ClockVariant.TWO_SIDED_ITERATED, k=k)

    @classmethod
    def alpha_stable(cls, alpha: float) -> "ClockKind":
        return cls(variant=ClockVariant.ALPHA_STABLE, alpha=alpha)

    @property
    def equivalent_beta(self) -> Optional[float]:
        """Index of the inverse-stable clock with the same one-dimensional law."""
        if self.variant == ClockVariant.INVERSE_STABLE:
            return self.beta
        if self.variant in (ClockVariant.ITERATED_BM, ClockVariant.TWO_SIDED_ITERATED):
            return 0.5 ** self.k
        return None

    def label(self) -> str:
        if self.variant == ClockVariant.INVERSE_STABLE:
            return f"{self.variant}({self.beta})"
        if self.variant == ClockVariant.ALPHA_STABLE:
            return f"{self.variant}({self.alpha})"
        return f"{self.variant}({self.k})"


# =============================================================================
# Domains and modes
# =============================================================================

class TableMode(BaseModel):
    """A user-supplied eigenpair for table domains."""

    eigenvalue: float = Field(..., gt=0)
    phi: Callable[..., Any]
    sup_norm: float = Field(..., gt=0)

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class DomainSpec(BaseModel):
    """Bounded domain with enumerable Dirichlet eigenpairs.

    Interval and box domains are the products of (0, L_i). Table domains carry
    user-supplied eigenpairs whose eigenfunctions live on the box given by
    `lengths`; they are validated by app.spectral.domain.register_table.
    """

    kind: DomainKind
    lengths: Tuple[float, ...]
    modes: Optional[Tuple[TableMode, ...]] = None

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator("lengths")
    @classmethod
    def check_lengths(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("at least one side length is required")
        for length in value:
            if not (length > 0 and math.isfinite(length)):
                raise ValueError(f"side length {length} must be positive and finite")
        return value

    @model_validator(mode="after")
    def check_kind(self) -> "DomainSpec":
        if self.kind == DomainKind.INTERVAL and len(self.lengths) != 1:
            raise ValueError("interval domains have exactly one length")
        if self.kind == DomainKind.TABLE:
            if not self.modes:
                raise ValueError("table domains need at least one eigenpair")
            eigenvalues = [mode.eigenvalue for mode in self.modes]
            if any(b < a for a, b in zip(eigenvalues, eigenvalues[1:])):
                raise ValueError("table eigenvalues must be nondecreasing")
        elif self.modes is not None:
            raise ValueError(f"{self.kind} domains do not take eigenpair tables")
        return self

    @classmethod
    def interval(cls, length: float) -> "DomainSpec":
        return cls(kind=DomainKind.INTERVAL, lengths=(float(length),))

    @classmethod
    def box(cls, *lengths: float) -> "DomainSpec":
        return cls(kind=DomainKind.BOX, lengths=tuple(float(v) for v in lengths))

    @property
    def dimension(self) -> int:
        return len(self.lengths)

    @property
    def scale(self) -> float:
        """Smallest side length; path steps scale with its square."""
        return min(self.lengths)

    def contains(self, point: Tuple[float, ...]) -> bool:
        """Open-domain membership test."""
        return len(point) == self.dimension and all(0.0 < x < length for x, length in zip(point, self.lengths))

    def on_boundary(self, point: Tuple[float, ...], atol: float = 1e-14) -> bool:
        return any(abs(x) <= atol or abs(x - length) <= atol for x, length in zip(point, self.lengths))

    def boundary_samples(self, per_face: int = 3) -> List[Tuple[float, ...]]:
        """Deterministic sample points on every face of the closure."""
        fractions = [(j + 1) / (per_face + 1) for j in range(per_face)]
        samples: List[Tuple[float, ...]] = []
        for axis, length in enumerate(self.lengths):
            for wall in (0.0, length):
                for frac in fractions:
                    point = [frac * side for side in self.lengths]
                    point[axis] = wall
                    samples.append(tuple(point))
        return samples


class EigenMode(BaseModel):
    """Dirichlet eigenpair: Δφ = −λφ in D, φ = 0 on ∂D."""

    n: int = Field(..., ge=1)
    multi_index: Tuple[int, ...]
    eigenvalue: float = Field(..., gt=0)
    phi: Callable[..., Any]
    sup_norm: float = Field(..., gt=0)

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def __call__(self, points: Any) -> Any:
        return self.phi(points)


# =============================================================================
# Grids, fields and estimates
# =============================================================================

class GridPoint(BaseModel):
    """Evaluation point (t, x)."""

    t: float = Field(..., ge=0)
    x: Tuple[float, ...]

    class Config:
        frozen = True


class SeriesValue(BaseModel):
    """Partial modal sum with its doubling-based error estimate."""

    value: float
    err: float = Field(..., ge=0)
    modes: int


class SolutionField(BaseModel):
    """Values of u on a grid produced by one method."""

    grid: List[GridPoint]
    values: List[float]
    err: List[float]
    method: SolveMethod
    truncation: Optional[int] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_shapes(self) -> "SolutionField":
        if not (len(self.grid) == len(self.values) == len(self.err)):
            raise ValueError("grid, values and err must have equal length")
        if any(e < 0 or math.isnan(e) for e in self.err):
            raise ValueError("err must be nonnegative")
        return self

    def __len__(self) -> int:
        return len(self.grid)


class ClockSample(BaseModel):
    """One realized clock value at outer time t."""

    kind: ClockKind
    t: float = Field(..., ge=0)
    value: float

    @model_validator(mode="after")
    def check_sign(self) -> "ClockSample":
        if self.kind.variant != ClockVariant.TWO_SIDED_ITERATED and self.value < 0:
            raise ValueError(f"clock value {self.value} must be nonnegative")
        return self


class KilledPath(BaseModel):
    """Outcome of one killed walk."""

    exited: bool
    position: Tuple[float, ...]
    elapsed: float = Field(..., ge=0)


class MCEstimate(BaseModel):
    """Monte Carlo mean with standard error."""

    mean: float
    stderr: float = Field(..., ge=0)
    n: int = Field(..., ge=2)
    time_step: float = Field(..., gt=0)
    rejected: int = Field(0, ge=0)


class ResidualReport(BaseModel):
    """Left-minus-right side of a PDE sampled on a grid."""

    pde_tag: PdeTag
    grid: List[GridPoint]
    max_residual: float = Field(..., ge=0)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    inconclusive: bool = False
    truncation_error: float = 0.0

    @property
    def passed(self) -> bool:
        tol = self.tolerances.get("residual")
        return (not self.inconclusive) and (tol is None or self.max_residual <= tol)


class KSResult(BaseModel):
    """Kolmogorov-Smirnov statistic and asymptotic p-value."""

    statistic: float
    p_value: float
    n_a: int
    n_b: Optional[int] = None

    def __iter__(self):
        yield self.statistic
        yield self.p_value


# =============================================================================
# Parameter coercion
# =============================================================================

def coerce_beta(beta: Any, allow_one: bool = False) -> float:
    """Return beta as a float, accepting FractionalOrder or a number.

    Raises:
        ParameterError: outside 0<β<1 (or 0<β≤1 when allow_one)
    """
    value = beta.beta if isinstance(beta, FractionalOrder) else beta
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"beta must be a number, got {beta!r}")
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not (value > 0.0 and upper_ok):
        accepted = "0<β≤1" if allow_one else "0<β<1"
        raise ParameterError(f"beta={value} outside {accepted}")
    return value


def coerce_alpha(alpha: Any) -> float:
    """Return alpha as a float, accepting StableClockParam or a number."""
    value = alpha.alpha if isinstance(alpha, StableClockParam) else alpha
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"alpha must be a number, got {alpha!r}")
    if not 0.0 < value <= 2.0:
        raise ParameterError(f"alpha={value} outside 0<α≤2")
    return value


def require_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ParameterError(f"{name}={value} must be positive and finite")
    return value
