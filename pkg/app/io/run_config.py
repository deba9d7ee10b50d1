"""Run configuration

A run is described in TOML or JSON:

    methods = ["spectral", "quadrature", "mc"]

    [problem]
    initial_condition = "sine"      # sine | product-sine | bump | polynomial
    beta = 0.5                      # exactly one of beta, m, alpha, k

    [problem.domain]
    kind = "interval"               # interval | box
    lengths = [3.141592653589793]

    [grid]
    times = [0.5, 1.0]
    points = [[1.5707963267948966]]

    [mc]
    n = 200000
    h = 1e-3
    seed = 7

Unknown keys are rejected. Validation problems are collected into a
ConfigError holding one ConfigDiagnostic per field.
"""
import json
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from app.config import config
from app.exceptions import ConfigDiagnostic, ConfigError
from app.schema import ClockKind, DomainSpec, GridPoint
from app.utils.enums import DomainKind, InitialConditionName, SolveMethod


class _Strict(BaseModel):
    class Config:
        extra = "forbid"


class DomainConfig(_Strict):
    kind: DomainKind = DomainKind.INTERVAL
    lengths: List[float] = Field(default_factory=lambda: [math.pi])

    @model_validator(mode="after")
    def check_shape(self) -> "DomainConfig":
        if self.kind == DomainKind.TABLE:
            raise ValueError("table domains are registered from code, not from run files")
        if not self.lengths or any(not (v > 0 and math.isfinite(v)) for v in self.lengths):
            raise ValueError("lengths must be positive and finite")
        if self.kind == DomainKind.INTERVAL and len(self.lengths) != 1:
            raise ValueError("interval domains take exactly one length")
        return self

    def build(self) -> DomainSpec:
        if self.kind == DomainKind.INTERVAL:
            return DomainSpec.interval(self.lengths[0])
        return DomainSpec.box(*self.lengths)


class ProblemConfig(_Strict):
    domain: DomainConfig = Field(default_factory=DomainConfig)
    initial_condition: InitialConditionName = InitialConditionName.SINE
    beta: Optional[float] = None
    m: Optional[int] = None
    alpha: Optional[float] = None
    k: Optional[int] = None
    two_sided: bool = False

    @field_validator("beta")
    @classmethod
    def check_beta(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value < 1.0:
            raise ValueError(f"beta={value} outside 0<β<1")
        return value

    @field_validator("m")
    @classmethod
    def check_m(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 2:
            raise ValueError(f"m={value} outside m≥2")
        return value

    @field_validator("alpha")
    @classmethod
    def check_alpha(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value <= 2.0:
            raise ValueError(f"alpha={value} outside 0<α≤2")
        return value

    @field_validator("k")
    @classmethod
    def check_k(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"k={value} outside k≥1")
        return value

    @model_validator(mode="after")
    def one_order(self) -> "ProblemConfig":
        given = [name for name in ("beta", "m", "alpha", "k") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of beta, m, alpha, k is required, got {given or 'none'}")
        if self.two_sided and self.k is None:
            raise ValueError("two_sided applies to the iterated clock selected by k")
        if self.initial_condition == InitialConditionName.SINE and self.domain.kind != DomainKind.INTERVAL:
            raise ValueError("initial condition 'sine' needs an interval domain; use 'product-sine' on boxes")
        return self

    @property
    def order_beta(self) -> Optional[float]:
        """β of the inverse stable clock behind the order selector; None for α clocks."""
        if self.beta is not None:
            return self.beta
        if self.m is not None:
            return 1.0 / self.m
        if self.k is not None:
            return 0.5 ** self.k
        return None

    def clock(self) -> ClockKind:
        if self.alpha is not None:
            return ClockKind.alpha_stable(self.alpha)
        if self.k is not None:
            return ClockKind.two_sided_iterated(self.k) if self.two_sided else ClockKind.iterated_bm(self.k)
        return ClockKind.inverse_stable(self.order_beta)

    def order_label(self) -> str:
        for name in ("beta", "m", "alpha", "k"):
            value = getattr(self, name)
            if value is not None:
                return f"{name}={value}"
        return ""


class GridConfig(_Strict):
    times: List[float]
    points: List[Union[float, List[float]]]

    @model_validator(mode="after")
    def check_nonempty(self) -> "GridConfig":
        if not self.times or not self.points:
            raise ValueError("grid needs at least one time and one point")
        if any(t < 0 or not math.isfinite(t) for t in self.times):
            raise ValueError("grid times must be nonnegative and finite")
        return self

    def coordinates(self) -> List[Tuple[float, ...]]:
        return [tuple(float(v) for v in (p if isinstance(p, list) else [p])) for p in self.points]


class MonteCarloConfig(_Strict):
    n: int = Field(default_factory=lambda: config.montecarlo.replicates, ge=100)
    h: Optional[float] = Field(None, gt=0)
    seed: int = Field(..., ge=0)
    # kill_first scores I(τ_D > L); subordinate_first exit-checks X(E(s)) on an outer time grid
    formulation: Literal["kill_first", "subordinate_first"] = "kill_first"
    outer_steps: int = Field(32, ge=1)


class ToleranceConfig(_Strict):
    spectral: Optional[float] = Field(None, gt=0)
    quadrature: Optional[float] = Field(None, gt=0)


class OutputConfig(_Strict):
    directory: str = Field(default_factory=lambda: config.output.directory)
    prefix: str = Field(default_factory=lambda: config.output.prefix)


class RunConfig(_Strict):
    problem: ProblemConfig
    grid: GridConfig
    methods: List[SolveMethod] = Field(default_factory=lambda: [SolveMethod.SPECTRAL])
    mc: Optional[MonteCarloConfig] = None
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("methods")
    @classmethod
    def check_methods(cls, value: List[SolveMethod]) -> List[SolveMethod]:
        if not value:
            raise ValueError("at least one method is required")
        if len(set(value)) != len(value):
            raise ValueError("methods must not repeat")
        return value

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if SolveMethod.MC in self.methods and self.mc is None:
            raise ValueError("method mc needs an [mc] section with a seed")
        if (self.mc is not None and self.mc.formulation == "subordinate_first"
                and (self.problem.alpha is not None or self.problem.k is not None)):
            raise ValueError("the subordinate_first formulation needs an inverse stable clock (beta or m)")
        if self.methods != [SolveMethod.SPECTRAL] and any(t == 0 for t in self.grid.times):
            raise ValueError("grid times must be positive unless spectral is the only method")
        dimension = len(self.problem.domain.lengths)
        for point in self.grid.coordinates():
            if len(point) != dimension:
                raise ValueError(f"grid point {point} does not have {dimension} coordinates")
        return self

    def domain(self) -> DomainSpec:
        return self.problem.domain.build()

    def grid_points(self) -> List[GridPoint]:
        """Times outer, points inner."""
        return [GridPoint(t=t, x=x) for t in self.grid.times for x in self.grid.coordinates()]


# =============================================================================
# Parsing
# =============================================================================

def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _diagnostics(error: ValidationError) -> List[ConfigDiagnostic]:
    found = []
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "<config>"
        if item["type"] == "extra_forbidden":
            message = f"unknown key {item['loc'][-1]!r}"
        else:
            message = item["msg"].removeprefix("Value error, ")
        found.append(ConfigDiagnostic(field, message))
    return found


def load_document(text: str) -> Dict[str, Any]:
    """Parse TOML, or JSON when the text starts with '{'."""
    try:
        if text.lstrip().startswith("{"):
            document = json.loads(text)
        else:
            document = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError([ConfigDiagnostic("<document>", str(e))]) from e
    if not isinstance(document, dict):
        raise ConfigError([ConfigDiagnostic("<document>", "top level must be a table")])
    return document


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Validate a run description; `overrides` (from CLI flags) win over the text.

    Raises:
        ConfigError: with one diagnostic per offending field
    """
    document = _merge(load_document(text) if text.strip() else {}, overrides or {})
    try:
        return RunConfig(**document)
    except ValidationError as e:
        raise ConfigError(_diagnostics(e)) from e
