"""Cross-method comparison reports

Every pair of fields is compared point by point. The allowed difference is
the sum of the two deterministic error bounds plus three combined standard
errors of any Monte Carlo field (the err column of an mc field holds its
standard error). Verdicts only use numbers that were written to the CSVs.
"""
import json
import math
from itertools import combinations
from typing import Any, Dict, List, Sequence

from pydantic import BaseModel, Field

from app.exceptions import InputError
from app.schema import SolutionField
from app.utils.enums import SolveMethod


REPORT_SCHEMA = 1
MC_STDERR_FACTOR = 3.0
_ROUNDOFF = 4.0 * 2.0 ** -52


class PointComparison(BaseModel):
    t: float
    x: List[float]
    delta: float
    allowed: float
    passed: bool


class PairComparison(BaseModel):
    methods: List[str]
    max_delta: float
    passed: bool
    points: List[PointComparison] = Field(default_factory=list)


class ComparisonReport(BaseModel):
    schema_version: int = REPORT_SCHEMA
    methods: List[str]
    pairs: List[PairComparison] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(pair.passed for pair in self.pairs)

    def to_json(self) -> str:
        """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
        document = {
            "schema": self.schema_version,
            "methods": self.methods,
            "passed": self.passed,
            "pairs": [pair.model_dump() for pair in self.pairs],
            "metadata": self.metadata,
        }
        return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def allowed_difference(method_a: SolveMethod, err_a: float, method_b: SolveMethod, err_b: float,
                       scale: float) -> float:
    deterministic = 0.0
    variance = 0.0
    for method, err in ((method_a, err_a), (method_b, err_b)):
        if method == SolveMethod.MC:
            variance += err * err
        else:
            deterministic += err
    return deterministic + MC_STDERR_FACTOR * math.sqrt(variance) + _ROUNDOFF * scale


def compare_pair(a: SolutionField, b: SolutionField) -> PairComparison:
    if [(p.t, p.x) for p in a.grid] != [(p.t, p.x) for p in b.grid]:
        raise InputError(f"fields {a.method} and {b.method} are not on the same grid")
    points = []
    for point, ua, ea, ub, eb in zip(a.grid, a.values, a.err, b.values, b.err):
        delta = abs(ua - ub)
        allowed = allowed_difference(a.method, ea, b.method, eb, max(abs(ua), abs(ub)))
        points.append(PointComparison(t=point.t, x=list(point.x), delta=delta, allowed=allowed,
                                      passed=delta <= allowed))
    return PairComparison(
        methods=[str(a.method), str(b.method)],
        max_delta=max((p.delta for p in points), default=0.0),
        passed=all(p.passed for p in points),
        points=points,
    )


def compare_fields(fields: Sequence[SolutionField], metadata: Dict[str, Any] = None) -> ComparisonReport:
    """Compare all pairs in the order the fields were produced."""
    return ComparisonReport(
        methods=[str(f.method) for f in fields],
        pairs=[compare_pair(a, b) for a, b in combinations(fields, 2)],
        metadata=metadata or {},
    )
