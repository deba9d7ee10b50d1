"""Run Context - State passed between the stages of a run

The context carries the validated run configuration, the domain and initial
condition built from it, and the solution fields produced so far.

The context follows an immutable pattern - modifications return a new
context instance rather than mutating the original.
"""

from typing import Any, Dict, List

from pydantic import BaseModel, Field

from app.io.run_config import RunConfig
from app.schema import DomainSpec, GridPoint, SolutionField
from app.spectral.initial import InitialCondition, builtin_initial_condition
from app.utils.enums import SolveMethod


class RunContext(BaseModel):
    """Shared state of one run"""

    run_config: RunConfig
    domain: DomainSpec
    initial: InitialCondition
    fields: Dict[SolveMethod, SolutionField] = Field(
        default_factory=dict,
        description="Fields in the order they were produced"
    )
    data: Dict[str, Any] = Field(default_factory=dict)

    class Config:
        arbitrary_types_allowed = True

    @classmethod
    def from_config(cls, run_config: RunConfig) -> "RunContext":
        domain = run_config.domain()
        return cls(
            run_config=run_config,
            domain=domain,
            initial=builtin_initial_condition(run_config.problem.initial_condition, domain),
        )

    @property
    def grid(self) -> List[GridPoint]:
        return self.run_config.grid_points()

    def get(self, key: str, default: Any = None) -> Any:
        return self.data.get(key, default)

    def set(self, key: str, value: Any) -> "RunContext":
        """Set a value and return a new context"""
        return self.model_copy(update={"data": {**self.data, key: value}})

    def merge(self, **kwargs) -> "RunContext":
        """Merge several values into data and return a new context"""
        if not kwargs:
            return self
        return self.model_copy(update={"data": {**self.data, **kwargs}})

    def with_field(self, field: SolutionField) -> "RunContext":
        return self.model_copy(update={"fields": {**self.fields, field.method: field}})
