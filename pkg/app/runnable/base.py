"""Runnable - Core abstraction for run stages

A Runnable is something that can:
1. Accept a RunContext
2. Yield a stream of RunEvents
3. Be composed with other Runnables using |
"""

from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import TYPE_CHECKING, Iterator, Optional

from pydantic import BaseModel, Field, model_validator

from app.runnable.context import RunContext
from app.schema import RunEvent, RunEventType, RunState

if TYPE_CHECKING:
    from app.runnable.pipeline import Pipeline


class Runnable(BaseModel, ABC):
    """Abstract base class for run stages

    Subclasses must implement run_stream(). A FIELD event carries the
    produced SolutionField under metadata["field"].

    Attributes:
        id: Identifier, derived from class and name when not given
        name: Human-readable name
        state: Current execution state
    """

    id: Optional[str] = Field(default=None, description="Identifier (derived if not provided)")
    name: str = Field(..., description="Human-readable name")
    state: RunState = Field(default=RunState.IDLE, description="Current execution state")

    class Config:
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def generate_id(self) -> "Runnable":
        if not self.id:
            object.__setattr__(self, "id", f"{self.__class__.__name__.lower()}-{self.name}")
        return self

    @contextmanager
    def state_context(self, new_state: RunState):
        """Context manager for safe state transitions

        On error the state becomes ERROR before the exception propagates;
        on exit the previous state is restored.

        Example:
            with self.state_context(RunState.RUNNING):
                ...
        """
        if not isinstance(new_state, RunState):
            raise ValueError(f"Invalid state: {new_state}")

        previous_state = self.state
        self.state = new_state
        try:
            yield
        except Exception:
            self.state = RunState.ERROR
            raise
        else:
            self.state = previous_state

    @abstractmethod
    def run_stream(self, context: RunContext) -> Iterator[RunEvent]:
        """Execute and yield a stream of events

        Raises:
            RuntimeError: If the Runnable is not in IDLE state
        """

    def invoke(self, context: RunContext) -> RunContext:
        """Run to completion and return the context with every produced field added"""
        for event in self.run_stream(context):
            if event.type == RunEventType.FIELD:
                context = context.with_field(event.metadata["field"])
        return context

    def __or__(self, other: "Runnable") -> "Pipeline":
        """Pipeline operator: runnable1 | runnable2"""
        from app.runnable.pipeline import Pipeline
        return Pipeline(name=f"{self.name}|{other.name}", stages=[self, other])
