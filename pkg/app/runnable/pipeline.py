"""Pipeline - Sequential composition of Runnables

A Pipeline executes its stages one after another; fields produced by a stage
are visible to the stages after it.
"""

from typing import Iterator, List

from pydantic import Field

from app.exceptions import FracCauchyError, RunError
from app.logger import logger
from app.runnable.base import Runnable
from app.runnable.context import RunContext
from app.schema import RunEvent, RunEventType, RunState


class Pipeline(Runnable):
    """Sequential execution of Runnables

        pipeline = spectral | quadrature | montecarlo

    A stage failure is reported as an ERROR event and then raised as a
    RunError naming the stage's method and, when known, the grid point.
    """

    stages: List[Runnable] = Field(default_factory=list, description="Runnables to execute in sequence")

    def run_stream(self, context: RunContext) -> Iterator[RunEvent]:
        if self.state != RunState.IDLE:
            raise RuntimeError(f"Cannot run from state: {self.state}")

        current = context
        with self.state_context(RunState.RUNNING):
            for i, stage in enumerate(self.stages):
                stage_name = f"stage_{i}_{stage.name}"
                logger.info(f"{self.name}: starting {stage_name}")
                try:
                    for event in stage.run_stream(current):
                        if event.type == RunEventType.DONE:
                            continue
                        if event.type == RunEventType.FIELD:
                            current = current.with_field(event.metadata["field"])
                        yield event.model_copy(update={"stage": event.stage or stage_name})
                except FracCauchyError as e:
                    method = str(getattr(stage, "method", stage.name))
                    error = e if isinstance(e, RunError) else RunError(f"{stage.name}: {e.message}", method=method)
                    error.method = error.method or method
                    logger.error(f"{self.name}: {stage_name} failed: {error.message}")
                    yield RunEvent(
                        type=RunEventType.ERROR,
                        stage=stage_name,
                        content=error.message,
                        metadata={"method": str(error.method), "point": error.point},
                    )
                    if error is e:
                        raise
                    raise error from e

        yield RunEvent(type=RunEventType.DONE, stage=self.name, content=f"{len(self.stages)} stages")

    def __or__(self, other: Runnable) -> "Pipeline":
        """Chain another Runnable to this pipeline"""
        if isinstance(other, Pipeline):
            stages = self.stages + other.stages
        else:
            stages = self.stages + [other]
        return Pipeline(name=f"{self.name}|{other.name}", stages=stages)
