"""Run orchestration: build the pipeline, write fields, compare methods."""

from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.io.report import ComparisonReport, compare_fields
from app.io.run_config import RunConfig
from app.io.writer import ResultStore, format_fields, parse_fields
from app.logger import run_logger
from app.runnable.context import RunContext
from app.runnable.methods import runnable_for
from app.runnable.pipeline import Pipeline
from app.schema import RunEventType, SolutionField
from app.utils import log_execution_time
from app.utils.enums import SolveMethod


class RunOutcome(BaseModel):
    """Fields, report and written files of one run"""

    fields: Dict[SolveMethod, SolutionField] = Field(default_factory=dict)
    report: Optional[ComparisonReport] = None
    paths: List[Path] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.report is None or self.report.passed else 1


def build_pipeline(run_config: RunConfig) -> Pipeline:
    stages = [runnable_for(method) for method in run_config.methods]
    return Pipeline(name="run", stages=stages)


@log_execution_time(log_level="INFO", stage="run")
def execute_run(run_config: RunConfig, store: Optional[ResultStore] = None) -> RunOutcome:
    """Run every configured method and write `<prefix>_<method>.csv` plus, for two
    or more methods, `<prefix>_report.json`.

    Raises:
        RunError: a method failed; names the method and grid point when known
    """
    store = store or ResultStore(run_config.output.directory, run_config.output.prefix)
    context = RunContext.from_config(run_config)
    pipeline = build_pipeline(run_config)
    log = run_logger(store.prefix)

    outcome = RunOutcome()
    for event in pipeline.run_stream(context):
        if event.type == RunEventType.STEP:
            log.info(f"[{event.stage}] {event.content}")
        elif event.type == RunEventType.FIELD:
            field = event.metadata["field"]
            text = format_fields([field])
            outcome.paths.append(store.write_text(str(field.method), "csv", text))
            # Comparisons see exactly the numbers that were written
            outcome.fields[field.method] = parse_fields(text)[field.method]

    if len(outcome.fields) >= 2:
        report = compare_fields(
            list(outcome.fields.values()),
            metadata={
                "order": run_config.problem.order_label(),
                "initial_condition": str(run_config.problem.initial_condition),
                "domain": {"kind": str(context.domain.kind), "lengths": list(context.domain.lengths)},
            },
        )
        outcome.report = report
        outcome.paths.append(store.write_text("report", "json", report.to_json()))
        for pair in report.pairs:
            verdict = "pass" if pair.passed else "FAIL"
            log.info(f"{pair.methods[0]} vs {pair.methods[1]}: max delta {pair.max_delta:.3e} ({verdict})")
    return outcome


def run(run_config: RunConfig, store: Optional[ResultStore] = None) -> int:
    """Exit status 0 iff every comparison passes."""
    return execute_run(run_config, store).exit_code
