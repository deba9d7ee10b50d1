from typing import Optional

from app.command.base import BaseCommand, CommandResult
from app.io.run_config import RunConfig
from app.io.writer import ResultStore
from app.runnable.run import execute_run
from app.utils.enums import CommandName


_SOLVE_DESCRIPTION = """Solve the configured problem with every selected method on the run grid.
Writes one CSV per method and, for two or more methods, a JSON comparison report.
Exit status is 0 iff every comparison passes."""


class SolveCommand(BaseCommand):
    name: str = CommandName.SOLVE
    description: str = _SOLVE_DESCRIPTION

    def execute(self, run_config: RunConfig, store: Optional[ResultStore] = None, **kwargs) -> CommandResult:
        outcome = execute_run(run_config, store)
        lines = [f"wrote {path}" for path in outcome.paths]
        if outcome.report is not None:
            for pair in outcome.report.pairs:
                verdict = "pass" if pair.passed else "FAIL"
                lines.append(f"{pair.methods[0]} vs {pair.methods[1]}: max delta {pair.max_delta:.3e} {verdict}")
        return CommandResult(
            content="\n".join(lines),
            args={
                "paths": [str(p) for p in outcome.paths],
                "passed": outcome.report.passed if outcome.report else None,
            },
            exit_code=outcome.exit_code,
        )
