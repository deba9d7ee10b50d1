"""Runnable framework - composable stages of a run

Key Components:
- Runnable: Abstract base class for stages
- RunContext: State passed between stages
- MethodRunnable: A stage producing one SolutionField (spectral, quadrature, mc)
- Pipeline: Sequential composition, `spectral | quadrature | mc`

Example Usage:
    from app.runnable import RunContext, SpectralRunnable, MonteCarloRunnable

    pipeline = SpectralRunnable() | MonteCarloRunnable()
    context = pipeline.invoke(RunContext.from_config(run_config))
"""

from app.runnable.base import Runnable
from app.runnable.context import RunContext
from app.runnable.methods import (
    MethodRunnable,
    MonteCarloRunnable,
    QuadratureRunnable,
    SpectralRunnable,
    runnable_for,
)
from app.runnable.pipeline import Pipeline
from app.runnable.run import RunOutcome, build_pipeline, execute_run, run

__all__ = [
    "Runnable",
    "RunContext",
    "MethodRunnable",
    "MonteCarloRunnable",
    "QuadratureRunnable",
    "SpectralRunnable",
    "runnable_for",
    "Pipeline",
    "RunOutcome",
    "build_pipeline",
    "execute_run",
    "run",
]
