"""Solution routes as pipeline stages

Each stage reads the order selector of the run and picks its formula:

    selector    spectral                   quadrature                      mc clock
    beta, m     Mittag-Leffler series      inverse stable density          E^β(t)
    k           series with β = 2^−k       inverse stable, β = 2^−k        |I_k(t)| or J_k(t)
    alpha       α-clock mode integrals     α-stable density               |Y(t)|
"""

from abc import abstractmethod
from typing import Iterator, List, Tuple

from app.exceptions import FracCauchyError, RunError
from app.logger import logger
from app.runnable.base import Runnable
from app.runnable.context import RunContext
from app.schema import GridPoint, RunEvent, RunEventType, RunState, SolutionField
from app.spectral.series import solve_spectral
from app.stochastic.estimator import mc_solve, mc_solve_subordinated
from app.stochastic.rng import RngStream
from app.subordination.quadrature import (
    solve_alpha_clock_quadrature,
    solve_alpha_clock_spectral,
    solve_inverse_stable_quadrature,
)
from app.utils.enums import SolveMethod


class MethodRunnable(Runnable):
    """A stage that produces one SolutionField"""

    method: SolveMethod

    @abstractmethod
    def solve(self, context: RunContext) -> SolutionField:
        """Compute the field on the run grid"""

    def run_stream(self, context: RunContext) -> Iterator[RunEvent]:
        if self.state != RunState.IDLE:
            raise RuntimeError(f"Cannot run from state: {self.state}")

        problem = context.run_config.problem
        with self.state_context(RunState.RUNNING):
            yield RunEvent(type=RunEventType.STEP, stage=self.name,
                           content=f"{self.method} with {problem.order_label()}")
            field = self.solve(context)
            field = field.model_copy(update={"metadata": {**field.metadata, "order": problem.order_label()}})
            logger.info(f"{self.name}: {len(field)} values, max err {max(field.err, default=0.0):.3e}")
            yield RunEvent(type=RunEventType.FIELD, stage=self.name, content=str(self.method),
                           metadata={"field": field})
        yield RunEvent(type=RunEventType.DONE, stage=self.name)


def _split_initial(points: List[GridPoint]) -> Tuple[List[int], List[int]]:
    initial = [i for i, p in enumerate(points) if p.t == 0]
    later = [i for i, p in enumerate(points) if p.t > 0]
    return initial, later


class SpectralRunnable(MethodRunnable):
    name: str = "spectral"
    method: SolveMethod = SolveMethod.SPECTRAL

    def solve(self, context: RunContext) -> SolutionField:
        problem = context.run_config.problem
        tol = context.run_config.tolerances.spectral
        points = context.grid
        beta = problem.order_beta
        if beta is not None:
            return solve_spectral(context.domain, context.initial, beta, points, tol=tol)

        # The α-clock series needs t > 0; u(0, x) = f(x)
        initial, later = _split_initial(points)
        values = [0.0] * len(points)
        err = [0.0] * len(points)
        if initial:
            at_zero = context.initial([points[i].x for i in initial])
            for i, value in zip(initial, at_zero):
                values[i] = float(value)
        truncation, metadata = None, {"alpha": problem.alpha, "clock": "alpha_stable"}
        if later:
            field = solve_alpha_clock_spectral(context.domain, context.initial, problem.alpha,
                                               [points[i] for i in later], tol=tol)
            for i, value, e in zip(later, field.values, field.err):
                values[i], err[i] = value, e
            truncation, metadata = field.truncation, field.metadata
        return SolutionField(grid=points, values=values, err=err, method=SolveMethod.SPECTRAL,
                             truncation=truncation, metadata=metadata)


class QuadratureRunnable(MethodRunnable):
    name: str = "quadrature"
    method: SolveMethod = SolveMethod.QUADRATURE

    def solve(self, context: RunContext) -> SolutionField:
        problem = context.run_config.problem
        tol = context.run_config.tolerances.quadrature
        if problem.alpha is not None:
            return solve_alpha_clock_quadrature(context.domain, context.initial, problem.alpha, context.grid, tol=tol)
        return solve_inverse_stable_quadrature(context.domain, context.initial, problem.order_beta, context.grid,
                                               tol=tol)


class MonteCarloRunnable(MethodRunnable):
    """One estimate per grid point; point i draws from stream id i of the run seed.

    Points on the boundary are 0 with zero error.
    """

    name: str = "mc"
    method: SolveMethod = SolveMethod.MC

    def solve(self, context: RunContext) -> SolutionField:
        run_config = context.run_config
        settings = run_config.mc
        clock = run_config.problem.clock()
        points = context.grid

        values, err = [], []
        rejected, step = 0, None
        for i, point in enumerate(points):
            if context.domain.on_boundary(point.x):
                values.append(0.0)
                err.append(0.0)
                continue
            stream = RngStream(seed=settings.seed, stream_id=i)
            try:
                if settings.formulation == "subordinate_first":
                    estimate = mc_solve_subordinated(context.domain, context.initial, run_config.problem.order_beta,
                                                     point.t, point.x, n=settings.n, h=settings.h, rng=stream,
                                                     outer_steps=settings.outer_steps)
                else:
                    estimate = mc_solve(context.domain, context.initial, clock, point.t, point.x,
                                        n=settings.n, h=settings.h, rng=stream)
            except RunError as e:
                e.point = e.point or (point.t,) + point.x
                raise
            except FracCauchyError as e:
                raise RunError(f"mc at t={point.t}, x={point.x}: {e.message}", method=str(self.method),
                               point=(point.t,) + point.x) from e
            values.append(estimate.mean)
            err.append(estimate.stderr)
            rejected += estimate.rejected
            step = estimate.time_step

        return SolutionField(
            grid=points,
            values=values,
            err=err,
            method=SolveMethod.MC,
            metadata={"clock": clock.label(), "n": settings.n, "h": step, "seed": settings.seed,
                      "rejected": rejected, "formulation": settings.formulation},
        )


_RUNNABLES = {
    SolveMethod.SPECTRAL: SpectralRunnable,
    SolveMethod.QUADRATURE: QuadratureRunnable,
    SolveMethod.MC: MonteCarloRunnable,
}


def runnable_for(method: SolveMethod) -> MethodRunnable:
    return _RUNNABLES[SolveMethod(method)]()
