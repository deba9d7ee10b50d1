import math

import pytest
from scipy import special

from app.command.verify import decay_exponent, run_checks
from app.exceptions import ParameterError, RunError
from app.io import ResultStore, parse_config
from app.runnable import (
    MethodRunnable,
    MonteCarloRunnable,
    Pipeline,
    QuadratureRunnable,
    RunContext,
    SpectralRunnable,
    build_pipeline,
    execute_run,
)
from app.schema import RunEventType, RunState
from app.utils.enums import SolveMethod


HALF_PI = math.pi / 2

BASE = """
[problem]
beta = 0.5

[grid]
times = [0.5, 1.0]
points = [1.5707963267948966]
"""


def _config(**overrides):
    return parse_config(BASE, overrides)


class FailingRunnable(MethodRunnable):
    name: str = "failing"
    method: SolveMethod = SolveMethod.QUADRATURE

    def solve(self, context):
        raise ParameterError("boom")


class TestMethodRunnables:
    def test_spectral_initial_time_is_f(self):
        context = RunContext.from_config(_config(grid={"times": [0.0, 1.0]}))
        field = SpectralRunnable().invoke(context).fields[SolveMethod.SPECTRAL]
        assert field.values[0] == pytest.approx(1.0, abs=1e-15)
        assert field.err[0] == 0.0
        assert field.values[1] == pytest.approx(special.erfcx(1.0), abs=1e-10)
        assert field.metadata["order"] == "beta=0.5"

    def test_alpha_clock_spectral_initial_time(self):
        run_config = _config(problem={"beta": None, "alpha": 2.0}, grid={"times": [0.0, 1.0]})
        field = SpectralRunnable().invoke(RunContext.from_config(run_config)).fields[SolveMethod.SPECTRAL]
        assert field.values[0] == pytest.approx(1.0, abs=1e-15)
        assert field.values[1] == pytest.approx(special.erfcx(1.0), abs=1e-7)

    def test_quadrature_with_iterated_order(self):
        """k = 1 gives β = 1/2."""
        run_config = _config(problem={"beta": None, "k": 1}, methods=["quadrature"])
        field = QuadratureRunnable().invoke(RunContext.from_config(run_config)).fields[SolveMethod.QUADRATURE]
        assert field.values[1] == pytest.approx(special.erfcx(1.0), abs=1e-6)

    def test_mc_boundary_points(self):
        run_config = _config(grid={"times": [0.5], "points": [0.0, HALF_PI]}, methods=["mc"],
                             mc={"n": 200, "h": 1e-2, "seed": 7})
        field = MonteCarloRunnable().invoke(RunContext.from_config(run_config)).fields[SolveMethod.MC]
        assert field.values[0] == 0.0
        assert field.err[0] == 0.0
        assert 0.0 < field.values[1] <= 1.0
        assert field.metadata["seed"] == 7
        assert field.metadata["clock"] == "inverse_stable(0.5)"

    def test_runnable_must_be_idle(self):
        runnable = SpectralRunnable()
        runnable.state = RunState.RUNNING
        with pytest.raises(RuntimeError):
            list(runnable.run_stream(RunContext.from_config(_config())))

    def test_id_is_derived(self):
        assert SpectralRunnable().id == "spectralrunnable-spectral"


class TestPipeline:
    def test_event_order(self):
        run_config = _config(methods=["spectral", "quadrature"])
        pipeline = build_pipeline(run_config)
        events = list(pipeline.run_stream(RunContext.from_config(run_config)))
        assert [e.type for e in events] == [
            RunEventType.STEP, RunEventType.FIELD, RunEventType.STEP, RunEventType.FIELD, RunEventType.DONE
        ]
        assert pipeline.state == RunState.IDLE

    def test_or_flattens(self):
        pipeline = SpectralRunnable() | QuadratureRunnable() | MonteCarloRunnable()
        assert isinstance(pipeline, Pipeline)
        assert [stage.name for stage in pipeline.stages] == ["spectral", "quadrature", "mc"]

    def test_invoke_collects_fields(self):
        context = (SpectralRunnable() | QuadratureRunnable()).invoke(RunContext.from_config(_config()))
        assert list(context.fields) == [SolveMethod.SPECTRAL, SolveMethod.QUADRATURE]

    def test_failure_names_method(self):
        pipeline = SpectralRunnable() | FailingRunnable()
        events = []
        with pytest.raises(RunError) as excinfo:
            for event in pipeline.run_stream(RunContext.from_config(_config())):
                events.append(event)
        assert excinfo.value.method == "quadrature"
        assert "boom" in excinfo.value.message
        assert events[-1].type == RunEventType.ERROR
        assert pipeline.state == RunState.ERROR


class TestRunContext:
    def test_immutable_updates(self):
        context = RunContext.from_config(_config())
        updated = context.set("a", 1).merge(b=2)
        assert context.data == {}
        assert updated.get("a") == 1
        assert updated.get("b") == 2
        assert context.merge() is context

    def test_grid(self):
        context = RunContext.from_config(_config())
        assert [(p.t, p.x) for p in context.grid] == [(0.5, (HALF_PI,)), (1.0, (HALF_PI,))]


class TestExecuteRun:
    def test_single_method_writes_csv_only(self, store):
        outcome = execute_run(_config(), store)
        assert [p.name for p in outcome.paths] == ["test_spectral.csv"]
        assert outcome.report is None
        assert outcome.exit_code == 0

    def test_methods_agree(self, store):
        outcome = execute_run(_config(methods=["spectral", "quadrature"]), store)
        assert outcome.report.passed
        assert outcome.exit_code == 0
        assert store.path_for("report", "json").exists()
        assert outcome.report.metadata["order"] == "beta=0.5"

    def test_reruns_are_byte_identical(self, tmp_path):
        run_config = _config(methods=["spectral", "quadrature", "mc"], mc={"n": 400, "h": 1e-2, "seed": 11})
        first = execute_run(run_config, ResultStore(tmp_path / "a", "run"))
        second = execute_run(run_config, ResultStore(tmp_path / "b", "run"))
        for left, right in zip(first.paths, second.paths):
            assert left.name == right.name
            assert left.read_bytes() == right.read_bytes()


class TestVerifyChecks:
    @pytest.mark.parametrize("m, dimension, expected", [(1, 1, 1), (2, 1, 2), (8, 1, 8), (2, 2, 3), (1, 4, 4)])
    def test_decay_exponent(self, m, dimension, expected):
        """Smallest integer above m − 1 + 3d/4."""
        assert decay_exponent(m, dimension) == expected

    def test_iterated_clock_polynomial_data(self):
        """k = 3 is m = 8; x(π−x) misses the decay bound but the solve stands."""
        run_config = _config(problem={"beta": None, "k": 3, "initial_condition": "polynomial"})
        checks = {check.name: check for check in run_checks(run_config)}
        decay = checks["coefficient_decay"]
        assert decay.status == "advisory"
        assert decay.ok
        assert "m=8" in decay.detail
        assert all(check.status != "fail" for check in checks.values())

    def test_bump_meets_second_order_bound(self):
        run_config = _config(problem={"beta": None, "m": 2, "initial_condition": "bump"})
        checks = {check.name: check for check in run_checks(run_config)}
        assert checks["coefficient_decay"].status == "pass"
