import json
import math

import pytest

from app.exceptions import ConfigError, InputError
from app.io import ResultStore, compare_fields, format_fields, load_document, parse_config, parse_fields
from app.io.report import MC_STDERR_FACTOR, allowed_difference
from app.schema import ClockKind, GridPoint, SolutionField
from app.utils.enums import ClockVariant, DomainKind, SolveMethod


MINIMAL = """
[problem]
beta = 0.5

[grid]
times = [1.0]
points = [1.5707963267948966]
"""


def _field(method, values, err, times=(1.0,), x=(1.0,)):
    grid = [GridPoint(t=t, x=x) for t in times]
    return SolutionField(grid=grid, values=list(values), err=list(err), method=method)


def _diagnostics(excinfo):
    return {d.field: d.message for d in excinfo.value.diagnostics}


class TestParseConfig:
    def test_defaults(self):
        run = parse_config(MINIMAL)
        assert run.methods == [SolveMethod.SPECTRAL]
        assert run.problem.domain.kind == DomainKind.INTERVAL
        assert run.domain().lengths == (math.pi,)
        assert run.problem.order_beta == 0.5
        assert run.output.prefix == "run"
        assert run.mc is None

    def test_grid_points_times_outer(self):
        run = parse_config(MINIMAL, {"grid": {"times": [0.5, 1.0], "points": [1.0, 2.0]}})
        assert [(p.t, p.x) for p in run.grid_points()] == [(0.5, (1.0,)), (0.5, (2.0,)), (1.0, (1.0,)), (1.0, (2.0,))]

    def test_beta_out_of_range(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(MINIMAL, {"problem": {"beta": 1.5}})
        assert "0<β<1" in _diagnostics(excinfo)["problem.beta"]

    def test_missing_seed(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(MINIMAL, {"methods": ["spectral", "mc"], "mc": {"n": 1000}})
        assert "mc.seed" in _diagnostics(excinfo)

    def test_mc_needs_section(self):
        with pytest.raises(ConfigError, match=r"\[mc\] section"):
            parse_config(MINIMAL, {"methods": ["spectral", "mc"]})

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(MINIMAL + "\n[output]\nformat = 'parquet'\n")
        assert _diagnostics(excinfo)["output.format"] == "unknown key 'format'"

    def test_every_problem_reported(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(MINIMAL, {"problem": {"beta": 2.0}, "mc": {"n": 5}})
        fields = _diagnostics(excinfo)
        assert "problem.beta" in fields
        assert "mc.n" in fields
        assert "mc.seed" in fields

    def test_empty_grid(self):
        with pytest.raises(ConfigError, match="at least one time"):
            parse_config(MINIMAL, {"grid": {"times": [], "points": [1.0]}})

    def test_two_order_selectors(self):
        with pytest.raises(ConfigError, match="exactly one of beta, m, alpha, k"):
            parse_config(MINIMAL, {"problem": {"m": 2}})

    def test_order_selectors(self):
        assert parse_config(MINIMAL, {"problem": {"beta": None, "m": 4}}).problem.order_beta == 0.25
        k_run = parse_config(MINIMAL, {"problem": {"beta": None, "k": 2, "two_sided": True}})
        assert k_run.problem.order_beta == 0.25
        assert k_run.problem.clock().variant == ClockVariant.TWO_SIDED_ITERATED
        alpha_run = parse_config(MINIMAL, {"problem": {"beta": None, "alpha": 1.0}})
        assert alpha_run.problem.order_beta is None
        assert alpha_run.problem.clock() == ClockKind.alpha_stable(1.0)

    def test_two_sided_needs_k(self):
        with pytest.raises(ConfigError, match="two_sided"):
            parse_config(MINIMAL, {"problem": {"two_sided": True}})

    def test_initial_time_only_for_spectral(self):
        assert parse_config(MINIMAL, {"grid": {"times": [0.0, 1.0]}}).grid.times == [0.0, 1.0]
        with pytest.raises(ConfigError, match="positive"):
            parse_config(MINIMAL, {"grid": {"times": [0.0, 1.0]}, "methods": ["spectral", "quadrature"]})

    def test_point_dimension(self):
        with pytest.raises(ConfigError, match="coordinates"):
            parse_config(MINIMAL, {"grid": {"points": [[1.0, 1.0]]}})

    def test_sine_on_box(self):
        with pytest.raises(ConfigError, match="product-sine"):
            parse_config(MINIMAL, {"problem": {"domain": {"kind": "box", "lengths": [1.0, 1.0]}},
                                   "grid": {"points": [[0.5, 0.5]]}})

    def test_subordinate_first_needs_inverse_stable_clock(self):
        overrides = {"problem": {"beta": None, "alpha": 1.0}, "methods": ["mc"],
                     "mc": {"seed": 1, "formulation": "subordinate_first"}}
        with pytest.raises(ConfigError, match="subordinate_first"):
            parse_config(MINIMAL, overrides)

    def test_json_document(self):
        text = json.dumps({"problem": {"k": 1}, "grid": {"times": [1.0], "points": [[1.0]]}})
        run = parse_config(text)
        assert run.problem.clock() == ClockKind.iterated_bm(1)

    def test_malformed_document(self):
        with pytest.raises(ConfigError) as excinfo:
            load_document("[problem\nbeta = 0.5")
        assert excinfo.value.diagnostics[0].field == "<document>"

    def test_overrides_win(self):
        run = parse_config(MINIMAL, {"output": {"prefix": "bench"}, "tolerances": {"spectral": 1e-10}})
        assert run.output.prefix == "bench"
        assert run.tolerances.spectral == 1e-10


class TestCsv:
    def test_format(self):
        field = _field(SolveMethod.SPECTRAL, [0.1], [0.0])
        assert format_fields([field]) == "method,t,x1,u,err\nspectral,1,1,0.10000000000000001,0\n"

    def test_doubles_survive(self):
        values = [1.0 / 3.0, math.pi, -2.5e-300]
        field = _field(SolveMethod.QUADRATURE, values, [1e-9, 2e-9, 3e-9], times=(0.1, 0.2, 0.3), x=(0.7, 1.9))
        parsed = parse_fields(format_fields([field]))[SolveMethod.QUADRATURE]
        assert parsed.values == values
        assert parsed.grid == field.grid

    def test_bad_header(self):
        with pytest.raises(InputError):
            parse_fields("t,x1,u\n1,1,1\n")

    def test_bad_method(self):
        with pytest.raises(InputError, match="line 2"):
            parse_fields("method,t,x1,u,err\nfinite-difference,1,1,1,0\n")

    def test_store_round_trip(self, store):
        field = _field(SolveMethod.MC, [0.42], [0.003])
        path = store.write_field(field)
        assert path.name == "test_mc.csv"
        assert store.read_field(SolveMethod.MC).values == [0.42]
        assert store.read_field(SolveMethod.SPECTRAL) is None


class TestComparison:
    def test_allowed_difference(self):
        allowed = allowed_difference(SolveMethod.SPECTRAL, 1e-12, SolveMethod.MC, 0.01, scale=0.0)
        assert allowed == pytest.approx(1e-12 + MC_STDERR_FACTOR * 0.01)

    def test_pass_and_fail(self):
        spectral = _field(SolveMethod.SPECTRAL, [0.5, 0.5], [1e-12, 1e-12], times=(0.5, 1.0))
        mc = _field(SolveMethod.MC, [0.51, 0.6], [0.005, 0.005], times=(0.5, 1.0))
        pair = compare_fields([spectral, mc]).pairs[0]
        assert [p.passed for p in pair.points] == [True, False]
        assert not pair.passed
        assert pair.max_delta == pytest.approx(0.1)

    def test_grid_mismatch(self):
        with pytest.raises(InputError):
            compare_fields([_field(SolveMethod.SPECTRAL, [0.5], [0.0]),
                            _field(SolveMethod.QUADRATURE, [0.5], [0.0], times=(2.0,))])

    def test_report_json(self):
        fields = [_field(m, [0.5], [1e-9]) for m in (SolveMethod.SPECTRAL, SolveMethod.QUADRATURE, SolveMethod.MC)]
        report = compare_fields(fields, {"order": "beta=0.5"})
        document = json.loads(report.to_json())
        assert document["schema"] == 1
        assert document["passed"] is True
        assert [pair["methods"] for pair in document["pairs"]] == [
            ["spectral", "quadrature"], ["spectral", "mc"], ["quadrature", "mc"]
        ]
        assert document["metadata"] == {"order": "beta=0.5"}
        assert report.to_json().endswith("}\n")
