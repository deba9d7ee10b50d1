import json

import pytest

from app.cli import build_parser, main, overrides_from
from app.command import CommandFailure, default_commands


RUN_FILE = """
methods = ["spectral"]

[problem]
initial_condition = "sine"
beta = 0.5

[grid]
times = [0.5, 1.0]
points = [[1.5707963267948966]]
"""


@pytest.fixture
def run_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(RUN_FILE, encoding="utf-8")
    return path


def _output_flags(tmp_path, prefix="bench"):
    return ["--output-dir", str(tmp_path / "out"), "--prefix", prefix]


class TestOverrides:
    def test_order_flag_replaces_selector(self):
        args = build_parser().parse_args(["solve", "--m", "3"])
        assert overrides_from(args)["problem"] == {"beta": None, "m": 3, "alpha": None, "k": None}

    def test_nested_keys(self):
        args = build_parser().parse_args(["solve", "--points", "1,2", "--times", "0.5", "--seed", "4",
                                          "--methods", "spectral", "mc"])
        overrides = overrides_from(args)
        assert overrides["grid"] == {"times": [0.5], "points": [[1.0, 2.0]]}
        assert overrides["mc"] == {"seed": 4}
        assert overrides["methods"] == ["spectral", "mc"]
        assert "problem" not in overrides

    def test_bad_point(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["solve", "--points", "1,a"])


class TestEigen:
    def test_interval(self, capsys):
        assert main(["eigen", "--count", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,multi_index,lambda,sup_norm"
        assert lines[1].startswith("1,1,1,")
        assert lines[3].startswith("3,3,9,")

    def test_square(self, capsys):
        side = "3.141592653589793"
        assert main(["eigen", "--domain", "box", "--lengths", side, side, "--count", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert [line.split(",")[1] for line in lines[1:]] == ["1:1", "1:2", "2:1"]

    def test_written_when_output_given(self, tmp_path, capsys):
        assert main(["eigen", "--count", "2", *_output_flags(tmp_path)]) == 0
        assert (tmp_path / "out" / "bench_eigen.csv").exists()


class TestSolve:
    def test_writes_fields_and_report(self, run_file, tmp_path, capsys):
        code = main(["solve", "--config", str(run_file), "--methods", "spectral", "quadrature",
                     *_output_flags(tmp_path)])
        assert code == 0
        out = tmp_path / "out"
        assert (out / "bench_spectral.csv").exists()
        assert (out / "bench_quadrature.csv").exists()
        report = json.loads((out / "bench_report.json").read_text(encoding="utf-8"))
        assert report["passed"] is True
        assert "spectral vs quadrature" in capsys.readouterr().out

    def test_invalid_order(self, run_file, tmp_path, capsys):
        code = main(["solve", "--config", str(run_file), "--beta", "1.5", *_output_flags(tmp_path)])
        assert code == 2
        assert "0<β<1" in capsys.readouterr().err
        assert not (tmp_path / "out").exists()

    def test_missing_run_file(self, tmp_path, capsys):
        assert main(["solve", "--config", str(tmp_path / "absent.toml")]) == 2
        assert "error: --config" in capsys.readouterr().err


class TestVerify:
    def test_half_order_sine(self, run_file, tmp_path):
        assert main(["verify", "--config", str(run_file), *_output_flags(tmp_path)]) == 0
        document = json.loads((tmp_path / "out" / "bench_verify.json").read_text(encoding="utf-8"))
        assert document["passed"] is True
        assert {check["name"] for check in document["checks"]} == {"fractional_residual", "boundary"}


class TestDistTest:
    def test_single_case(self, tmp_path, capsys):
        code = main(["dist-test", "--only", "iterated_1_half_normal", "--n", "5000", "--level", "1e-4",
                     *_output_flags(tmp_path)])
        assert code == 0
        document = json.loads((tmp_path / "out" / "bench_ks.json").read_text(encoding="utf-8"))
        assert [case["name"] for case in document["cases"]] == ["iterated_1_half_normal"]
        assert document["samples"] == 5000

    def test_unknown_case(self):
        with pytest.raises(SystemExit):
            main(["dist-test", "--only", "gaussian"])


class TestCommandCollection:
    def test_unknown_command(self):
        result = default_commands().execute(name="plot")
        assert isinstance(result, CommandFailure)
        assert result.exit_code == 2
        assert not result

    def test_commands_registered(self):
        assert sorted(str(command.name) for command in default_commands()) == ["dist-test", "eigen", "solve", "verify"]
