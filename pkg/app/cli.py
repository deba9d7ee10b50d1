"""Command-line interface

    fraccauchy solve     --config run.toml [overrides]
    fraccauchy verify    --config run.toml [overrides]
    fraccauchy dist-test [--n 50000] [--seed 7] [--only CASE ...]
    fraccauchy eigen     [--config run.toml | --domain box --lengths 1 2] [--count 16]

Flags mirror run-file keys and win over the file.
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.command import default_commands
from app.command.base import CommandFailure, CommandResult
from app.command.dist_test import DEFAULT_SAMPLES, KS_CASES
from app.config import config
from app.exceptions import ConfigDiagnostic, ConfigError
from app.io.run_config import DomainConfig, parse_config
from app.io.writer import ResultStore
from app.utils.enums import CommandName, DomainKind, InitialConditionName, SolveMethod


_ORDER_KEYS = ("beta", "m", "alpha", "k")


def _point(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"point {text!r} is not a comma-separated list of numbers") from e


def _add_problem_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML or JSON run file")
    group = parser.add_argument_group("problem")
    group.add_argument("--domain", choices=[str(DomainKind.INTERVAL), str(DomainKind.BOX)])
    group.add_argument("--lengths", type=float, nargs="+", metavar="L")
    group.add_argument("--initial-condition", choices=[str(n) for n in InitialConditionName])
    group.add_argument("--beta", type=float)
    group.add_argument("--m", type=int)
    group.add_argument("--alpha", type=float)
    group.add_argument("--k", type=int)
    group.add_argument("--two-sided", action="store_true", default=None)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    _add_problem_flags(parser)
    grid = parser.add_argument_group("grid")
    grid.add_argument("--times", type=float, nargs="+", metavar="T")
    grid.add_argument("--points", type=_point, nargs="+", metavar="X1[,X2..]")
    parser.add_argument("--methods", nargs="+", choices=[str(m) for m in SolveMethod])
    mc = parser.add_argument_group("mc")
    mc.add_argument("--n", type=int)
    mc.add_argument("--h", type=float)
    mc.add_argument("--seed", type=int)
    mc.add_argument("--formulation", choices=["kill_first", "subordinate_first"])
    tolerances = parser.add_argument_group("tolerances")
    tolerances.add_argument("--spectral-tol", type=float)
    tolerances.add_argument("--quadrature-tol", type=float)
    _add_output_flags(parser)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    output = parser.add_argument_group("output")
    output.add_argument("--output-dir")
    output.add_argument("--prefix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraccauchy", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(commands.add_parser(str(CommandName.SOLVE), help="solve with the selected methods"))
    _add_run_flags(commands.add_parser(str(CommandName.VERIFY), help="residual and boundary checks"))

    dist = commands.add_parser(str(CommandName.DIST_TEST), help="KS tests of the clock samplers")
    dist.add_argument("--n", type=int, default=DEFAULT_SAMPLES)
    dist.add_argument("--seed", type=int)
    dist.add_argument("--level", type=float)
    dist.add_argument("--only", nargs="+", choices=list(KS_CASES))
    _add_output_flags(dist)

    eigen = commands.add_parser(str(CommandName.EIGEN), help="dump Dirichlet eigenpairs")
    _add_problem_flags(eigen)
    eigen.add_argument("--count", type=int, default=16)
    _add_output_flags(eigen)
    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    """Nested run-file keys for every flag that was given."""
    overrides: Dict[str, Any] = {}

    def put(path: str, value: Any) -> None:
        if value is None:
            return
        *parents, leaf = path.split(".")
        node = overrides
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value

    given_order = [key for key in _ORDER_KEYS if getattr(args, key, None) is not None]
    if given_order:
        # One order flag replaces whatever selector the file holds
        overrides.setdefault("problem", {}).update({key: getattr(args, key) for key in _ORDER_KEYS})

    put("problem.domain.kind", getattr(args, "domain", None))
    put("problem.domain.lengths", getattr(args, "lengths", None))
    put("problem.initial_condition", getattr(args, "initial_condition", None))
    put("problem.two_sided", getattr(args, "two_sided", None))
    put("grid.times", getattr(args, "times", None))
    put("grid.points", getattr(args, "points", None))
    put("methods", getattr(args, "methods", None))
    put("mc.n", getattr(args, "n", None))
    put("mc.h", getattr(args, "h", None))
    put("mc.seed", getattr(args, "seed", None))
    put("mc.formulation", getattr(args, "formulation", None))
    put("tolerances.spectral", getattr(args, "spectral_tol", None))
    put("tolerances.quadrature", getattr(args, "quadrature_tol", None))
    put("output.directory", getattr(args, "output_dir", None))
    put("output.prefix", getattr(args, "prefix", None))
    return overrides


def _read_config(args: argparse.Namespace) -> str:
    if args.config is None:
        return ""
    try:
        return args.config.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([ConfigDiagnostic("--config", str(e))]) from e


def _store(args: argparse.Namespace) -> ResultStore:
    return ResultStore(args.output_dir or config.output.directory, args.prefix or config.output.prefix)


def _command_input(args: argparse.Namespace) -> Dict[str, Any]:
    if args.command in (str(CommandName.SOLVE), str(CommandName.VERIFY)):
        run_config = parse_config(_read_config(args), overrides_from(args))
        return {"run_config": run_config}
    if args.command == str(CommandName.DIST_TEST):
        return {"n": args.n, "seed": args.seed, "level": args.level, "only": args.only, "store": _store(args)}

    # eigen: a run file's domain, or the domain flags alone
    if args.config is not None:
        document = parse_config(_read_config(args), overrides_from(args))
        domain = document.domain()
    else:
        problem = overrides_from(args).get("problem", {})
        try:
            domain = DomainConfig(**problem.get("domain", {})).build()
        except ValueError as e:
            raise ConfigError([ConfigDiagnostic("problem.domain", str(e))]) from e
    store = _store(args) if args.output_dir or args.prefix else None
    return {"domain": domain, "count": args.count, "store": store}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    commands = default_commands()
    try:
        result = commands.execute(name=args.command, command_input=_command_input(args))
    except ConfigError as e:
        result = CommandFailure(error=e.message, args={"diagnostics": [str(d) for d in e.diagnostics]})
    _print(result)
    return result.exit_code


def _print(result: CommandResult) -> None:
    if result.content:
        print(result.content)
    if result.error:
        for line in result.args.get("diagnostics") or [result.error]:
            print(f"error: {line}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
