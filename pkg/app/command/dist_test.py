"""Kolmogorov-Smirnov suite for the clock samplers

Every case draws from its own sub-stream of (seed, 0), so a case gives the
same verdict whether it runs alone or with the others.
"""
import json
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy import special

from app.command.base import BaseCommand, CommandResult
from app.config import config
from app.exceptions import ParameterError
from app.io.writer import ResultStore
from app.logger import logger
from app.schema import KSResult
from app.specfun.stable import inverse_stable_density
from app.stochastic.clocks import (
    alpha_clock_draws,
    inverse_stable_draws,
    iterated_bm_draws,
    stable_subordinator_draws,
    two_sided_draws,
)
from app.stochastic.rng import RngStream
from app.utils.enums import CommandName
from app.verification.distribution import ks_distribution_test


DEFAULT_SAMPLES = 50000


def _half_normal_cdf(x):
    """|N(0, 2)|, the law of |B(1)| and of E^{1/2}(1)."""
    return special.erf(np.asarray(x) / 2.0)


def _folded_cauchy_cdf(x):
    return 2.0 / math.pi * np.arctan(np.asarray(x))


def _levy_cdf(x):
    """D(1) for β = 1/2."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, special.erfc(1.0 / (2.0 * np.sqrt(np.maximum(x, 1e-300)))), 0.0)


# Each case: stream -> KSResult
Case = Callable[[RngStream, int], KSResult]


def _generators(stream: RngStream, count: int) -> List[np.random.Generator]:
    return [stream.child(i).generator() for i in range(count)]


def _iterated_half_normal(stream: RngStream, n: int) -> KSResult:
    (g,) = _generators(stream, 1)
    return ks_distribution_test(iterated_bm_draws(1, 1.0, g, n), None, cdf=_half_normal_cdf)


def _inverse_stable_half_normal(stream: RngStream, n: int) -> KSResult:
    (g,) = _generators(stream, 1)
    return ks_distribution_test(inverse_stable_draws(0.5, 1.0, g, n), None, cdf=_half_normal_cdf)


def _iterated_vs_inverse_stable(stream: RngStream, n: int) -> KSResult:
    g_iterated, g_inverse = _generators(stream, 2)
    return ks_distribution_test(iterated_bm_draws(2, 1.0, g_iterated, n), inverse_stable_draws(0.25, 1.0, g_inverse, n))


def _iterated_vs_density(stream: RngStream, n: int) -> KSResult:
    (g,) = _generators(stream, 1)
    return ks_distribution_test(iterated_bm_draws(2, 1.0, g, n), lambda x: inverse_stable_density(0.25, 1.0, x)
                                if x > 0 else 0.0)


def _two_sided_fold(stream: RngStream, n: int) -> KSResult:
    g_two_sided, g_iterated = _generators(stream, 2)
    return ks_distribution_test(np.abs(two_sided_draws(2, 1.0, g_two_sided, n)), iterated_bm_draws(2, 1.0, g_iterated, n))


def _cauchy_clock(stream: RngStream, n: int) -> KSResult:
    (g,) = _generators(stream, 1)
    return ks_distribution_test(alpha_clock_draws(1.0, 1.0, g, n), None, cdf=_folded_cauchy_cdf)


def _stable_levy(stream: RngStream, n: int) -> KSResult:
    (g,) = _generators(stream, 1)
    return ks_distribution_test(stable_subordinator_draws(0.5, g, n), None, cdf=_levy_cdf)


def _self_similarity(stream: RngStream, n: int) -> KSResult:
    g_scaled, g_unit = _generators(stream, 2)
    scaled = inverse_stable_draws(1.0 / 3.0, 2.0, g_scaled, n) / 2.0 ** (1.0 / 3.0)
    return ks_distribution_test(scaled, inverse_stable_draws(1.0 / 3.0, 1.0, g_unit, n))


KS_CASES: Dict[str, Case] = {
    "iterated_1_half_normal": _iterated_half_normal,
    "inverse_stable_half_normal": _inverse_stable_half_normal,
    "iterated_2_vs_inverse_stable": _iterated_vs_inverse_stable,
    "iterated_2_vs_density": _iterated_vs_density,
    "two_sided_fold": _two_sided_fold,
    "cauchy_clock": _cauchy_clock,
    "stable_half_levy": _stable_levy,
    "inverse_stable_self_similarity": _self_similarity,
}


class KSCaseResult(BaseModel):
    name: str
    statistic: float
    p_value: float
    passed: bool


def run_ks_suite(
    n: int = DEFAULT_SAMPLES,
    seed: Optional[int] = None,
    level: Optional[float] = None,
    only: Optional[Sequence[str]] = None,
) -> List[KSCaseResult]:
    """Run the named cases (all by default); a case passes when p > level."""
    level = config.verification.ks_level if level is None else level
    seed = config.montecarlo.seed if seed is None else seed
    names = list(only) if only else list(KS_CASES)
    unknown = [name for name in names if name not in KS_CASES]
    if unknown:
        raise ParameterError(f"unknown KS cases {unknown}; accepted: {', '.join(KS_CASES)}")

    results = []
    for index, name in enumerate(KS_CASES):
        if name not in names:
            continue
        outcome = KS_CASES[name](RngStream(seed=seed).child(index), n)
        results.append(KSCaseResult(name=name, statistic=outcome.statistic, p_value=outcome.p_value,
                                    passed=outcome.p_value > level))
        logger.info(f"KS {name}: D={outcome.statistic:.4f} p={outcome.p_value:.4f}")
    return results


class DistTestCommand(BaseCommand):
    name: str = CommandName.DIST_TEST
    description: str = "Kolmogorov-Smirnov tests of the clock samplers against densities and each other."

    def execute(
        self,
        n: int = DEFAULT_SAMPLES,
        seed: Optional[int] = None,
        level: Optional[float] = None,
        only: Optional[Sequence[str]] = None,
        store: Optional[ResultStore] = None,
        **kwargs,
    ) -> CommandResult:
        level = config.verification.ks_level if level is None else level
        results = run_ks_suite(n, seed, level, only)
        store = store or ResultStore(config.output.directory, config.output.prefix)
        document = {
            "schema": 1,
            "level": level,
            "samples": n,
            "passed": all(r.passed for r in results),
            "cases": [r.model_dump() for r in results],
        }
        path = store.write_text("ks", "json", json.dumps(document, sort_keys=True, indent=2) + "\n")
        lines = [f"{r.name}: D={r.statistic:.4f} p={r.p_value:.4f} {'pass' if r.passed else 'FAIL'}" for r in results]
        lines.append(f"wrote {path}")
        return CommandResult(
            content="\n".join(lines),
            args={"cases": {r.name: r.passed for r in results}, "path": str(path)},
            exit_code=0 if all(r.passed for r in results) else 1,
        )
