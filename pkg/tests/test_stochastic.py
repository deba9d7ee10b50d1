import math

import numpy as np
import pytest
from scipy import special

from app.exceptions import ParameterError
from app.schema import ClockKind, DomainSpec
from app.spectral import builtin_initial_condition
from app.stochastic import (
    RngStream,
    RunningMoments,
    clock_draws,
    mc_solve,
    mc_solve_subordinated,
    sample_alpha_clock,
    sample_inverse_stable,
    sample_iterated_bm_clock,
    sample_stable_subordinator,
    sample_two_sided_clock,
    simulate_killed_path,
    simulate_killed_paths,
)
from app.stochastic.clocks import iterated_bm_draws, stable_subordinator_draws, two_sided_draws
from app.utils.enums import ClockVariant


SEED = 20240611
HALF_PI = math.pi / 2


def _ones(x):
    return np.ones(x.shape[0])


class TestRngStream:
    def test_replays(self):
        stream = RngStream(seed=SEED, stream_id=3)
        np.testing.assert_array_equal(stream.generator().random(5), stream.generator().random(5))

    def test_children_are_distinct(self):
        stream = RngStream(seed=SEED)
        first = stream.child(0).generator().random(5)
        second = stream.child(1).generator().random(5)
        assert not np.array_equal(first, second)
        assert not np.array_equal(stream.generator().random(5), first)

    def test_stream_ids_are_distinct(self):
        a = RngStream(seed=SEED, stream_id=0).generator().random(5)
        b = RngStream(seed=SEED, stream_id=1).generator().random(5)
        assert not np.array_equal(a, b)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            RngStream(seed=-1)


class TestClocks:
    def test_stable_laplace_transform(self, rng):
        """E[e^{−D(1)}] = e^{−1}."""
        draws = stable_subordinator_draws(0.7, rng, 200_000)
        assert np.mean(np.exp(-draws)) == pytest.approx(math.exp(-1.0), abs=5e-3)

    def test_half_normal_mean(self, rng):
        """|B(1)| with variance 2 has mean 2/√π."""
        draws = iterated_bm_draws(1, 1.0, rng, 100_000)
        assert draws.mean() == pytest.approx(2.0 / math.sqrt(math.pi), abs=0.012)

    def test_inverse_stable_median(self, rng):
        draws = clock_draws(ClockKind.inverse_stable(0.5), 1.0, rng, 100_000)
        assert np.median(draws) == pytest.approx(2.0 * special.erfinv(0.5), abs=0.02)

    def test_inverse_stable_mean(self, rng):
        """E[E^β(t)] = t^β / Γ(1+β); sd of E^{0.9}(2) is about 0.63."""
        beta, t = 0.9, 2.0
        draws = clock_draws(ClockKind.inverse_stable(beta), t, rng, 100_000)
        assert draws.mean() == pytest.approx(t ** beta / math.gamma(1.0 + beta), abs=0.012)

    def test_cauchy_clock_median(self, rng):
        draws = clock_draws(ClockKind.alpha_stable(1.0), 1.0, rng, 100_000)
        assert np.median(draws) == pytest.approx(1.0, abs=0.03)

    def test_two_sided_sign_balance(self, rng):
        draws = two_sided_draws(2, 1.0, rng, 100_000)
        assert np.mean(draws > 0) == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize("kind", [
        ClockKind.inverse_stable(0.3),
        ClockKind.iterated_bm(2),
        ClockKind.two_sided_iterated(1),
        ClockKind.alpha_stable(1.5),
    ])
    def test_zero_time(self, kind, rng):
        np.testing.assert_array_equal(clock_draws(kind, 0.0, rng, 10), np.zeros(10))

    def test_nonnegative_clocks(self, rng):
        for kind in (ClockKind.inverse_stable(0.6), ClockKind.iterated_bm(3), ClockKind.alpha_stable(0.8)):
            assert np.all(clock_draws(kind, 2.0, rng, 1000) >= 0)

    def test_single_samples(self, rng):
        sample = sample_inverse_stable(0.5, 1.0, rng)
        assert sample.kind.variant == ClockVariant.INVERSE_STABLE
        assert sample.value >= 0
        assert sample_alpha_clock(1.0, 2.0, rng).kind.alpha == 1.0
        assert sample_two_sided_clock(1, 1.0, rng).kind.k == 1
        assert sample_stable_subordinator(0.5, rng) > 0
        iterated = sample_iterated_bm_clock(2, 1.0, rng)
        assert iterated.kind.variant == ClockVariant.ITERATED_BM
        assert iterated.value >= 0

    def test_inverse_stable_sample_needs_positive_time(self, rng):
        with pytest.raises(ParameterError):
            sample_inverse_stable(0.5, 0.0, rng)

    def test_depth_must_be_positive(self, rng):
        with pytest.raises(ParameterError):
            iterated_bm_draws(0, 1.0, rng, 10)


class TestKilledPaths:
    def test_zero_horizon(self, interval, rng):
        path = simulate_killed_path(interval, 1.0, 0.0, 1e-3, rng)
        assert not path.exited
        assert path.position == (1.0,)
        assert path.elapsed == 0.0

    def test_small_box_exits(self, rng):
        domain = DomainSpec.box(0.01, 0.01)
        path = simulate_killed_path(domain, (0.005, 0.005), 10.0, 1e-4, rng)
        assert path.exited
        assert path.elapsed < 10.0

    def test_start_outside(self, interval, rng):
        with pytest.raises(ParameterError):
            simulate_killed_path(interval, 4.0, 1.0, 1e-3, rng)

    def test_negative_horizon(self, interval, rng):
        with pytest.raises(ParameterError):
            simulate_killed_paths(interval, np.array([[1.0]]), np.array([-1.0]), 1e-3, rng)

    def test_survivors_stay_inside(self, square, rng):
        starts = np.tile([1.0, 2.0], (500, 1))
        exited, positions, elapsed = simulate_killed_paths(square, starts, np.full(500, 0.5), 1e-2, rng)
        alive = positions[~exited]
        assert np.all((alive > 0) & (alive < math.pi))
        np.testing.assert_allclose(elapsed[~exited], 0.5)

    @pytest.mark.slow
    def test_survival_probability(self, interval, rng):
        """P(τ > 1) from π/2 is Σ_{n odd} 4/(nπ) sin(nπ/2) e^{−n²}."""
        n = 20_000
        exited, _, _ = simulate_killed_paths(interval, np.full((n, 1), HALF_PI), np.ones(n), 1e-3, rng)
        expected = sum(4.0 / (k * math.pi) * math.sin(k * HALF_PI) * math.exp(-k * k) for k in range(1, 40, 2))
        survived = 1.0 - exited.mean()
        assert abs(survived - expected) <= 4.0 * math.sqrt(expected * (1 - expected) / n) + 3e-3


class TestRunningMoments:
    def test_merge_matches_pooled(self, rng):
        a, b = rng.random(300), rng.random(700)
        merged = RunningMoments.from_values(a).merge(RunningMoments.from_values(b, rejected=2))
        pooled = RunningMoments.from_values(np.concatenate([a, b]))
        assert merged.count == 1000
        assert merged.rejected == 2
        assert merged.mean == pytest.approx(pooled.mean, abs=1e-14)
        assert merged.m2 == pytest.approx(pooled.m2, rel=1e-12)

    def test_empty_side(self):
        part = RunningMoments.from_values(np.array([1.0, 3.0]))
        assert RunningMoments().merge(part).mean == 2.0
        assert math.isinf(RunningMoments(count=1, mean=1.0).stderr)


class TestMonteCarloSolve:
    def test_initial_time_returns_f(self, interval):
        estimate = mc_solve(interval, _ones, ClockKind.inverse_stable(0.5), 0.0, 1.0, n=100, rng=SEED)
        assert estimate.mean == 1.0
        assert estimate.stderr == 0.0

    def test_reproducible_across_thread_counts(self, interval, sine):
        kind = ClockKind.iterated_bm(1)
        single = mc_solve(interval, sine, kind, 0.5, 1.0, n=10_000, h=1e-2, rng=SEED, threads=1)
        pooled = mc_solve(interval, sine, kind, 0.5, 1.0, n=10_000, h=1e-2, rng=SEED, threads=4)
        assert single == pooled

    def test_seed_changes_estimate(self, interval, sine):
        kind = ClockKind.iterated_bm(1)
        first = mc_solve(interval, sine, kind, 0.5, 1.0, n=500, h=1e-2, rng=1)
        second = mc_solve(interval, sine, kind, 0.5, 1.0, n=500, h=1e-2, rng=2)
        assert first.mean != second.mean

    def test_too_few_replicates(self, interval, sine):
        with pytest.raises(ParameterError):
            mc_solve(interval, sine, ClockKind.iterated_bm(1), 1.0, 1.0, n=50)

    def test_start_on_boundary(self, interval, sine):
        with pytest.raises(ParameterError):
            mc_solve(interval, sine, ClockKind.iterated_bm(1), 1.0, 0.0, n=100)

    def test_two_sided_clock(self, interval):
        estimate = mc_solve(interval, _ones, ClockKind.two_sided_iterated(1), 0.2, HALF_PI, n=500, h=1e-2, rng=SEED)
        assert 0.0 < estimate.mean <= 1.0

    @pytest.mark.slow
    def test_half_order_benchmark(self, interval, sine):
        estimate = mc_solve(interval, sine, ClockKind.inverse_stable(0.5), 1.0, HALF_PI, n=20_000, h=1e-3, rng=SEED)
        assert abs(estimate.mean - special.erfcx(1.0)) <= 4.0 * estimate.stderr + 5e-3

    @pytest.mark.slow
    def test_iterated_clock_matches_inverse_stable(self, interval, sine):
        """|B(t)| and E^{1/2}(t) share one law, so both estimate erfcx(√t)."""
        estimate = mc_solve(interval, sine, ClockKind.iterated_bm(1), 1.0, HALF_PI, n=20_000, h=1e-3, rng=SEED)
        assert abs(estimate.mean - special.erfcx(1.0)) <= 4.0 * estimate.stderr + 5e-3

    @pytest.mark.slow
    def test_gaussian_clock(self, interval, sine):
        estimate = mc_solve(interval, sine, ClockKind.alpha_stable(2.0), 1.0, HALF_PI, n=20_000, h=1e-3, rng=SEED)
        assert abs(estimate.mean - special.erfcx(1.0)) <= 4.0 * estimate.stderr + 5e-3

    @pytest.mark.slow
    def test_subordinate_first(self, interval, sine):
        estimate = mc_solve_subordinated(interval, sine, 0.5, 1.0, HALF_PI, n=4000, h=1e-3, rng=SEED)
        assert abs(estimate.mean - special.erfcx(1.0)) <= 4.0 * estimate.stderr + 1e-2

    def test_subordinate_first_needs_positive_time(self, interval, sine):
        with pytest.raises(ParameterError):
            mc_solve_subordinated(interval, sine, 0.5, 0.0, 1.0, n=100)

    def test_step_refinement(self, interval, sine):
        """Estimates at h and h/4 agree within their joint error."""
        kind = ClockKind.inverse_stable(0.5)
        coarse = mc_solve(interval, sine, kind, 0.5, HALF_PI, n=4000, h=1e-2, rng=SEED)
        fine = mc_solve(interval, sine, kind, 0.5, HALF_PI, n=4000, h=2.5e-3, rng=SEED + 1)
        joint = math.hypot(coarse.stderr, fine.stderr)
        assert abs(coarse.mean - fine.mean) <= 4.0 * joint + 5e-3

    @pytest.mark.parametrize("kind", [
        ClockKind.inverse_stable(0.3),
        ClockKind.iterated_bm(2),
        ClockKind.alpha_stable(1.0),
        ClockKind.alpha_stable(1.5),
    ])
    def test_estimate_within_data_bounds(self, interval, kind):
        """0 ≤ u ≤ sup f for f = x(π−x) ≥ 0."""
        ic = builtin_initial_condition("polynomial", interval)
        estimate = mc_solve(interval, ic, kind, 0.4, 1.0, n=400, h=1e-2, rng=SEED)
        assert 0.0 <= estimate.mean <= HALF_PI ** 2

    def test_polynomial_in_box_is_bounded(self, square):
        ic = builtin_initial_condition("polynomial", square)
        estimate = mc_solve(square, ic, ClockKind.inverse_stable(0.7), 0.3, (1.0, 2.0), n=400, h=1e-2, rng=SEED)
        assert 0.0 <= estimate.mean <= (math.pi / 2) ** 4
