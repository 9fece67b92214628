import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otaprivacy.accountant import AccountantConfig, act_sweep, epsilon_at, per_step_curve, sweep
from otaprivacy.mechanisms import RdpCurve
from otaprivacy.sampled import SampledGmSpec

from oracles import best_epsilon_mp, renyi_series_mp

DELTA = 1e-5


def gm_curve(lo=2, hi=64):
    return per_step_curve(SampledGmSpec(1.0, 1.0), lo, hi)


class TestPerStepCurve:
    def test_plain_gaussian(self):
        c = per_step_curve(SampledGmSpec(1.0, 1.0), 2, 4)
        assert c.orders == (2, 3, 4)
        np.testing.assert_allclose(c.epsilons, [1.0, 1.5, 2.0], rtol=1e-12)

    def test_no_sampling_is_free(self):
        assert per_step_curve(SampledGmSpec(0.0, 1.0), 2, 64).epsilons == (0.0,) * 63

    def test_single_order(self):
        c = per_step_curve(SampledGmSpec(0.5, 1.0), 2, 2)
        assert c.epsilons[0] == pytest.approx(0.35737, abs=5e-6)

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            per_step_curve(SampledGmSpec(0.5, 1.0), 5, 4)
        with pytest.raises(ValueError):
            per_step_curve(SampledGmSpec(0.5, 1.0), 1, 4)


class TestEpsilonAt:
    def test_single_step_gaussian(self):
        eps, alpha = epsilon_at(gm_curve(), 1, DELTA)
        assert alpha == 6
        assert eps == pytest.approx(3 + math.log(1e5) / 5, rel=1e-12)

    def test_zero_curve_takes_largest_order(self):
        eps, alpha = epsilon_at(RdpCurve.constant(0.0), 100, math.exp(-1))
        assert alpha == 64
        assert eps == pytest.approx(1 / 63, rel=1e-12)

    def test_long_horizon_gaussian(self):
        eps, alpha = epsilon_at(gm_curve(), 100, DELTA)
        assert alpha == 2
        assert eps == pytest.approx(100 + math.log(1e5), rel=1e-12)
        # order 3 would give 150 + ln(1e5)/2
        assert eps < 150 + math.log(1e5) / 2

    def test_ties_go_to_smaller_order(self):
        # t * eps(a) + 1/(a-1) with delta = e^-1 equal at a=2 and a=3
        curve = RdpCurve((2, 3), (0.5, 1.0))
        eps, alpha = epsilon_at(curve, 1, math.exp(-1))
        assert alpha == 2
        assert eps == pytest.approx(1.5)

    @pytest.mark.parametrize("s, sigma", [(1.0, 1.0), (0.5, 1.0), (0.05, 1.0), (0.01, 2.0)])
    @pytest.mark.parametrize("t", [1, 7, 100, 1000])
    def test_matches_brute_force(self, s, sigma, t):
        orders = list(range(2, 65))
        exact = [renyi_series_mp(s, sigma, a) for a in orders]
        want_eps, want_alpha = best_epsilon_mp(exact, t, DELTA, orders)
        eps, alpha = epsilon_at(per_step_curve(SampledGmSpec(s, sigma)), t, DELTA)
        assert alpha == want_alpha
        assert eps == pytest.approx(want_eps, rel=1e-10)

    @given(lo=st.integers(2, 30), hi=st.integers(30, 64), extra_lo=st.integers(0, 10), extra_hi=st.integers(0, 40))
    @settings(max_examples=30, deadline=None)
    def test_grid_refinement_never_hurts(self, lo, hi, extra_lo, extra_hi):
        spec = SampledGmSpec(0.1, 1.5)
        narrow = epsilon_at(per_step_curve(spec, lo, hi), 50, DELTA)[0]
        wide = epsilon_at(per_step_curve(spec, max(2, lo - extra_lo), hi + extra_hi), 50, DELTA)[0]
        assert wide <= narrow


class TestSweep:
    def test_zero_rate_is_conversion_floor(self):
        curve = sweep(AccountantConfig(0.0, 1.0, DELTA, t_max=50))
        np.testing.assert_array_equal(curve.epsilons, math.log(1e5) / 63)
        assert {r.alpha_star for r in curve.rows} == {64}

    def test_full_rate_exceeds_100(self):
        curve = sweep(AccountantConfig(1.0, 1.0, DELTA, t_max=300))
        assert curve.epsilon(300) > 100

    def test_small_rate_below_half(self):
        small = sweep(AccountantConfig(0.01, 1.0, DELTA, t_max=1000)).epsilons
        half = sweep(AccountantConfig(0.5, 1.0, DELTA, t_max=1000)).epsilons
        assert np.all(small < half)

    @pytest.mark.parametrize("s", [0.0, 0.01, 0.3, 1.0])
    def test_nondecreasing_in_t(self, s):
        eps = sweep(AccountantConfig(s, 1.0, DELTA, t_max=400)).epsilons
        assert np.all(np.diff(eps) >= 0)

    def test_rows_use_epsilon_at(self):
        cfg = AccountantConfig(0.1, 2.0, 1e-6, alpha_min=3, alpha_max=20, t_max=30)
        curve = sweep(cfg)
        step = per_step_curve(cfg.spec, 3, 20)
        for row in curve.rows:
            assert (row.epsilon, row.alpha_star) == epsilon_at(step, row.t, 1e-6)
            assert 3 <= row.alpha_star <= 20

    def test_ordering_by_rate(self):
        rates = [0.01, 0.05, 0.1, 0.5, 1.0]
        curves = [sweep(AccountantConfig(s, 1.0, DELTA, t_max=1000)).epsilons for s in rates]
        for lo, hi in zip(curves, curves[1:]):
            assert np.all(lo <= hi)

    def test_deterministic(self):
        cfg = AccountantConfig(0.05, 1.3, DELTA, t_max=200)
        assert sweep(cfg) == sweep(cfg)


class TestActSweep:
    def test_single_step_not_better_than_gaussian(self):
        from otaprivacy.mechanisms import GaussianMechanismSpec, gm_dp_epsilon

        curve = act_sweep(AccountantConfig(1.0, 1.0, DELTA, t_max=1))
        assert curve.epsilon(1) >= gm_dp_epsilon(GaussianMechanismSpec(1.0, 1.0), DELTA / 2)

    def test_worse_than_rdp(self):
        cfg = AccountantConfig(1.0, 1.0, DELTA, t_max=1000)
        assert np.all(act_sweep(cfg).epsilons >= sweep(cfg).epsilons)

    def test_vanishes_without_privacy_loss(self):
        eps = [act_sweep(AccountantConfig(1.0, sigma, DELTA, t_max=10)).epsilon(10) for sigma in (1e2, 1e4, 1e6)]
        assert eps[0] > eps[1] > eps[2]
        assert eps[2] < 1e-3

    def test_requires_full_rate(self):
        with pytest.raises(ValueError):
            act_sweep(AccountantConfig(0.5, 1.0, DELTA, t_max=10))

    def test_records_delta_split(self):
        curve = act_sweep(AccountantConfig(1.0, 1.0, DELTA, t_max=3))
        assert curve.method == "act"
        assert set(curve.metadata) == {"delta_step", "delta_slack"}
        assert all(r.alpha_star is None for r in curve.rows)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(delta=0.0),
        dict(delta=1.0),
        dict(alpha_min=1),
        dict(alpha_min=10, alpha_max=9),
        dict(t_max=0),
        dict(sampling_rate=1.5),
        dict(noise_multiplier=0.0),
    ],
)
def test_config_validation(kwargs):
    base = dict(sampling_rate=0.1, noise_multiplier=1.0, delta=DELTA, alpha_min=2, alpha_max=64, t_max=10)
    base.update(kwargs)
    with pytest.raises(ValueError):
        AccountantConfig(**base)
