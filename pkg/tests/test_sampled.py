import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otaprivacy.sampled import (
    ConditionError,
    SampledGmSpec,
    sgm_rdp,
    sgm_rdp_numeric,
    thm1_conditions,
    thm1_rdp,
)

from oracles import renyi_quadrature, renyi_series_mp


def spec(s, sigma):
    return SampledGmSpec(s, sigma)


class TestConditions:
    def test_all_hold_small_rate(self):
        c = thm1_conditions(spec(0.01, 4), 2)
        assert (c.rate_ok, c.noise_ok, c.cond1_ok, c.cond2_ok) == (True, True, True, True)
        assert c.all()

    def test_condition_rhs_values(self):
        # cond1 RHS ~ 34.1 and cond2 RHS ~ 226 at (s=0.01, sigma=4, alpha=2), by hand:
        lt = math.log(101)
        cond1 = 8 * lt - 2 * math.log(4)
        cond2 = (8 * lt**2 - math.log(5) - 2 * math.log(4)) / (lt + math.log(0.02) + 1 / 32)
        assert cond1 == pytest.approx(34.15, abs=0.01)
        assert cond2 == pytest.approx(226.07, abs=0.01)

    def test_rate_too_high(self):
        assert not thm1_conditions(spec(0.5, 4), 2).rate_ok

    def test_noise_too_low(self):
        assert not thm1_conditions(spec(0.01, 1), 2).noise_ok

    def test_large_alpha_breaks_cond1(self):
        assert not thm1_conditions(spec(0.01, 4), 64).cond1_ok

    def test_zero_rate_undefined(self):
        with pytest.raises(ValueError):
            thm1_conditions(spec(0.0, 4), 2)


class TestClosedForm:
    def test_values(self):
        assert thm1_rdp(spec(0.01, 4), 2) == pytest.approx(2.5e-5, rel=1e-14)
        assert thm1_conditions(spec(0.1, 4), 2).all()
        assert thm1_rdp(spec(0.1, 4), 2) == pytest.approx(0.0025, rel=1e-14)

    def test_names_failed_condition(self):
        with pytest.raises(ConditionError) as info:
            thm1_rdp(spec(0.5, 4), 2)
        assert info.value.condition == "rate_ok"
        with pytest.raises(ConditionError, match="noise_ok"):
            thm1_rdp(spec(0.01, 2), 2)


class TestNumeric:
    def test_zero_rate(self):
        for alpha in (2, 17, 64):
            assert sgm_rdp_numeric(spec(0.0, 0.3), alpha) == 0.0

    @pytest.mark.parametrize("alpha", [2, 3, 10, 64])
    @pytest.mark.parametrize("sigma", [0.5, 1, 2, 4])
    def test_full_rate_is_plain_gaussian(self, alpha, sigma):
        assert sgm_rdp_numeric(spec(1.0, sigma), alpha) == pytest.approx(alpha / (2 * sigma**2), rel=1e-9)

    def test_alpha2_closed_form(self):
        expected = math.log1p(0.25 * (math.e - 1))
        assert sgm_rdp_numeric(spec(0.5, 1), 2) == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(0.35737, abs=5e-6)

    @pytest.mark.parametrize("s, sigma, alpha", list(itertools.product([0.01, 0.1, 0.5], [1, 4], [2, 8, 32])))
    def test_matches_quadrature(self, s, sigma, alpha):
        assert sgm_rdp_numeric(spec(s, sigma), alpha) == pytest.approx(renyi_quadrature(s, sigma, alpha), abs=1e-4)

    @pytest.mark.parametrize("s, sigma, alpha", [(0.3, 0.7, 40), (1e-6, 2.0, 5), (0.9, 3.0, 64), (0.02, 0.5, 64)])
    def test_matches_high_precision_series(self, s, sigma, alpha):
        assert sgm_rdp_numeric(spec(s, sigma), alpha) == pytest.approx(renyi_series_mp(s, sigma, alpha), rel=1e-10)

    def test_no_overflow(self):
        val = sgm_rdp_numeric(spec(0.5, 0.5), 64)
        assert math.isfinite(val)
        assert val == pytest.approx(renyi_series_mp(0.5, 0.5, 64), rel=1e-12)

    def test_tiny_rate_not_flushed(self):
        val = sgm_rdp_numeric(spec(1e-13, 1.0), 2)
        assert val > 0
        # alpha = 2: ln(1 + s^2 (e - 1)) ~ s^2 (e - 1)
        assert val == pytest.approx(1e-26 * (math.e - 1), rel=1e-6)

    @pytest.mark.parametrize("alpha", [1, 1.5, 0, 2.5])
    def test_rejects_non_integer_orders(self, alpha):
        with pytest.raises(ValueError):
            sgm_rdp_numeric(spec(0.1, 1), alpha)

    def test_dispatcher(self):
        assert sgm_rdp(spec(0.01, 4), 2) <= 2.5e-5
        assert sgm_rdp(spec(1.0, 1.0), 2) == pytest.approx(1.0, rel=1e-12)
        assert sgm_rdp(spec(0.0, 1.0), 64) == 0.0

    @given(
        s=st.floats(0.0, 1.0),
        ds=st.floats(0.0, 0.5),
        sigma=st.floats(0.5, 8.0),
        dsig=st.floats(0.0, 4.0),
        alpha=st.integers(2, 63),
    )
    @settings(max_examples=200)
    def test_monotone(self, s, ds, sigma, dsig, alpha):
        base = sgm_rdp_numeric(spec(s, sigma), alpha)
        tol = 1e-12 * max(1.0, base)
        assert sgm_rdp_numeric(spec(min(1.0, s + ds), sigma), alpha) >= base - tol
        assert sgm_rdp_numeric(spec(s, sigma), alpha + 1) >= base - tol
        assert sgm_rdp_numeric(spec(s, sigma + dsig), alpha) <= base + tol

    def test_dominated_by_closed_form(self):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 100:
            s, sigma, alpha = rng.uniform(1e-4, 0.2), rng.uniform(4, 20), int(rng.integers(2, 65))
            if thm1_conditions(spec(s, sigma), alpha).all():
                assert sgm_rdp_numeric(spec(s, sigma), alpha) <= thm1_rdp(spec(s, sigma), alpha)
                checked += 1


@pytest.mark.parametrize("s, sigma", [(-0.1, 1), (1.1, 1), (0.5, 0), (0.5, -1)])
def test_spec_validation(s, sigma):
    with pytest.raises(ValueError):
        SampledGmSpec(s, sigma)
