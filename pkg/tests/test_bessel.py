import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from steinhaus_cert.bessel import (
    OMEGA_MIN_BOUND,
    OmegaProfile,
    bessel_j,
    claim_b_minimum,
    first_positive_zero,
    jacobi_limit,
    omega,
)
from steinhaus_cert.errors import DomainError

ALPHA_GRID = np.arange(0.0, 8.0 + 1e-9, 0.25)


class TestBesselJ:
    def test_origin(self):
        assert bessel_j(0, 0) == 1.0
        assert bessel_j(2.5, 0) == 0.0

    def test_value_at_j1(self):
        j1 = first_positive_zero(1).value
        assert bessel_j(0, j1) == pytest.approx(-0.402759, abs=1e-6)

    # scipy's jv flushes (t/2)^nu to zero for subnormal t, so the oracle
    # range starts at 1e-12; the leading-term test covers smaller t.
    @given(nu=st.floats(0.0, 10.0), t=st.one_of(st.just(0.0), st.floats(1e-12, 50.0)))
    @settings(max_examples=400, deadline=None)
    def test_matches_scipy(self, nu, t):
        assert abs(bessel_j(nu, t) - special.jv(nu, t)) <= 1e-10

    def test_leading_term_for_tiny_t(self):
        for nu, t in [(0.03125, 1e-300), (0.5, 1e-20), (2.0, 1e-8)]:
            lead = math.exp(nu * math.log(t / 2) - math.lgamma(nu + 1))
            assert bessel_j(nu, t) == pytest.approx(lead, rel=1e-12)

    def test_series_and_miller_agree_at_switch(self):
        for nu in (0.0, 1.5, 6.0, 11.0):
            below = bessel_j(nu, 12.0)
            above = bessel_j(nu, 12.0 + 1e-9)
            assert above == pytest.approx(below, abs=1e-8)

    def test_three_term_recurrence(self):
        for nu in np.linspace(1.0, 9.0, 17):
            for t in np.linspace(0.1, 30.0, 60):
                lhs = bessel_j(nu - 1, t) + bessel_j(nu + 1, t)
                assert lhs == pytest.approx(2 * nu / t * bessel_j(nu, t), abs=1e-9)

    @pytest.mark.parametrize("nu,t", [(-0.1, 1.0), (13.0, 1.0), (1.0, -0.5), (1.0, 61.0)])
    def test_domain(self, nu, t):
        with pytest.raises(DomainError):
            bessel_j(nu, t)


class TestZeros:
    def test_j1(self):
        z = first_positive_zero(1)
        assert z.value == pytest.approx(3.8317, abs=1e-3)
        assert abs(z.residual) <= 1e-10

    def test_j0(self):
        assert first_positive_zero(0).value == pytest.approx(2.404825557695773, abs=1e-11)

    def test_scipy_zeros(self):
        for n in range(0, 11):
            assert first_positive_zero(n).value == pytest.approx(special.jn_zeros(n, 1)[0], abs=1e-11)

    def test_increasing(self):
        vals = [first_positive_zero(a).value for a in ALPHA_GRID]
        assert all(x < y for x, y in zip(vals, vals[1:]))

    def test_no_earlier_sign_change(self):
        for nu in (0.0, 2.5, 9.0):
            z = first_positive_zero(nu).value
            ts = np.linspace(1e-6, z * (1 - 1e-9), 5000)
            assert np.all(special.jv(nu, ts) > 0)


class TestOmega:
    def test_alpha_zero_is_j0(self):
        assert omega(0, 1.0) == pytest.approx(bessel_j(0, 1.0), abs=1e-15)

    def test_alpha_one_at_j2(self):
        j2 = first_positive_zero(2).value
        assert omega(1, j2) == pytest.approx(2 / j2 * bessel_j(1, j2), abs=1e-14)

    def test_limit_at_alpha_zero(self):
        assert jacobi_limit(0.0) == pytest.approx(-0.402759, abs=1e-6)

    def test_omega_near_zero_tends_to_one(self):
        for a in (0.0, 1.0, 3.5):
            assert omega(a, 1e-6) == pytest.approx(1.0, abs=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            omega(-1.0, 1.0)
        with pytest.raises(DomainError):
            omega(1.0, 0.0)


class TestOmegaMinimum:
    def test_alpha_zero(self):
        prof = claim_b_minimum(0.0)
        assert prof.min_value == pytest.approx(-0.402759, abs=1e-6)
        assert prof.holds

    def test_alpha_one_not_below_alpha_zero(self):
        assert claim_b_minimum(1.0).min_value >= claim_b_minimum(0.0).min_value

    def test_alpha_five_vs_fine_grid(self):
        prof = claim_b_minimum(5.0)
        ts = np.linspace(1e-3, 30.0, 300001)
        fine = np.min(math.gamma(6.0) * (2 / ts) ** 5 * special.jv(5, ts))
        assert prof.min_value == pytest.approx(fine, abs=1e-9)
        assert prof.min_value >= OMEGA_MIN_BOUND

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_sweep(self, alpha):
        prof = claim_b_minimum(alpha)
        assert prof.min_value >= OMEGA_MIN_BOUND
        assert prof.min_value < 0
        assert abs(prof.min_location - first_positive_zero(alpha + 1).value) <= 1e-8
        assert prof.min_value <= prof.grid_min_value

    def test_value_at_next_zero_monotone(self):
        vals = [bessel_j(a, first_positive_zero(a + 1).value) for a in ALPHA_GRID]
        assert all(x <= y for x, y in zip(vals, vals[1:]))

    def test_holds_flag(self):
        assert not OmegaProfile(0.0, 1.0, -0.5, -0.5).holds
