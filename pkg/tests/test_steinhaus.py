import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinhaus_cert import steinhaus as sh
from steinhaus_cert.errors import ConstructionError, DomainError
from steinhaus_cert.jacobi import JacobiParams, evaluate, l_inf_grid, largest_zero, sup_abs_profile, table
from steinhaus_cert.lp import Verdict
from steinhaus_cert.spaces import Family, SpaceKind, params_of, parse_space

LEGENDRE = JacobiParams(0.0, 0.0)
S2 = SpaceKind(Family.SPHERE, 3)
THEOREM_SPACES = ["s2", "s3", "rp2", "rp3", "cp2", "cp3", "hp2", "op2"]


def bound_by_summing(lam, N):
    """(lam^N + eps (N - 1)) / S, summed term by term."""
    eps = lam ** (N + 1) / ((1 - lam) * (N - 1))
    S = math.fsum([lam**i for i in range(N + 1)]) + eps * (N - 1)
    return (lam**N + eps * (N - 1)) / S


class TestLemmaConstants:
    def test_sphere_closed_form(self, s2_constants):
        c = s2_constants
        assert c.k_star == 3
        assert c.t0 == pytest.approx(1 / math.sqrt(5), abs=1e-12)
        assert c.lam == pytest.approx(1 / math.sqrt(5), abs=1e-12)
        assert 0.35 <= c.lam <= 0.5

    def test_invariants(self, s2_constants):
        c = s2_constants
        assert 0 < c.t0 < 1 and 0 < c.d0 < math.pi / 2
        assert c.d0 == math.acos(c.t0)
        ts = np.linspace(c.t0, 1, 2001)[1:-1]
        vals, _ = l_inf_grid(c.params, ts, c.degree_cap)
        assert np.min(vals) >= -0.5
        assert np.min(vals) >= -c.lam - 1e-12

    @pytest.mark.parametrize("name", THEOREM_SPACES)
    def test_all_spaces(self, name):
        c = sh.find_lemma_constants(params_of(parse_space(name)).jacobi)
        assert 0 < c.lam <= 0.5
        assert c.value_at_t0 >= sh.SAFETY_FLOOR
        assert c.t0 == pytest.approx(largest_zero(c.params.shift(1, 1), c.k_star - 1), abs=1e-12)

    @pytest.mark.parametrize("ab", [(-0.5, -0.5), (0.0, 1.0), (1.0, -0.7)])
    def test_hypotheses(self, ab):
        with pytest.raises(DomainError):
            sh.find_lemma_constants(JacobiParams(*ab))

    def test_failure_diagnostics(self):
        with pytest.raises(ConstructionError, match="below"):
            sh.find_lemma_constants(LEGENDRE, floor=-0.1, scan_limit=20)

    def test_epsilon(self):
        assert sh.epsilon_for(0.4, 1) is None
        assert sh.epsilon_for(0.4, 3) == pytest.approx(0.4**4 / (0.6 * 2))


class TestCorroboration:
    def test_extremum_growth(self, s2_constants):
        rows = sh.extremum_growth(LEGENDRE, s2_constants.k_star, 50)
        assert len(rows) == 50
        assert all(nxt > cur for _, cur, nxt in rows)

    def test_limit(self):
        assert sh.limit_gap(LEGENDRE, 2000) <= 0.02
        assert sh.limit_gap(JacobiParams(1.0, 0.0), 2000) <= 0.02

    def test_last_extremum_is_minimum(self):
        for a, b in [(0.0, 0.0), (1.0, 0.0), (3.0, 1.0)]:
            p = JacobiParams(a, b)
            for k in (3, 10, 40):
                mono, offset = sh.envelope_monotonicity_check(p, k)
                assert mono >= -1e-8
                assert offset <= 1.0 / 4000

    def test_decreasing_segment(self, s2_constants):
        c = s2_constants
        ts = np.linspace(c.t0, 1, 500)[1:-1]
        assert sh.decreasing_segment(c.params, c.k_star, ts)
        assert not sh.decreasing_segment(c.params, c.k_star, [-0.5])


@pytest.fixture(scope="module")
def step():
    return sh.r_of_d(LEGENDRE, TestSpacing.D, TestSpacing.EPS)


class TestSpacing:
    D, EPS = 0.5, 0.01

    def test_basic(self, step):
        assert 0 < step.r < self.D
        assert step.u0 == pytest.approx(math.cos(step.r), abs=0)
        assert step.tail_slope < 0
        assert step.envelope_at_k0 >= self.EPS

    def test_k0_against_grid_sup(self, step):
        # independent scan: max of |P_k| on a dense grid near cos d
        u = math.cos(self.D)
        prof = sup_abs_profile(LEGENDRE, 2 * step.k0, u - 0.01, u, 4000)
        above = np.nonzero(prof >= self.EPS)[0]
        assert above.max() <= step.k0
        assert above.max() >= 0.98 * step.k0

    def test_u0_against_table(self, step):
        # every P_k, k <= k0, stays above 1 - eps on [u0, 1]; the bound is tight
        inside = np.cos(np.linspace(0, step.r * (1 - 1e-6), 40))
        assert np.min(table(LEGENDRE, step.k0, inside)) > 1 - self.EPS
        just_out = math.cos(step.r * (1 + 1e-6))
        assert evaluate(LEGENDRE, step.k0, just_out) <= 1 - self.EPS

    def test_deterministic(self, step):
        assert sh.r_of_d(LEGENDRE, self.D, self.EPS) == step

    def test_eps_monotone(self):
        rs = [sh.r_of_d(LEGENDRE, 0.7, e).r for e in (0.2, 0.1, 0.05, 0.03)]
        assert all(x >= y for x, y in zip(rs, rs[1:]))

    def test_envelope_is_upper_bound(self):
        p = JacobiParams(1.0, 0.0)
        u = math.cos(0.6)
        k0, _, _, _ = sh.envelope_scan(p, u, 0.05, 500)
        grid = np.linspace(0, u, 3001)
        vals = np.max(np.abs(table(p, 2 * k0, grid)), axis=1)
        assert np.all(vals[k0 + 1 :] < 0.05)

    @pytest.mark.parametrize("d,eps", [(0.0, 0.1), (2.0, 0.1), (0.5, 0.0), (0.5, 1.0)])
    def test_domain(self, d, eps):
        with pytest.raises(DomainError):
            sh.r_of_d(LEGENDRE, d, eps)

    def test_scan_limit(self):
        with pytest.raises(ConstructionError):
            sh.r_of_d(LEGENDRE, 0.01, 0.01, max_degree=10_000)


class TestDistances:
    def test_single(self, s2_constants):
        plan = sh.generate_distances(S2, 1, s2_constants)
        assert plan.distances == (0.9 * s2_constants.d0,)
        assert plan.epsilon is None

    def test_triple(self, s2_constants, s2_plan3):
        plan = s2_plan3
        ds = plan.distances
        assert len(ds) == 3 and ds[0] > ds[1] > ds[2] > 0
        for step, nxt in zip(plan.r_trace, ds[1:]):
            assert nxt == step.r
        again = sh.generate_distances(S2, 3, s2_constants)
        assert again == plan

    def test_shrink(self, s2_constants):
        plan = sh.generate_distances(S2, 2, s2_constants, shrink=0.5)
        assert plan.distances[1] == 0.5 * plan.r_trace[0].r

    def test_dimension_one_refused(self, s2_constants):
        with pytest.raises(DomainError):
            sh.generate_distances(SpaceKind(Family.SPHERE, 2), 2, s2_constants)

    def test_mismatched_constants(self, s2_constants):
        with pytest.raises(DomainError):
            sh.generate_distances(parse_space("cp2"), 2, s2_constants)

    @pytest.mark.parametrize("kw", [dict(N=0), dict(start_fraction=1.0), dict(shrink=0.0)])
    def test_bad_arguments(self, s2_constants, kw):
        args = dict(N=2, start_fraction=0.9, shrink=1.0) | kw
        with pytest.raises(DomainError):
            sh.generate_distances(S2, args["N"], s2_constants, args["start_fraction"], shrink=args["shrink"])

    def test_check_spacing(self, s2_constants):
        plan = sh.generate_distances(S2, 2, s2_constants)
        sh.check_spacing(plan.distances, s2_constants, 2)
        with pytest.raises(DomainError):
            sh.check_spacing([plan.distances[0], 2 * plan.distances[1]], s2_constants, 2)
        with pytest.raises(DomainError):
            sh.check_spacing([2.0, 0.1], s2_constants, 2)


class TestCertificate:
    def test_single_distance(self, s2_constants):
        plan = sh.generate_distances(S2, 1, s2_constants)
        cert = sh.build_certificate(plan, s2_constants)
        assert cert.z == (0.5, 1.0)
        assert cert.bound == 0.5
        assert cert.feasibility.verdict is Verdict.FEASIBLE
        assert cert.accepted

    def test_lambda_045_example(self):
        z, S, bound = sh.certificate_vector(0.45, 3)
        assert bound == pytest.approx(0.45**3 * 0.55 + 0.45**4, abs=1e-15)
        assert bound == pytest.approx(0.09113, abs=1e-5)
        assert bound == pytest.approx(bound_by_summing(0.45, 3), abs=1e-14)
        assert z[0] == pytest.approx(bound, abs=1e-15)
        assert sum(z) == pytest.approx(1.0, abs=1e-12)
        assert bound <= 0.125

    @given(lam=st.floats(1e-3, 0.5), N=st.integers(2, 30))
    @settings(max_examples=200, deadline=None)
    def test_bound_algebra(self, lam, N):
        z, S, bound = sh.certificate_vector(lam, N)
        assert bound == pytest.approx(bound_by_summing(lam, N), abs=1e-12)
        assert bound <= 2.0**-N * (1 + 1e-12)
        assert math.fsum(z) == pytest.approx(1.0, abs=1e-12)
        assert S == pytest.approx(sum(lam**i for i in range(N + 1)) + sh.epsilon_for(lam, N) * (N - 1))

    def test_json_fields(self, s2_constants):
        plan = sh.generate_distances(S2, 2, s2_constants)
        cert = sh.build_certificate(plan, s2_constants, k_verify=2000)
        data = cert.to_json()
        for key in ("space", "alpha", "beta", "N", "t0", "d0", "lambda", "epsilon", "distances", "z", "bound",
                    "two_to_minus_N", "feasibility", "caps"):
            assert key in data
        assert set(data["feasibility"]) >= {"k_verify", "min_slack", "verdict"}
        assert data["caps"]["degree_cap"] == 5000 and data["caps"]["grid_size"] == 400

    @pytest.mark.slow
    def test_run_bound_s2(self):
        cert = sh.run_bound(S2, 3, k_verify=5000)
        assert cert.bound <= 0.125
        assert cert.feasibility.min_slack >= -1e-8
        assert cert.decay.min_slack >= -1e-9
        assert cert.accepted


class TestDecayClaim:
    def test_trivial_degree(self, s2_constants):
        plan = sh.generate_distances(S2, 1, s2_constants)
        rep = sh.verify_decay_claim(plan, s2_constants, 0)
        # k = 0, j = 1: 1 + lambda
        assert rep.min_slack == pytest.approx(1 + s2_constants.lam)

    def test_single_distance_bounded_by_lambda(self, s2_constants):
        plan = sh.generate_distances(S2, 1, s2_constants)
        rep = sh.verify_decay_claim(plan, s2_constants, 5000)
        assert rep.holds and rep.argmin_j == 1

    def test_triple(self, s2_constants, s2_plan3):
        rep = sh.verify_decay_claim(s2_plan3, s2_constants, 5000)
        assert rep.min_slack >= -1e-9

    def test_violation_reported(self, s2_constants):
        plan = sh.DistancePlan(S2, 2, (1.0, 0.9), sh.epsilon_for(s2_constants.lam, 2))
        rep = sh.verify_decay_claim(plan, s2_constants, 3000)
        assert not rep.holds
        assert rep.argmin_j == 2
