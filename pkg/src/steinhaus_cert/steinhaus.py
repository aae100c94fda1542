"""Constructive density bound m_{d_1..d_N}(M) <= 2^-N with explicit dual certificates.

Pipeline:

1. ``find_lemma_constants``: pick a degree k_star whose last interior
   extremum t0 (largest zero of P^{(a+1,b+1)}_{k_star-1}) gives
   l(t) >= -1/2 on [t0, 1); set d0 = arccos t0 and lambda = |inf l|.
2. ``r_of_d``: the spacing function.  For k > k0 every |P_k| is below eps
   on [0, cos d]; for k <= k0 every P_k stays above 1 - eps on [cos r, 1].
3. ``generate_distances``: d_1 = start_fraction * d0, d_{i+1} = r(d_i).
4. ``build_certificate``: the explicit dual vector z and its objective.
5. ``verify_decay_claim``: the partial-sum inequality that makes z feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bessel
from .errors import ConstructionError, DomainError
from .jacobi import (
    JacobiParams,
    _eval,
    derivative_factor,
    evaluate_at_angle,
    l_inf_grid,
    largest_zero,
    table,
)
from .lp import FeasibilityReport, Verdict, build_truncation, jacobi_columns, verify_dual
from .spaces import SpaceKind, min_alpha_for_theorem, params_of

SAFETY_FLOOR = -0.48


@dataclass(frozen=True)
class LemmaConstants:
    params: JacobiParams
    t0: float
    d0: float
    lam: float
    k_star: int
    degree_cap: int
    grid_size: int
    value_at_t0: float
    max_attained_degree: int
    extremum_window: int

    def to_json(self) -> dict:
        return {
            "t0": self.t0,
            "d0": self.d0,
            "lambda": self.lam,
            "k_star": self.k_star,
            "value_at_t0": self.value_at_t0,
            "degree_cap": self.degree_cap,
            "grid_size": self.grid_size,
            "max_attained_degree": self.max_attained_degree,
            "extremum_window": self.extremum_window,
        }


@dataclass(frozen=True)
class SpacingStep:
    """One evaluation of the spacing function r at distance d."""

    d: float
    eps: float
    k0: int
    u0: float
    r: float
    scanned_to: int
    cap_limited: bool
    tail_slope: float
    envelope_at_k0: float

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "k0": self.k0,
            "u0": self.u0,
            "r": self.r,
            "scanned_to": self.scanned_to,
            "cap_limited": self.cap_limited,
            "tail_slope": self.tail_slope,
        }


@dataclass(frozen=True)
class DistancePlan:
    space: SpaceKind
    N: int
    distances: tuple[float, ...]
    epsilon: Optional[float]
    r_trace: tuple[SpacingStep, ...] = ()
    start_fraction: float = 0.9
    shrink: float = 1.0


@dataclass(frozen=True)
class DecayReport:
    min_slack: float
    argmin_j: int
    argmin_k: int
    k_max: int
    tolerance: float

    @property
    def holds(self) -> bool:
        return self.min_slack >= -self.tolerance


@dataclass(frozen=True)
class BoundCertificate:
    plan: DistancePlan
    constants: LemmaConstants
    z: tuple[float, ...]
    S: Optional[float]
    bound: float
    feasibility: FeasibilityReport
    decay: Optional[DecayReport] = field(default=None)

    @property
    def two_to_minus_n(self) -> float:
        return 2.0 ** (-self.plan.N)

    @property
    def bound_ok(self) -> bool:
        return self.bound <= self.two_to_minus_n

    @property
    def accepted(self) -> bool:
        decay_ok = self.decay is None or self.decay.holds
        return self.bound_ok and self.feasibility.verdict is not Verdict.VIOLATED and decay_ok

    def to_json(self) -> dict:
        c = self.constants
        out = {
            "space": self.plan.space.name,
            "alpha": c.params.alpha,
            "beta": c.params.beta,
            "N": self.plan.N,
            "t0": c.t0,
            "d0": c.d0,
            "lambda": c.lam,
            "epsilon": self.plan.epsilon,
            "distances": list(self.plan.distances),
            "z": list(self.z),
            "S": self.S,
            "bound": self.bound,
            "two_to_minus_N": self.two_to_minus_n,
            "feasibility": self.feasibility.to_json(),
            "caps": {
                **c.to_json(),
                "k_verify": self.feasibility.checked_up_to,
                "start_fraction": self.plan.start_fraction,
                "shrink": self.plan.shrink,
            },
            "r_trace": [s.to_json() for s in self.plan.r_trace],
        }
        if self.decay is not None:
            out["decay_claim"] = {
                "k_max": self.decay.k_max,
                "min_slack": self.decay.min_slack,
                "argmin_j": self.decay.argmin_j,
                "argmin_k": self.decay.argmin_k,
                "holds": self.decay.holds,
            }
        out["accepted"] = self.accepted
        return out


def check_lemma_hypotheses(params: JacobiParams) -> None:
    a, b = params.alpha, params.beta
    if not (a >= 0.0 and b >= -0.5 and a >= b):
        raise DomainError(f"need alpha >= 0, beta >= -1/2 and alpha >= beta; got ({a}, {b})")


# ---------------------------------------------------------------------------
# numeric corroboration of the facts the lemma rests on
# ---------------------------------------------------------------------------


class _ZeroChain:
    """Largest zeros of P^{(a+1,b+1)}_j, computed lazily via interlacing."""

    def __init__(self, params: JacobiParams):
        self.shifted = params.shift(1, 1)
        self.zeros = [None, largest_zero(self.shifted, 1)]

    def __getitem__(self, j: int) -> float:
        while len(self.zeros) <= j:
            n = len(self.zeros)
            self.zeros.append(largest_zero(self.shifted, n, lower=self.zeros[-1]))
        return self.zeros[j]


def last_extremum_value(params: JacobiParams, k: int, zeros: Optional[_ZeroChain] = None) -> float:
    """P_k at the largest zero of P^{(a+1,b+1)}_{k-1}, k >= 2."""
    t = zeros[k - 1] if zeros is not None else largest_zero(params.shift(1, 1), k - 1)
    return float(_eval(params, k, t))


def extremum_growth(params: JacobiParams, k_start: int, count: int, zeros: Optional[_ZeroChain] = None) -> list[tuple[int, float, float]]:
    """(k, P_k(t_{k-1}), P_{k+1}(t_k)) for k = k_start..k_start+count-1.

    The last-extremum values should increase with k for large k.
    """
    zeros = zeros or _ZeroChain(params)
    rows = []
    prev = last_extremum_value(params, k_start, zeros)
    for k in range(k_start, k_start + count):
        nxt = last_extremum_value(params, k + 1, zeros)
        rows.append((k, prev, nxt))
        prev = nxt
    return rows


def limit_gap(params: JacobiParams, k: int) -> float:
    """|P_k(t_{k-1}) - Omega_alpha(j_{alpha+1})|."""
    return abs(last_extremum_value(params, k) - bessel.jacobi_limit(params.alpha))


def envelope_monotonicity_check(params: JacobiParams, k: int, grid_size: int = 4001) -> tuple[float, float]:
    """Return (min finite difference of g on [0, 1], |argmin_[0,1] P_k - t_{k-1}|)."""
    u = np.linspace(0.0, 1.0, grid_size)
    p = _eval(params, k, u)
    dp = derivative_factor(params, k) * _eval(params.shift(1, 1), k - 1, u)
    g = p * p + (1 - u * u) * dp * dp / (k * (k + params.alpha + params.beta + 1))
    i = int(np.argmin(p))
    t = largest_zero(params.shift(1, 1), k - 1)
    return float(np.min(np.diff(g))), abs(float(u[i]) - t)


def decreasing_segment(params: JacobiParams, k: int, ts: Sequence[float]) -> bool:
    """True iff P_0(t) > P_1(t) > ... > P_k(t) at every t in ``ts``."""
    vals = table(params, k, np.asarray(ts, dtype=float))
    return bool(np.all(np.diff(vals, axis=0) < 0))


# ---------------------------------------------------------------------------
# lemma constants
# ---------------------------------------------------------------------------


def find_lemma_constants(
    params: JacobiParams,
    degree_cap: int = 5000,
    grid_size: int = 400,
    *,
    floor: float = SAFETY_FLOOR,
    extremum_window: int = 50,
    scan_limit: int = 400,
) -> LemmaConstants:
    """Smallest k_star passing: t0 > 0, P_k(t0) >= floor, growth of the
    last-extremum values over ``extremum_window`` degrees, and
    l(t) >= -1/2 on a grid over [t0, 1) (degrees up to ``degree_cap``)."""
    check_lemma_hypotheses(params)
    zeros = _ZeroChain(params)
    best_failure = None
    for k in range(2, scan_limit + 1):
        t0 = zeros[k - 1]
        if t0 <= 0.0:
            best_failure = (k, "largest extremum not positive", t0)
            continue
        at_t0 = float(_eval(params, k, t0))
        if at_t0 < floor:
            best_failure = (k, f"P_k(t0) = {at_t0:.6f} below {floor}", t0)
            continue
        growth = extremum_growth(params, k, extremum_window, zeros)
        bad = [row for row in growth if not row[2] > row[1]]
        if bad:
            best_failure = (k, f"last-extremum values not increasing at k = {bad[0][0]}", t0)
            continue
        ts = t0 + (1.0 - t0) * np.arange(grid_size) / grid_size
        lvals, where = l_inf_grid(params, ts, degree_cap)
        if np.min(lvals) < -0.5:
            best_failure = (k, f"l(t) = {np.min(lvals):.6f} < -1/2 on the grid", t0)
            continue
        lam = abs(float(np.min(lvals)))
        return LemmaConstants(
            params=params,
            t0=t0,
            d0=math.acos(t0),
            lam=lam,
            k_star=k,
            degree_cap=degree_cap,
            grid_size=grid_size,
            value_at_t0=at_t0,
            max_attained_degree=int(np.max(where)),
            extremum_window=extremum_window,
        )
    raise ConstructionError(f"no admissible degree up to {scan_limit}; last candidate: {best_failure}")


def epsilon_for(lam: float, N: int) -> Optional[float]:
    if N <= 1:
        return None
    return lam ** (N + 1) / ((1 - lam) * (N - 1))


# ---------------------------------------------------------------------------
# spacing function
# ---------------------------------------------------------------------------


def envelope_scan(
    params: JacobiParams,
    u: float,
    eps: float,
    degree_cap: int,
    *,
    clearance: float = 2.0,
    max_degree: int = 10_000_000,
) -> tuple[int, int, float, float]:
    """Scan E_k = sqrt(g_k(u)) >= max_{[0,u]} |P_k| over k.

    Stops once degree_cap is passed and no degree in (k0, clearance*(k0+1)]
    has E_k >= eps, where k0 is the last degree seen with E_k >= eps.
    Returns (k0, scanned_to, tail log-log slope, E_{k0}).
    """
    a, b = params.alpha, params.beta
    s = a + b
    # P_k^{(a,b)} and Q_{k-1} = P_{k-1}^{(a+1,b+1)} in lockstep
    p_prev, p = 1.0, ((s + 2) * u + (a - b)) / (2 * (a + 1))
    q_prev, q = 0.0, 1.0
    a1, b1, s1 = a + 1, b + 1, s + 2
    w = (1.0 - u * u) / (4 * (a + 1) ** 2)
    k0, env_k0 = 0, 1.0
    samples = []
    next_sample = 1.0
    k = 1
    while True:
        env = math.sqrt(p * p + w * k * (k + s + 1) * q * q)
        if env >= eps:
            k0, env_k0 = k, env
        if k >= next_sample:
            samples.append((k, env))
            next_sample = k * 1.01 + 1
        if k >= degree_cap and k >= clearance * (k0 + 1):
            break
        if k >= max_degree:
            raise ConstructionError(
                f"envelope still >= eps = {eps:.3e} at degree {k0} (scan limit {max_degree})"
            )
        k += 1
        A = (2 * k + s - 1) * (2 * k + s) / (2 * (k + s) * (k + a))
        B = (2 * k + s - 1) * (a * a - b * b) / (2 * (k + s) * (2 * k + s - 2) * (k + a))
        C = (k - 1) * (k + b - 1) * (2 * k + s) / ((k + s) * (2 * k + s - 2) * (k + a))
        p_prev, p = p, (A * u + B) * p - C * p_prev
        j = k - 1  # degree of the new q
        if j == 1:
            q_prev, q = q, ((s1 + 2) * u + (a1 - b1)) / (2 * (a1 + 1))
        else:
            A = (2 * j + s1 - 1) * (2 * j + s1) / (2 * (j + s1) * (j + a1))
            B = (2 * j + s1 - 1) * (a1 * a1 - b1 * b1) / (2 * (j + s1) * (2 * j + s1 - 2) * (j + a1))
            C = (j - 1) * (j + b1 - 1) * (2 * j + s1) / ((j + s1) * (2 * j + s1 - 2) * (j + a1))
            q_prev, q = q, (A * u + B) * q - C * q_prev
    tail = [(kk, e) for kk, e in samples if kk >= k / 2 and e > 0]
    if len(tail) >= 2:
        x = np.log([kk for kk, _ in tail])
        y = np.log([e for _, e in tail])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = math.nan
    return k0, k, slope, env_k0


def _crossing_angle(params: JacobiParams, k: int, eps: float) -> float:
    """Largest theta with P_k(cos phi) > 1 - eps for all 0 <= phi <= theta.

    Marches outward from theta = 0 in steps far below the first-extremum
    angle (~ j_{alpha+1} / k), confirming on the way that P_k is still
    decreasing (its derivative family is positive), then bisects.
    """
    level = 1.0 - eps
    shifted = params.shift(1, 1)
    h = 0.02 / (k + 1)
    lo = 0.0
    theta = h
    while True:
        if theta > math.pi:
            raise ConstructionError(f"P_{k} never drops below 1 - eps")
        if evaluate_at_angle(shifted, k - 1, theta) <= 0.0:
            raise ConstructionError(f"P_{k} stopped decreasing before reaching 1 - eps")
        if evaluate_at_angle(params, k, theta) <= level:
            break
        lo = theta
        theta += h
    hi = theta
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if evaluate_at_angle(params, k, mid) > level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo


def r_of_d(
    params: JacobiParams,
    d: float,
    eps: float,
    degree_cap: int = 5000,
    *,
    clearance: float = 2.0,
    max_degree: int = 10_000_000,
) -> SpacingStep:
    """Spacing r(d) so that, for 0 < s <= r(d), P_k(cos s) <= 1 - eps forces
    |P_k| < eps on [0, cos d].

    k0 comes from ``envelope_scan``; by monotonicity of g on [0, 1] it bounds
    the sup of |P_k| on [0, cos d] from above.  For k <= k0 the initial
    segment P_0 > ... > P_k0 is decreasing right of the last extremum of
    P_k0, so P_k0 alone decides u0.
    """
    check_lemma_hypotheses(params)
    if not 0.0 < d < math.pi / 2:
        raise DomainError(f"d must lie in (0, pi/2), got {d!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    if 1.0 - eps >= 1.0 - 4 * np.finfo(float).eps:
        raise ConstructionError(f"eps = {eps:.3e} is below double-precision resolution near 1")
    u = math.cos(d)
    k0, scanned, slope, env = envelope_scan(params, u, eps, degree_cap, clearance=clearance, max_degree=max_degree)
    if not slope < 0.0:
        raise ConstructionError(f"envelope at d = {d} shows no decay trend (slope {slope})")
    k_use = max(k0, 1)
    r = _crossing_angle(params, k_use, eps)
    if not 0.0 < r < d:
        raise ConstructionError(f"spacing r = {r} is not strictly inside (0, d = {d})")
    # direct cross-check on the degrees the recurrence reaches cheaply;
    # stay a hair inside r, where P_k0 sits at 1 - eps up to rounding
    check_to = min(k_use, degree_cap)
    probe = np.array([(1 - 1e-6) * r, 0.5 * r, 0.1 * r])
    vals = table(params, check_to, np.cos(probe))
    if np.min(vals) <= 1.0 - eps:
        raise ConstructionError(f"P_k dips below 1 - eps inside [0, r] for some k <= {check_to}")
    return SpacingStep(d, eps, k0, math.cos(r), r, scanned, scanned > degree_cap, slope, env)


def generate_distances(
    space: SpaceKind,
    N: int,
    constants: LemmaConstants,
    start_fraction: float = 0.9,
    *,
    shrink: float = 1.0,
    clearance: float = 2.0,
    max_degree: int = 10_000_000,
) -> DistancePlan:
    if not min_alpha_for_theorem(space):
        raise DomainError(f"{space} has real dimension one; no decay bound exists there")
    if params_of(space).jacobi != constants.params:
        raise DomainError("constants were computed for different Jacobi parameters")
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    if not 0.0 < start_fraction < 1.0:
        raise DomainError("start_fraction must lie in (0, 1)")
    if not 0.0 < shrink <= 1.0:
        raise DomainError("shrink must lie in (0, 1]")
    eps = epsilon_for(constants.lam, N)
    ds = [start_fraction * constants.d0]
    trace = []
    for _ in range(N - 1):
        step = r_of_d(constants.params, ds[-1], eps, constants.degree_cap, clearance=clearance, max_degree=max_degree)
        trace.append(step)
        ds.append(shrink * step.r)
    return DistancePlan(space, int(N), tuple(ds), eps, tuple(trace), start_fraction, shrink)


def check_spacing(plan_distances: Sequence[float], constants: LemmaConstants, N: int, **kwargs) -> list[SpacingStep]:
    """Confirm user-supplied distances satisfy d_{i+1} <= r(d_i) and lie in (0, d0)."""
    ds = list(plan_distances)
    for d in ds:
        if not 0.0 < d < constants.d0:
            raise DomainError(f"distance {d} outside (0, d0 = {constants.d0})")
    eps = epsilon_for(constants.lam, N)
    steps = []
    for d, nxt in zip(ds, ds[1:]):
        step = r_of_d(constants.params, d, eps, constants.degree_cap, **kwargs)
        if nxt > step.r:
            raise DomainError(f"distance {nxt} exceeds r({d}) = {step.r}")
        steps.append(step)
    return steps


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------


def certificate_vector(lam: float, N: int) -> tuple[tuple[float, ...], Optional[float], float]:
    """(z, S, bound) for N distances."""
    if N == 1:
        return (0.5, 1.0), None, 0.5
    eps = epsilon_for(lam, N)
    S = sum(lam**i for i in range(N + 1)) + eps * (N - 1)
    z0 = (lam**N + eps * (N - 1)) / S
    z = (z0,) + tuple(lam ** (i - 1) / S for i in range(1, N + 1))
    bound = lam**N * (1 - lam) + lam ** (N + 1)
    return z, S, bound


def build_certificate(plan: DistancePlan, constants: LemmaConstants, k_verify: int = 10_000, tol: float = 1e-9) -> BoundCertificate:
    z, S, bound = certificate_vector(constants.lam, plan.N)
    lp = build_truncation(constants.params, plan.distances, 1)
    feas = verify_dual(lp, z, k_verify, tol)
    return BoundCertificate(plan, constants, z, S, bound, feas)


def verify_decay_claim(plan: DistancePlan, constants: LemmaConstants, k_max: int, tol: float = 1e-9) -> DecayReport:
    """min over j <= N, 0 <= k <= k_max of
    sum_{i<=j} lam^{i-1} P_k(cos d_i) + lam^j + eps (j - 1)."""
    lam = constants.lam
    eps = plan.epsilon or 0.0
    cols = jacobi_columns(constants.params, plan.distances, k_max)
    weights = lam ** np.arange(plan.N)
    partial = np.cumsum(cols * weights[None, :], axis=1)
    j = np.arange(1, plan.N + 1)
    slack = partial + (lam**j + eps * (j - 1))[None, :]
    k, jj = np.unravel_index(int(np.argmin(slack)), slack.shape)
    return DecayReport(float(slack[k, jj]), int(jj) + 1, int(k), int(k_max), tol)


def run_bound(
    space: SpaceKind,
    N: int,
    *,
    degree_cap: int = 5000,
    grid_size: int = 400,
    k_verify: int = 10_000,
    tol: float = 1e-9,
    start_fraction: float = 0.9,
    shrink: float = 1.0,
    constants: Optional[LemmaConstants] = None,
) -> BoundCertificate:
    """Lemma constants, distances, certificate, and the decay-claim sweep."""
    if not min_alpha_for_theorem(space):
        raise DomainError(f"{space} has real dimension one; see the counterexample command")
    params = params_of(space).jacobi
    if constants is None:
        constants = find_lemma_constants(params, degree_cap, grid_size)
    plan = generate_distances(space, N, constants, start_fraction, shrink=shrink)
    cert = build_certificate(plan, constants, k_verify, tol)
    decay = verify_decay_claim(plan, constants, k_verify, tol)
    return BoundCertificate(plan, constants, cert.z, cert.S, cert.bound, cert.feasibility, decay)
