"""Bessel functions of the first kind and the limit profile Omega_alpha.

J_nu(t) is evaluated by its ascending power series for t <= 12 and by
Miller's backward recurrence (normalized with the Neumann-type sum
(t/2)^nu0 = sum_k (nu0 + 2k) Gamma(nu0 + k) / k! J_{nu0+2k}(t)) above that.
Both routes stay within ~1e-13 absolute on the supported box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

NU_MAX = 12.0
T_MAX = 60.0
SERIES_LIMIT = 12.0
OMEGA_MIN_BOUND = -0.45


@dataclass(frozen=True)
class BesselZero:
    order: float
    value: float
    residual: float


@dataclass(frozen=True)
class OmegaProfile:
    """Global minimum of Omega_alpha on (0, infinity), located numerically."""

    alpha: float
    min_location: float
    min_value: float
    grid_min_value: float
    bound: float = OMEGA_MIN_BOUND

    @property
    def holds(self) -> bool:
        return self.min_value >= self.bound


def _check(nu: float, t: float) -> None:
    if not 0.0 <= nu <= NU_MAX:
        raise DomainError(f"order must lie in [0, {NU_MAX}], got {nu!r}")
    if not 0.0 <= t <= T_MAX:
        raise DomainError(f"argument must lie in [0, {T_MAX}], got {t!r}")


def _series(nu: float, t: float) -> float:
    if t == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    half = 0.5 * t
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    q = -half * half
    terms = [term]
    m = 0
    while True:
        term *= q / ((m + 1) * (m + nu + 1))
        terms.append(term)
        m += 1
        if abs(term) < 1e-17 * max(1.0, abs(terms[0])) and m > half:
            break
    return math.fsum(terms)


def _miller(nu: float, t: float) -> float:
    n = int(math.floor(nu))
    nu0 = nu - n
    top = int(max(t, nu)) + 60
    # f[j] ~ J_{nu0 + j}(t) up to a common factor
    f = [0.0] * (top + 2)
    f[top] = 1e-30
    for j in range(top, 0, -1):
        f[j - 1] = 2.0 * (nu0 + j) / t * f[j] - f[j + 1]
        if abs(f[j - 1]) > 1e250:
            for i in range(j - 1, top + 1):
                f[i] *= 1e-250
    weights = []
    for k in range(0, top // 2 + 1):
        if k == 0:
            w = math.gamma(nu0 + 1.0)
        else:
            w = (nu0 + 2 * k) * math.exp(math.lgamma(nu0 + k) - math.lgamma(k + 1.0))
        weights.append(w * f[2 * k])
    norm = math.fsum(weights)
    target = (0.5 * t) ** nu0
    return f[n] * target / norm


def bessel_j(nu: float, t: float) -> float:
    """J_nu(t) for 0 <= nu <= 12 and 0 <= t <= 60."""
    nu, t = float(nu), float(t)
    _check(nu, t)
    if t <= SERIES_LIMIT:
        return _series(nu, t)
    return _miller(nu, t)


def _bisect(f, lo: float, hi: float, tol: float = 1e-13, max_iter: int = 200) -> float:
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            return 0.5 * (lo + hi)
    raise ConvergenceError(f"bisection did not converge on [{lo}, {hi}]")


def first_positive_zero(nu: float) -> BesselZero:
    """Smallest positive zero j_nu of J_nu."""
    nu = float(nu)
    if not 0.0 <= nu <= NU_MAX:
        raise DomainError(f"order must lie in [0, {NU_MAX}], got {nu!r}")
    f = lambda x: bessel_j(nu, x)  # noqa: E731
    lo = max(nu, 1.0)
    if f(lo) <= 0.0:
        raise ConvergenceError(f"J_{nu} is not positive at the scan start {lo}")
    hi = lo + 0.5
    while f(hi) > 0.0:
        lo, hi = hi, hi + 0.5
        if hi > T_MAX:
            raise ConvergenceError(f"no sign change of J_{nu} below {T_MAX}")
    root = _bisect(f, lo, hi)
    # J_nu has no zero on (0, root): the scan from max(nu, 1) saw none and
    # J_nu(t) > 0 for 0 < t <= nu; spot-check on a grid.
    grid = np.linspace(root * 1e-3, root * (1 - 1e-6), 200)
    if min(f(x) for x in grid) <= 0.0:
        raise ConvergenceError(f"J_{nu} changes sign before {root}")
    return BesselZero(nu, root, f(root))


def omega(alpha: float, t: float) -> float:
    """Omega_alpha(t) = Gamma(alpha + 1) (2/t)^alpha J_alpha(t), t > 0."""
    alpha, t = float(alpha), float(t)
    if alpha < 0.0:
        raise DomainError("alpha must be >= 0")
    if t <= 0.0:
        raise DomainError("t must be > 0")
    scale = math.exp(math.lgamma(alpha + 1.0) + alpha * math.log(2.0 / t))
    return scale * bessel_j(alpha, t)


def jacobi_limit(alpha: float) -> float:
    """Omega_alpha(j_{alpha+1}): the limit of P_k at the last interior extremum."""
    return omega(alpha, first_positive_zero(alpha + 1.0).value)


def claim_b_minimum(alpha: float, t_max: float = 30.0, grid_size: int = 3000) -> OmegaProfile:
    """Locate the global minimum of Omega_alpha on (0, t_max] independently of
    the zero finder: grid search, then bisection on the sign of Omega_alpha',
    which is -Gamma(alpha+1) 2^alpha t^-alpha J_{alpha+1}(t)."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= NU_MAX - 1:
        raise DomainError(f"alpha must lie in [0, {NU_MAX - 1}]")
    ts = np.linspace(t_max / grid_size, t_max, grid_size)
    vals = np.array([omega(alpha, x) for x in ts])
    i = int(np.argmin(vals))
    if i == 0 or i == grid_size - 1:
        raise ConvergenceError(f"minimum of Omega_{alpha} sits on the grid boundary")
    lo, hi = float(ts[i - 1]), float(ts[i + 1])
    neg_slope = lambda x: bessel_j(alpha + 1.0, x)  # noqa: E731
    if neg_slope(lo) <= 0.0 or neg_slope(hi) >= 0.0:
        raise ConvergenceError(f"no critical point of Omega_{alpha} in [{lo}, {hi}]")
    loc = _bisect(neg_slope, lo, hi, tol=1e-13)
    return OmegaProfile(alpha, loc, omega(alpha, loc), float(vals[i]))
