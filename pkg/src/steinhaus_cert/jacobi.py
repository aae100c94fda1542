"""Jacobi polynomials normalized so that P_k(1) = 1.

All routines work with the normalized family

    P_k(t) = P_k^{std}(t) / binom(k + alpha, k),

where ``P_k^{std}`` is the classical Jacobi polynomial.  The three-term
recurrence is run directly in the normalized scale, so the value at
``t = 1`` stays at 1 up to a few ulps for every degree and no overflow
occurs for large ``k``.

Scalar arguments go through plain Python floats (fast for long degree
scans at a single point); array arguments are evaluated with numpy, one
recurrence step per degree for the whole array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np

from .errors import ConvergenceError, DomainError

ArrayLike = Union[float, np.ndarray]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class JacobiParams:
    """Parameter pair (alpha, beta), both > -1."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= -1.0:
                raise DomainError(f"{name} must be a finite number > -1, got {value!r}")

    def shift(self, dalpha: float = 0.0, dbeta: float = 0.0) -> "JacobiParams":
        return JacobiParams(self.alpha + dalpha, self.beta + dbeta)


@dataclass(frozen=True)
class PolyValue:
    value: float
    degree: int
    argument: float

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise DomainError("degree must be nonnegative")
        if abs(self.argument) > 1.0:
            raise DomainError("argument must lie in [-1, 1]")


@dataclass(frozen=True)
class InfimumResult:
    """Finite-degree surrogate for l(t) = inf_k P_k(t)."""

    value: float
    attained_degree: int
    degree_cap: int


def _check_degree(k: int) -> int:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {k!r}")
    return int(k)


def _check_argument(t: ArrayLike) -> ArrayLike:
    if np.ndim(t) == 0:
        t = float(t)
        if not -1.0 <= t <= 1.0:
            raise DomainError(f"argument must lie in [-1, 1], got {t!r}")
        return t
    arr = np.asarray(t, dtype=float)
    if not np.all((arr >= -1.0) & (arr <= 1.0)):
        raise DomainError("all arguments must lie in [-1, 1]")
    return arr


def recurrence_coefficients(params: JacobiParams, k: int) -> tuple[float, float, float]:
    """Return (A, B, C) with P_k(t) = (A t + B) P_{k-1}(t) - C P_{k-2}(t), k >= 2."""
    a, b = params.alpha, params.beta
    s = a + b
    A = (2 * k + s - 1) * (2 * k + s) / (2 * (k + s) * (k + a))
    B = (2 * k + s - 1) * (a * a - b * b) / (2 * (k + s) * (2 * k + s - 2) * (k + a))
    C = (k - 1) * (k + b - 1) * (2 * k + s) / ((k + s) * (2 * k + s - 2) * (k + a))
    return A, B, C


def iter_values(params: JacobiParams, t: ArrayLike, kmax: Optional[int] = None) -> Iterator[tuple[int, ArrayLike]]:
    """Yield (k, P_k(t)) for k = 0, 1, ..., kmax (unbounded if kmax is None).

    No domain check is made on ``t``; callers validate.
    """
    a, b = params.alpha, params.beta
    s = a + b
    if np.ndim(t) == 0:
        x = float(t)
        p_prev = 1.0
    else:
        x = np.asarray(t, dtype=float)
        p_prev = np.ones_like(x)
    yield 0, p_prev
    if kmax == 0:
        return
    p = ((s + 2) * x + (a - b)) / (2 * (a + 1))
    yield 1, p
    k = 2
    while kmax is None or k <= kmax:
        A = (2 * k + s - 1) * (2 * k + s) / (2 * (k + s) * (k + a))
        B = (2 * k + s - 1) * (a * a - b * b) / (2 * (k + s) * (2 * k + s - 2) * (k + a))
        C = (k - 1) * (k + b - 1) * (2 * k + s) / ((k + s) * (2 * k + s - 2) * (k + a))
        p_prev, p = p, (A * x + B) * p - C * p_prev
        yield k, p
        k += 1


def _eval(params: JacobiParams, k: int, t: ArrayLike) -> ArrayLike:
    value = None
    for _, value in iter_values(params, t, k):
        pass
    return value


def evaluate(params: JacobiParams, k: int, t: ArrayLike) -> ArrayLike:
    """Normalized Jacobi polynomial P_k(t) for scalar or array ``t`` in [-1, 1]."""
    k = _check_degree(k)
    t = _check_argument(t)
    value = _eval(params, k, t)
    return value.copy() if isinstance(value, np.ndarray) else value


def poly_value(params: JacobiParams, k: int, t: float) -> PolyValue:
    return PolyValue(float(evaluate(params, k, t)), int(k), float(t))


def table(params: JacobiParams, kmax: int, t: ArrayLike) -> np.ndarray:
    """Array of shape (kmax + 1, *shape(t)) holding P_0(t), ..., P_kmax(t)."""
    kmax = _check_degree(kmax)
    t = np.asarray(_check_argument(t), dtype=float)
    out = np.empty((kmax + 1,) + t.shape)
    for k, value in iter_values(params, t, kmax):
        out[k] = value
    return out


def derivative_factor(params: JacobiParams, k: int) -> float:
    """c_k with d/dt P_k^{(a,b)} = c_k * P_{k-1}^{(a+1,b+1)}."""
    return k * (k + params.alpha + params.beta + 1) / (2 * (params.alpha + 1))


def evaluate_derivative(params: JacobiParams, k: int, t: ArrayLike) -> ArrayLike:
    """d/dt of the normalized P_k at ``t``."""
    k = _check_degree(k)
    t = _check_argument(t)
    if k == 0:
        return np.zeros_like(t) if isinstance(t, np.ndarray) else 0.0
    inner = _eval(params.shift(1, 1), k - 1, t)
    return derivative_factor(params, k) * inner


def _hyp_series(params: JacobiParams, k: int, x: float) -> float:
    # 2F1(-k, k + a + b + 1; a + 1; x), which is the normalized P_k at t = 1 - 2x
    a, b = params.alpha, params.beta
    c = k + a + b + 1
    term = 1.0
    terms = [1.0]
    for m in range(k):
        term *= (m - k) * (m + c) / ((m + a + 1) * (m + 1)) * x
        terms.append(term)
        if abs(term) < 1e-18 and m > 2:
            break
    return math.fsum(terms)


SERIES_LIMIT = 25.0


def evaluate_near_one(params: JacobiParams, k: int, t: float) -> float:
    """P_k(t) from the terminating hypergeometric sum in x = (1 - t)/2.

    Cost is independent of ``k`` when k^2 (1 - t) is moderate, which makes
    this the route of choice for very large degrees close to t = 1.  Falls
    back to the recurrence when the sum would lose accuracy.
    """
    k = _check_degree(k)
    t = float(_check_argument(t))
    x = (1.0 - t) / 2.0
    if k * k * x > SERIES_LIMIT:
        return float(_eval(params, k, t))
    return _hyp_series(params, k, x)


def evaluate_at_angle(params: JacobiParams, k: int, theta: float) -> float:
    """P_k(cos theta), 0 <= theta <= pi, accurate for tiny theta and huge k."""
    k = _check_degree(k)
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"angle must lie in [0, pi], got {theta!r}")
    x = math.sin(0.5 * theta) ** 2
    if k * k * x > SERIES_LIMIT:
        return float(_eval(params, k, math.cos(theta)))
    return _hyp_series(params, k, x)


def g_function(params: JacobiParams, k: int, u: ArrayLike) -> ArrayLike:
    """g(u) = P_k(u)^2 + (1 - u^2) P_k'(u)^2 / (k (k + a + b + 1)), k >= 1.

    Nondecreasing on [0, 1] whenever alpha >= beta and alpha + beta + 1 >= 0,
    so sqrt(g(u)) bounds |P_k| on [0, u].
    """
    k = _check_degree(k)
    if k == 0:
        raise DomainError("g is defined for k >= 1")
    u = _check_argument(u)
    p = _eval(params, k, u)
    dp = derivative_factor(params, k) * _eval(params.shift(1, 1), k - 1, u)
    return p * p + (1 - u * u) * dp * dp / (k * (k + params.alpha + params.beta + 1))


def _refine_root(params: JacobiParams, k: int, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    """Safeguarded Newton for P_k on [lo, hi] with P_k(lo) <= 0 < P_k(hi)."""
    shifted = params.shift(1, 1)
    factor = derivative_factor(params, k)
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = _eval(params, k, x)
        if f == 0.0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
        df = factor * _eval(shifted, k - 1, x)
        step_ok = False
        if df != 0.0 and math.isfinite(df):
            x_new = x - f / df
            if lo < x_new < hi:
                step_ok = True
                if abs(x_new - x) <= 0.25 * tol:
                    return x_new
                x = x_new
        if not step_ok:
            x = 0.5 * (lo + hi)
    raise ConvergenceError(
        f"root refinement for degree {k}, params {params} stalled on [{lo!r}, {hi!r}]"
    )


def _bracket_largest_zero(params: JacobiParams, k: int) -> tuple[float, float]:
    # Scan t = cos(theta) outward from theta = 0 on a grid much finer than the
    # zero spacing (about pi/k in theta); the first sign change brackets the
    # rightmost zero.
    h = math.pi / (16.0 * (k + 1))
    chunk = 256
    start = 0
    prev_val = 1.0
    prev_t = 1.0
    while start * h < math.pi:
        idx = np.arange(start + 1, start + chunk + 1)
        theta = np.minimum(idx * h, math.pi)
        ts = np.cos(theta)
        vals = _eval(params, k, ts)
        neg = np.nonzero(vals <= 0.0)[0]
        if neg.size:
            i = int(neg[0])
            hi = prev_t if i == 0 else float(ts[i - 1])
            return float(ts[i]), hi
        prev_val, prev_t = float(vals[-1]), float(ts[-1])
        start += chunk
    raise ConvergenceError(f"no sign change found for degree {k}, params {params} (last value {prev_val})")


def largest_zero(params: JacobiParams, k: int, *, tol: float = 1e-12, lower: Optional[float] = None) -> float:
    """Rightmost zero of P_k, k >= 1.

    ``lower`` may be the rightmost zero of P_{k-1}; by interlacing the
    bracket [lower, 1] then holds exactly one zero.
    """
    k = _check_degree(k)
    if k < 1:
        raise DomainError("largest_zero needs k >= 1")
    if k == 1:
        a, b = params.alpha, params.beta
        return (b - a) / (a + b + 2)
    if lower is not None:
        lo, hi = float(lower), 1.0
        if _eval(params, k, lo) > 0.0:
            raise ConvergenceError(f"interlacing bracket [{lo}, 1] shows no sign change for degree {k}")
    else:
        lo, hi = _bracket_largest_zero(params, k)
    return _refine_root(params, k, lo, hi, tol)


def largest_zeros(params: JacobiParams, kmax: int, *, tol: float = 1e-12) -> list[float]:
    """Rightmost zeros for degrees 1..kmax, chained through interlacing."""
    zeros = []
    prev = -1.0
    for k in range(1, kmax + 1):
        prev = largest_zero(params, k, tol=tol, lower=prev if k > 1 else None)
        zeros.append(prev)
    return zeros


def l_inf_grid(params: JacobiParams, ts: np.ndarray, degree_cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized l_inf: (min_k P_k(t), argmin degree) for each t, 0 <= k <= degree_cap."""
    ts = np.asarray(_check_argument(np.atleast_1d(ts)), dtype=float)
    best = np.ones_like(ts)
    where = np.zeros(ts.shape, dtype=int)
    for k, vals in iter_values(params, ts, degree_cap):
        better = vals < best
        if np.any(better):
            best = np.where(better, vals, best)
            where = np.where(better, k, where)
    return best, where


def l_inf(params: JacobiParams, t: float, degree_cap: int = 5000) -> InfimumResult:
    """min_{0 <= k <= degree_cap} P_k(t): a finite-cap estimate (from above) of inf_k P_k(t)."""
    t = float(_check_argument(t))
    if not -1.0 < t < 1.0:
        raise DomainError("l_inf needs -1 < t < 1")
    if degree_cap < 1:
        raise DomainError("degree_cap must be positive")
    best, where = l_inf_grid(params, np.array([t]), degree_cap)
    return InfimumResult(float(best[0]), int(where[0]), int(degree_cap))


def _golden_max(f, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
        if hi - lo < 1e-15:
            break
    return (c, fc) if fc >= fd else (d, fd)


def _check_interval(a: float, b: float) -> None:
    if not (-1.0 < a <= b < 1.0):
        raise DomainError(f"need -1 < a <= b < 1, got [{a}, {b}]")


def sup_abs_on_interval(params: JacobiParams, k: int, a: float, b: float, grid_size: Optional[int] = None) -> float:
    """max |P_k| over [a, b]: uniform grid, then golden-section refinement
    in the two cells adjacent to the best grid point."""
    k = _check_degree(k)
    _check_interval(a, b)
    if grid_size is None:
        grid_size = max(1000, 20 * k)
    if a == b:
        return abs(float(_eval(params, k, a)))
    grid = np.linspace(a, b, max(int(grid_size), 2))
    vals = np.abs(_eval(params, k, grid))
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, grid.size - 1)])
    _, refined = _golden_max(lambda x: abs(_eval(params, k, x)), lo, hi)
    return max(best, refined)


def sup_abs_profile(params: JacobiParams, kmax: int, a: float, b: float, grid_size: int) -> np.ndarray:
    """Grid estimate of max_{[a,b]} |P_k| for every k = 0..kmax (no refinement)."""
    _check_interval(a, b)
    grid = np.linspace(a, b, max(int(grid_size), 2))
    out = np.empty(kmax + 1)
    for k, vals in iter_values(params, grid, kmax):
        out[k] = np.max(np.abs(vals))
    return out
