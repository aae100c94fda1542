"""Degree-truncated theta linear programs and dual feasibility checks.

The primal, truncated at degree K, is

    maximize f_0
    subject to  sum_k f_k = 1,
                sum_k f_k P_k(cos d_i) = 0   (i = 1..N),
                f_k >= 0                     (k = 0..K).

Its dual has variables z_0..z_N with objective z_0 and one constraint per
degree: z_0 + sum_i z_i P_k(cos d_i) >= [k == 0].  The k = 0 row is the
normalization z_0 + ... + z_N >= 1.  Any z satisfying the dual rows for
every k >= 0 bounds the untruncated primal from above.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .jacobi import JacobiParams, table


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


class Verdict(enum.Enum):
    FEASIBLE = "Feasible"
    VIOLATED = "Violated"
    FEASIBLE_UP_TO_CAP = "FeasibleUpToCap"


@dataclass(frozen=True)
class TruncatedLP:
    params: JacobiParams
    distances: tuple[float, ...]
    degree_cap: int
    cosines: np.ndarray = field(repr=False)  # (K + 1, N): P_k(cos d_i)

    @property
    def n_distances(self) -> int:
        return len(self.distances)

    def matrix(self) -> np.ndarray:
        """Equality-constraint matrix, shape (N + 1, K + 1)."""
        return np.vstack([np.ones(self.degree_cap + 1), self.cosines.T])


@dataclass
class LPSolution:
    primal_value: float
    primal_f: dict[int, float]
    dual_z: np.ndarray
    status: Status
    iterations: int = 0


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of checking a dual vector against degrees 1..checked_up_to.

    ``min_slack`` covers the degree rows k >= 1; the normalization row is
    reported separately as ``normalization_slack``.
    """

    min_slack: float
    argmin_degree: int
    checked_up_to: int
    tail_margin: float
    verdict: Verdict
    normalization_slack: float
    tolerance: float

    def to_json(self) -> dict:
        return {
            "k_verify": self.checked_up_to,
            "min_slack": self.min_slack,
            "argmin_degree": self.argmin_degree,
            "normalization_slack": self.normalization_slack,
            "tail_margin": self.tail_margin,
            "tolerance": self.tolerance,
            "verdict": self.verdict.value,
        }


def check_distances(distances: Sequence[float]) -> tuple[float, ...]:
    ds = tuple(float(d) for d in distances)
    for d in ds:
        if not 0.0 < d < math.pi:
            raise DomainError(f"distances must lie in (0, pi), got {d!r}")
    for a, b in zip(ds, ds[1:]):
        if not a > b:
            raise DomainError("distances must be strictly decreasing")
    return ds


def jacobi_columns(params: JacobiParams, distances: Sequence[float], kmax: int) -> np.ndarray:
    """P_k(cos d_i) for k = 0..kmax as an array of shape (kmax + 1, N)."""
    if len(distances) == 0:
        return np.empty((kmax + 1, 0))
    return table(params, kmax, np.cos(np.asarray(distances, dtype=float)))


def build_truncation(params: JacobiParams, distances: Sequence[float], K: int) -> TruncatedLP:
    ds = check_distances(distances)
    if int(K) != K or K < 1:
        raise DomainError(f"truncation degree must be a positive integer, got {K!r}")
    K = int(K)
    cos_table = jacobi_columns(params, ds, K)
    cos_table.setflags(write=False)
    return TruncatedLP(params, ds, K, cos_table)


def _simplex(A, b, cost, basis, tol, max_iter):
    """Revised simplex (minimization) with Bland's rule from a feasible basis."""
    m, n = A.shape
    basis = list(basis)
    for it in range(max_iter):
        B = A[:, basis]
        x_B = np.linalg.solve(B, b)
        x_B[x_B < 0] = 0.0
        y = np.linalg.solve(B.T, cost[basis])
        reduced = cost - y @ A
        reduced[basis] = 0.0
        scale = 1.0 + np.abs(y).sum()
        entering = np.nonzero(reduced < -tol * scale)[0]
        if entering.size == 0:
            return Status.OPTIMAL, basis, x_B, y, it
        j = int(entering[0])
        d = np.linalg.solve(B, A[:, j])
        pos = d > tol
        if not np.any(pos):
            return Status.UNBOUNDED, basis, x_B, y, it
        ratios = np.full(m, np.inf)
        ratios[pos] = x_B[pos] / d[pos]
        rmin = ratios.min()
        ties = np.nonzero(ratios <= rmin + 1e-12 * (1.0 + rmin))[0]
        r = int(min(ties, key=lambda i: basis[i]))
        basis[r] = j
    return Status.ITERATION_LIMIT, basis, None, None, max_iter


def simplex_max(A: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float = 1e-9, max_iter: int = 100_000):
    """maximize c.x subject to A x = b, x >= 0 (b >= 0), by two-phase simplex.

    Returns (status, x, y, iterations); ``y`` are the dual multipliers of
    the equality rows (A^T y >= c at optimality), zero for redundant rows.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise DomainError("simplex_max expects b >= 0")

    # Phase I: artificials n..n+m-1
    A1 = np.hstack([A, np.eye(m)])
    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    status, basis, x_B, _, it1 = _simplex(A1, b, cost1, range(n, n + m), tol, max_iter)
    if status is not Status.OPTIMAL:
        return status, None, None, it1
    if x_B[[i for i, j in enumerate(basis) if j >= n]].sum() > tol * (1.0 + b.sum()):
        return Status.INFEASIBLE, None, None, it1

    # Drive remaining (zero-level) artificials out of the basis.
    keep = list(range(m))
    for r in range(m):
        if basis[r] < n:
            continue
        row = np.linalg.solve(A1[:, basis].T, np.eye(m)[r]) @ A
        candidates = [j for j in range(n) if j not in basis and abs(row[j]) > 1e-9]
        if candidates:
            basis[r] = candidates[0]
        else:
            keep.remove(r)
    basis = [basis[r] for r in keep]
    A2 = A[keep]
    b2 = b[keep]

    status, basis, x_B, y, it2 = _simplex(A2, b2, -c, basis, tol, max_iter)
    iterations = it1 + it2
    if status is not Status.OPTIMAL:
        return status, None, None, iterations
    x = np.zeros(n)
    x[basis] = x_B
    duals = np.zeros(m)
    duals[keep] = -y
    return Status.OPTIMAL, x, duals, iterations


def solve_primal(lp: TruncatedLP, tol: float = 1e-9, max_iter: int = 100_000) -> LPSolution:
    A = lp.matrix()
    m, n = A.shape
    b = np.zeros(m)
    b[0] = 1.0
    c = np.zeros(n)
    c[0] = 1.0
    status, x, y, iterations = simplex_max(A, b, c, tol, max_iter)
    if status is not Status.OPTIMAL:
        return LPSolution(math.nan, {}, np.full(m, math.nan), status, iterations)
    f = {int(k): float(v) for k, v in enumerate(x) if v > 0.0}
    return LPSolution(float(x[0]), f, y, status, iterations)


def weak_duality_gap(sol: LPSolution) -> float:
    """Dual objective z_0 minus the primal value."""
    if sol.status is not Status.OPTIMAL:
        raise ValueError(f"duality gap needs an optimal solution, got {sol.status.value}")
    return float(sol.dual_z[0] - sol.primal_value)


def verify_dual(lp: TruncatedLP, z: Sequence[float], k_verify: int, tol: float = 1e-9) -> FeasibilityReport:
    """Check z_0 + sum_i z_i P_k(cos d_i) >= 0 for k = 1..k_verify and the
    normalization row; estimate a tail margin from the last 10% of degrees."""
    z = np.asarray(z, dtype=float)
    if z.shape != (lp.n_distances + 1,):
        raise DomainError(f"z must have length {lp.n_distances + 1}")
    if int(k_verify) != k_verify or k_verify < 1:
        raise DomainError("k_verify must be a positive integer")
    k_verify = int(k_verify)
    if k_verify <= lp.degree_cap:
        cols = lp.cosines[: k_verify + 1]
    else:
        cols = jacobi_columns(lp.params, lp.distances, k_verify)
    slack = z[0] + cols[1:] @ z[1:]
    i = int(np.argmin(slack))
    min_slack = float(slack[i])
    normalization = float(z.sum() - 1.0)
    threshold = tol * max(1.0, float(np.abs(z).sum()))

    tail_len = max(1, k_verify // 10)
    tail = cols[-tail_len:]
    tail_max = float(np.max(np.abs(tail))) if tail.size else 0.0
    tail_margin = float(z[0] - np.abs(z[1:]).sum() * tail_max)

    if min_slack < -threshold or normalization < -threshold:
        verdict = Verdict.VIOLATED
    elif tail_margin > 0.0:
        verdict = Verdict.FEASIBLE
    else:
        verdict = Verdict.FEASIBLE_UP_TO_CAP
    return FeasibilityReport(min_slack, i + 1, k_verify, tail_margin, verdict, normalization, threshold)


def lp_to_json(lp: TruncatedLP, sol: Optional[LPSolution] = None) -> dict:
    out = {
        "alpha": lp.params.alpha,
        "beta": lp.params.beta,
        "distances": list(lp.distances),
        "K": lp.degree_cap,
    }
    if sol is not None:
        out.update(
            {
                "f": [[k, w] for k, w in sorted(sol.primal_f.items())],
                "z": [float(v) for v in sol.dual_z],
                "value": sol.primal_value,
                "status": sol.status.value,
            }
        )
        if sol.status is Status.OPTIMAL:
            out["gap"] = weak_duality_gap(sol)
    return out


def lp_from_json(data: dict) -> TruncatedLP:
    return build_truncation(JacobiParams(float(data["alpha"]), float(data["beta"])), data["distances"], int(data["K"]))
