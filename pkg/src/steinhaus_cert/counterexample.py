"""Distance-avoiding arc families on the circle and the real projective line.

At level k the centers e_{k,i} (i = 0..N_k-1) are (1, 0) rotated by
multiples of 2 theta_k, theta_k = (pi/2) / 3^k, N_k = ceil(3^k / 2).  The
open balls of radius d_k / 2 around them form a set C_k that avoids every
odd multiple of d_k, in particular 3^i d_k = d_{k-i} for i = 0..k, while
its measure stays bounded below as k grows.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .spaces import Family, SpaceKind, distance_rp1, distance_s1

MAX_LEVEL = 12
# Both spaces, with the metrics used here, are circles of length 2 pi.
TOTAL_LENGTH = 2.0 * math.pi


@dataclass(frozen=True)
class ArcFamily:
    space: SpaceKind
    level: int
    theta: float
    count: int
    centers: np.ndarray = field(repr=False)
    d: float

    @property
    def arc_radius(self) -> float:
        return self.d / 2.0

    @property
    def is_projective(self) -> bool:
        return self.space.family is Family.REAL_PROJECTIVE

    def metric(self, x, y):
        return distance_rp1(x, y) if self.is_projective else distance_s1(x, y)

    def center_angles(self) -> np.ndarray:
        return 2.0 * self.theta * np.arange(self.count)

    def point_at(self, index, offset) -> np.ndarray:
        """Point(s) at signed metric offset from center ``index``."""
        # On RP^1 the metric is twice the angle between lines.
        scale = 0.5 if self.is_projective else 1.0
        phi = 2.0 * self.theta * np.asarray(index) + scale * np.asarray(offset)
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1)


@dataclass(frozen=True)
class AvoidanceReport:
    min_gap: float
    analytic_ok: bool
    samples: int
    max_center_error: float


@dataclass(frozen=True)
class MeasureReport:
    arc_measure: float
    total: float
    lower_bound: float
    min_separation: float


def _check_space(space: SpaceKind) -> None:
    if space.family not in (Family.SPHERE, Family.REAL_PROJECTIVE) or space.n != 2:
        raise DomainError(f"arc families exist only on s1 and rp1, not {space}")


def build(space: SpaceKind, k: int) -> ArcFamily:
    _check_space(space)
    if int(k) != k or not 1 <= k <= MAX_LEVEL:
        raise DomainError(f"level must be an integer in [1, {MAX_LEVEL}], got {k!r}")
    k = int(k)
    theta = (math.pi / 2) / 3**k
    count = (3**k + 1) // 2
    angles = 2.0 * theta * np.arange(count)
    centers = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    metric = distance_rp1 if space.family is Family.REAL_PROJECTIVE else distance_s1
    d = metric(centers[0], centers[1]) / 2.0
    return ArcFamily(space, k, theta, count, centers, d)


def forbidden_distances(family: ArcFamily, up_to: int) -> list[float]:
    """[3^0 d_k, ..., 3^up_to d_k]."""
    if not 0 <= up_to <= family.level:
        raise DomainError(f"up_to must lie in [0, {family.level}]")
    return [3**i * family.d for i in range(up_to + 1)]


def center_distance_error(family: ArcFamily) -> float:
    """max_m |d(e_0, e_m) - 2 m d_k|; rotations are isometries, so this covers all pairs."""
    m = np.arange(family.count)
    dist = family.metric(np.broadcast_to(family.centers[0], family.centers.shape), family.centers)
    return float(np.max(np.abs(dist - 2.0 * m * family.d)))


def check_avoidance(family: ArcFamily, samples: int, rng_seed: int = 0, chunk: int = 100_000) -> AvoidanceReport:
    if samples < 1:
        raise DomainError("samples must be positive")
    err = center_distance_error(family)
    # Points of B_i and B_j lie at distance inside ((2m-1) d_k, (2m+1) d_k),
    # m = |i - j|.  Forbidden values are odd multiples q d_k, which can only
    # sit on band endpoints: compare in integer units of d_k.
    odd = [3**i for i in range(family.level + 1)]
    # Only the two bands adjacent to q can contain it.
    bands_ok = all(
        not (2 * m - 1 < q < 2 * m + 1)
        for q in odd
        for m in (q // 2, q // 2 + 1)
        if 0 <= m < family.count
    )
    analytic_ok = bands_ok and err <= 1e-10

    forbidden = np.array(forbidden_distances(family, family.level))
    rho = family.arc_radius
    min_gap = math.inf
    children = np.random.SeedSequence(rng_seed).spawn(-(-samples // chunk))
    remaining = samples
    for seq in children:
        n = min(chunk, remaining)
        remaining -= n
        rng = np.random.default_rng(seq)
        i = rng.integers(0, family.count, n)
        j = rng.integers(0, family.count, n)
        # open balls: (-rho, rho)
        si = rho * (2.0 * rng.random(n) - 1.0)
        sj = rho * (2.0 * rng.random(n) - 1.0)
        si[si == -rho] = 0.0
        sj[sj == -rho] = 0.0
        dist = family.metric(family.point_at(i, si), family.point_at(j, sj))
        gaps = np.min(np.abs(dist[:, None] - forbidden[None, :]), axis=1)
        min_gap = min(min_gap, float(np.min(gaps)))
    return AvoidanceReport(min_gap, analytic_ok, samples, err)


def measure(family: ArcFamily) -> MeasureReport:
    """Normalized measures (mu(M) = 1) of one arc, of C_k, and the level-1 lower bound."""
    arc = 2.0 * family.arc_radius / TOTAL_LENGTH
    # circular positions in metric units
    scale = 2.0 if family.is_projective else 1.0
    pos = np.sort(scale * family.center_angles())
    gaps = np.diff(np.concatenate([pos, [pos[0] + TOTAL_LENGTH]]))
    separation = float(np.min(gaps)) - 2.0 * family.arc_radius
    if separation <= 0.0:
        raise RuntimeError(f"arcs overlap at level {family.level} (separation {separation})")
    first = build(family.space, 1)
    lower = 1.5 * (2.0 * first.arc_radius / TOTAL_LENGTH)
    return MeasureReport(arc, family.count * arc, lower, separation)


def arcs_csv(family: ArcFamily) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "center_angle", "radius"])
    for i, angle in enumerate(family.center_angles()):
        writer.writerow([i, repr(float(angle)), repr(family.arc_radius)])
    return buf.getvalue()


def summary(family: ArcFamily, samples: int = 100_000, rng_seed: int = 0) -> dict:
    avoid = check_avoidance(family, samples, rng_seed)
    meas = measure(family)
    return {
        "space": family.space.name,
        "k": family.level,
        "d_k": family.d,
        "N_k": family.count,
        "arc_measure": meas.arc_measure,
        "total_measure": meas.total,
        "lower_bound": meas.lower_bound,
        "forbidden": forbidden_distances(family, family.level),
        "min_gap": avoid.min_gap,
        "analytic_ok": avoid.analytic_ok,
        "samples": samples,
        "seed": rng_seed,
    }
