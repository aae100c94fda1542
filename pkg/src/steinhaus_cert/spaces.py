"""Compact connected rank-one symmetric spaces and their Jacobi parameters."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .jacobi import JacobiParams


class Family(enum.Enum):
    SPHERE = "s"
    REAL_PROJECTIVE = "rp"
    COMPLEX_PROJECTIVE = "cp"
    QUATERNIONIC_PROJECTIVE = "hp"
    OCTONIONIC_PLANE = "op"


@dataclass(frozen=True)
class SpaceKind:
    """A space family with its parameter n (S^{n-1}, RP^{n-1}, CP^{n-1}, HP^{n-1}).

    The octonionic plane OP^2 is stored with n = 3.
    """

    family: Family
    n: int = 3

    def __post_init__(self) -> None:
        if self.family is Family.OCTONIONIC_PLANE:
            if self.n != 3:
                raise DomainError("the octonionic projective plane has no free parameter (n = 3)")
        elif int(self.n) != self.n or self.n < 2:
            raise DomainError(f"{self.family.name} needs integer n >= 2, got {self.n!r}")

    @property
    def name(self) -> str:
        return f"{self.family.value}{self.n - 1}"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SpaceParams:
    real_dimension: int
    jacobi: JacobiParams


def params_of(space: SpaceKind) -> SpaceParams:
    n = space.n
    fam = space.family
    if fam is Family.SPHERE:
        return SpaceParams(n - 1, JacobiParams((n - 3) / 2, (n - 3) / 2))
    if fam is Family.REAL_PROJECTIVE:
        return SpaceParams(n - 1, JacobiParams((n - 3) / 2, -0.5))
    if fam is Family.COMPLEX_PROJECTIVE:
        return SpaceParams(2 * (n - 1), JacobiParams(n - 2, 0.0))
    if fam is Family.QUATERNIONIC_PROJECTIVE:
        return SpaceParams(4 * (n - 1), JacobiParams(2 * n - 3, 1.0))
    return SpaceParams(16, JacobiParams(7.0, 3.0))


def min_alpha_for_theorem(space: SpaceKind) -> bool:
    """True iff the real dimension is at least 2 (equivalently alpha >= 0)."""
    return params_of(space).real_dimension >= 2


_NAME = re.compile(r"^(s|rp|cp|hp|op)(\d+)$")


def parse_space(text: str) -> SpaceKind:
    """Parse names like 's2', 'rp1', 'CP3', 'hp2', 'op2' (case-insensitive)."""
    m = _NAME.match(text.strip().lower())
    if not m:
        raise DomainError(f"unrecognized space name {text!r}; expected s<d>, rp<d>, cp<d>, hp<d> or op2")
    family = Family(m.group(1))
    d = int(m.group(2))
    if family is Family.OCTONIONIC_PLANE and d != 2:
        raise DomainError("only op2 exists in the octonionic family")
    return SpaceKind(family, d + 1)


def _unit(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape[-1] != 2:
        raise DomainError("points must be vectors in the plane")
    if np.any(np.abs(np.linalg.norm(v, axis=-1) - 1.0) > 1e-12):
        raise DomainError("points must be unit vectors (tolerance 1e-12)")
    return v


def _dot(x: np.ndarray, y: np.ndarray):
    return np.sum(x * y, axis=-1)


def _cross(x: np.ndarray, y: np.ndarray):
    return x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0]


# Both metrics are evaluated through atan2, which equals the arccos forms
# below exactly in real arithmetic but keeps full relative accuracy for
# nearby points.

def distance_s1(x, y):
    """Geodesic distance arccos(x . y) on the unit circle; accepts stacked points."""
    x, y = _unit(x), _unit(y)
    d = np.arctan2(np.abs(_cross(x, y)), _dot(x, y))
    return float(d) if np.ndim(d) == 0 else d


def distance_rp1(x, y):
    """Distance arccos(2 (x . y)^2 - 1) = 2 arccos|x . y| on the real projective line."""
    x, y = _unit(x), _unit(y)
    d = 2.0 * np.arctan2(np.abs(_cross(x, y)), np.abs(_dot(x, y)))
    return float(d) if np.ndim(d) == 0 else d


def rotate(x, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    v = np.asarray(x, dtype=float)
    return np.stack([c * v[..., 0] - s * v[..., 1], s * v[..., 0] + c * v[..., 1]], axis=-1)
