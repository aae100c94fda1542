"""Certified density bounds for sets avoiding several distances on compact
rank-one symmetric spaces, and the dimension-one counterexample."""

from .errors import ConstructionError, ConvergenceError, DomainError
from .jacobi import JacobiParams
from .spaces import Family, SpaceKind, parse_space, params_of
from .steinhaus import find_lemma_constants, generate_distances, build_certificate, run_bound

__all__ = [
    "ConstructionError",
    "ConvergenceError",
    "DomainError",
    "Family",
    "JacobiParams",
    "SpaceKind",
    "build_certificate",
    "find_lemma_constants",
    "generate_distances",
    "params_of",
    "parse_space",
    "run_bound",
]
__version__ = "0.1.0"
