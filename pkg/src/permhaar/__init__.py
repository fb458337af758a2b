"""Moments of entry-permuted Haar unitary matrices.

Exact finite-N moments through the unitary Weingarten calculus, large-N
predictions from free probability, permutation statistics and seeded
Monte Carlo estimators.
"""
__version__ = "0.1.0"

from .errors import DomainError, PermHaarError, ResourceGuardError, SingularSystemError
from .combinatorics import CycleType, EpsilonWord, Pairing, SetPartition
from .weingarten import WeingartenTable, wg_pair, wg_table
from .permutations import EntryPermutation, make_permutation, perm_stats
from .exact_moments import Word, exact_mixed_moment
from .limits import FreeFamily, RDiagonalSpec, circular_star_moment, mixed_moment_limit
from .montecarlo import estimate_moment, sample_haar
from . import kernels

__all__ = [
    "__version__",
    "PermHaarError",
    "DomainError",
    "ResourceGuardError",
    "SingularSystemError",
    "CycleType",
    "EpsilonWord",
    "Pairing",
    "SetPartition",
    "WeingartenTable",
    "wg_table",
    "wg_pair",
    "EntryPermutation",
    "make_permutation",
    "perm_stats",
    "Word",
    "exact_mixed_moment",
    "RDiagonalSpec",
    "FreeFamily",
    "circular_star_moment",
    "mixed_moment_limit",
    "estimate_moment",
    "sample_haar",
    "kernels",
]
