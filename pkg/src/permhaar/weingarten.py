"""Exact unitary Weingarten function for small orders.

Values are obtained by solving the group-algebra identity

    sum_tau N^{#(sigma tau^-1)} Wg_N(tau) = [sigma == id]

over the rationals.  Because ``Wg_N`` is a class function the system is
reduced to one unknown per integer partition of ``n``.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .combinatorics import (
    CycleType,
    Pairing,
    catalan,
    compose,
    cycle_type,
    inverse,
    join,
)
from .errors import DomainError, ResourceGuardError, SingularSystemError

__all__ = [
    "ExactRational",
    "WeingartenTable",
    "LeadingTerm",
    "MAX_ORDER",
    "integer_partitions",
    "solve_rational",
    "wg_table",
    "wg_permutation_level",
    "wg_value",
    "pair_cycle_type",
    "wg_pair",
    "wg_leading",
    "haar_entry_moment",
]

ExactRational = Fraction
MAX_ORDER = 6


def integer_partitions(n: int) -> list[CycleType]:
    """Partitions of ``n`` in reverse lexicographic order, ``[n]`` first."""
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(CycleType(tuple(acc)))
            return
        for part in range(min(rest, cap), 0, -1):
            rec(rest - part, part, acc + [part])

    rec(n, n, [])
    return out


def solve_rational(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over :class:`~fractions.Fraction`.

    Raises :class:`SingularSystemError` when no unique solution exists.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularSystemError(f"matrix is singular (no pivot in column {col})")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n] for row in a]


@dataclass(frozen=True)
class WeingartenTable:
    """``Wg_N`` on ``S_n`` keyed by cycle type."""

    n: int
    N: int
    values: dict = field(hash=False)

    def __getitem__(self, ct) -> Fraction:
        if not isinstance(ct, CycleType):
            ct = CycleType(tuple(ct))
        return self.values[ct]

    def to_json(self) -> dict[str, str]:
        return {ct.key(): _frac_str(v) for ct, v in sorted(self.values.items(), key=lambda kv: kv[0].parts)}


@dataclass(frozen=True)
class LeadingTerm:
    """First term ``coefficient * N**exponent`` of the large-N expansion."""

    exponent: int
    coefficient: Fraction


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _class_system(n: int, N: int):
    classes = integer_partitions(n)
    index = {ct: k for k, ct in enumerate(classes)}
    reps = {}
    for perm in itertools.permutations(range(n)):
        reps.setdefault(cycle_type(perm), perm)
    perms = list(itertools.permutations(range(n)))
    types = [index[cycle_type(t)] for t in perms]
    inv = [inverse(t) for t in perms]
    gram = []
    for ct in classes:
        sigma = reps[ct]
        row = [0] * len(classes)
        for t_type, t_inv in zip(types, inv):
            row[t_type] += N ** len(cycle_type(compose(sigma, t_inv)).parts)
        gram.append(row)
    rhs = [1 if ct.parts == (1,) * n else 0 for ct in classes]
    return classes, gram, rhs


_CACHE: dict[tuple[int, int], WeingartenTable] = {}
_LOCK = threading.Lock()


def wg_table(n: int, N: int) -> WeingartenTable:
    """Exact table of ``Wg_N`` on ``S_n`` (cached, immutable)."""
    if n < 1:
        raise DomainError(f"order must be positive, got {n}")
    if n > MAX_ORDER:
        raise ResourceGuardError(f"order {n} exceeds guard {MAX_ORDER}")
    if N < n:
        raise SingularSystemError(f"the Gram system is singular for N={N} < n={n}")
    key = (n, N)
    with _LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    classes, gram, rhs = _class_system(n, N)
    sol = solve_rational(gram, rhs)
    table = WeingartenTable(n, N, dict(zip(classes, sol)))
    with _LOCK:
        _CACHE.setdefault(key, table)
    return _CACHE[key]


def wg_permutation_level(n: int, N: int) -> dict[tuple[int, ...], Fraction]:
    """Solve the unreduced ``n! x n!`` system; one unknown per permutation.

    Only meant for small ``n`` (it is used to check class-function structure).
    """
    if n > 4:
        raise ResourceGuardError("the permutation-level solver is limited to n <= 4")
    if N < n:
        raise SingularSystemError(f"the Gram system is singular for N={N} < n={n}")
    perms = list(itertools.permutations(range(n)))
    ident = tuple(range(n))
    gram = [[N ** len(cycle_type(compose(s, inverse(t))).parts) for t in perms] for s in perms]
    rhs = [1 if s == ident else 0 for s in perms]
    return dict(zip(perms, solve_rational(gram, rhs)))


def wg_value(perm: Sequence[int], N: int) -> Fraction:
    return wg_table(len(perm), N)[cycle_type(perm)]


def pair_cycle_type(p: Pairing, q: Pairing) -> CycleType:
    """Half block sizes of ``p v q``."""
    return CycleType(tuple(len(b) // 2 for b in join(p, q).blocks))


def wg_pair(p: Pairing, q: Pairing, N: int) -> Fraction:
    ct = pair_cycle_type(p, q)
    return wg_table(ct.n, N)[ct]


def wg_leading(p: Pairing, q: Pairing) -> LeadingTerm:
    blocks = join(p, q).blocks
    coeff = Fraction(1)
    for b in blocks:
        m = len(b) // 2 - 1
        coeff *= (-1) ** m * catalan(m)
    return LeadingTerm(-p.n2 + len(blocks), coeff)


def haar_entry_moment(rows: Sequence[int], cols: Sequence[int],
                      crows: Sequence[int], ccols: Sequence[int], N: int) -> Fraction:
    """``E(u_{r1 c1} ... u_{rn cn} conj(u_{r'1 c'1}) ... conj(u_{r'n c'n}))``.

    Direct double sum over ``sigma, tau`` in ``S_n`` with kernel
    ``Wg_N(sigma^-1 tau)``; no pairings involved.
    """
    n = len(rows)
    if not (len(cols) == n and len(crows) == len(ccols)):
        raise DomainError("index lists have inconsistent lengths")
    if len(crows) != n:
        return Fraction(0)
    if n == 0:
        return Fraction(1)
    table = wg_table(n, N)
    perms = list(itertools.permutations(range(n)))
    row_ok = [s for s in perms if all(rows[k] == crows[s[k]] for k in range(n))]
    col_ok = [t for t in perms if all(cols[k] == ccols[t[k]] for k in range(n))]
    total = Fraction(0)
    for s in row_ok:
        s_inv = inverse(s)
        for t in col_ok:
            total += table[cycle_type(compose(s_inv, t))]
    return total
