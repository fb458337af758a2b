"""Pairings, set partitions and non-crossing structure.

Everything here is 0-based internally.  The string forms (``str(p)``) and the
parsers used by the command line are 1-based, matching the usual cycle
notation ``{(1,2),(3,4)}``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DomainError, ResourceGuardError

__all__ = [
    "LIMITS",
    "SetPartition",
    "Pairing",
    "EpsilonWord",
    "CycleType",
    "enumerate_pairings",
    "enumerate_eps_pairings",
    "join",
    "is_noncrossing",
    "enumerate_nc",
    "enumerate_nc2",
    "enumerate_nc2_eps",
    "psi_bijection",
    "catalan",
    "cycles",
    "cycle_type",
    "compose",
    "inverse",
]

#: Enumeration guards; callers may raise them for one-off runs.
LIMITS = {"pairings": 16, "nc": 12}


@dataclass(frozen=True, order=True)
class SetPartition:
    """A partition of ``range(n)`` in canonical form.

    Blocks are sorted tuples, ordered by their minimum element, so two
    partitions compare equal iff they have the same blocks.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = sorted(x for b in self.blocks for x in b)
        if self.n < 1 or seen != list(range(self.n)) or any(not b for b in self.blocks):
            raise DomainError(f"blocks {self.blocks!r} do not partition range({self.n})")
        canon = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", canon)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "SetPartition":
        blocks = tuple(tuple(b) for b in blocks)
        if n is None:
            n = sum(len(b) for b in blocks)
        return cls(n, blocks)

    def __len__(self):
        return len(self.blocks)

    def block_of(self) -> list[int]:
        """Map each element to the index of its block."""
        owner = [0] * self.n
        for idx, b in enumerate(self.blocks):
            for x in b:
                owner[x] = idx
        return owner

    def __str__(self):
        return "{" + ",".join("(" + ",".join(str(x + 1) for x in b) + ")" for b in self.blocks) + "}"


@dataclass(frozen=True)
class Pairing:
    """Fixed-point-free involution on ``range(n2)``, stored as a partner array."""

    partner: tuple[int, ...]

    def __post_init__(self):
        p = self.partner
        n2 = len(p)
        if n2 == 0 or n2 % 2:
            raise DomainError(f"a pairing needs an even, positive ground set (got {n2})")
        for s, t in enumerate(p):
            if not 0 <= t < n2 or t == s or p[t] != s:
                raise DomainError(f"{p!r} is not a fixed-point-free involution")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], n2: int | None = None) -> "Pairing":
        pairs = list(pairs)
        if n2 is None:
            n2 = 2 * len(pairs)
        partner = [-1] * n2
        for a, b in pairs:
            partner[a] = b
            partner[b] = a
        return cls(tuple(partner))

    @property
    def n2(self) -> int:
        return len(self.partner)

    def pairs(self) -> list[tuple[int, int]]:
        return [(s, t) for s, t in enumerate(self.partner) if s < t]

    def as_partition(self) -> SetPartition:
        return SetPartition(self.n2, tuple(self.pairs()))

    def __call__(self, s: int) -> int:
        return self.partner[s]

    def __str__(self):
        return "{" + ",".join(f"({a + 1},{b + 1})" for a, b in self.pairs()) + "}"


@dataclass(frozen=True)
class EpsilonWord:
    """A word over ``{1, *}``; ``stars[s]`` is True for a starred letter."""

    stars: tuple[bool, ...]

    @classmethod
    def parse(cls, text: str | Sequence) -> "EpsilonWord":
        """Accept ``"1*1*"``, ``"1 * 1 *"`` or a sequence of ``'1'``/``'*'``/bools."""
        if isinstance(text, str):
            text = [c for c in text if not c.isspace() and c != ","]
        out = []
        for c in text:
            if isinstance(c, bool):
                out.append(c)
            elif c in ("*", "star"):
                out.append(True)
            elif c in ("1", 1, "one"):
                out.append(False)
            else:
                raise DomainError(f"bad epsilon letter {c!r}")
        return cls(tuple(out))

    def __len__(self):
        return len(self.stars)

    @property
    def balanced(self) -> bool:
        return 2 * sum(self.stars) == len(self.stars)

    def __str__(self):
        return "".join("*" if s else "1" for s in self.stars)


@dataclass(frozen=True, order=True)
class CycleType:
    """An integer partition, parts sorted in decreasing order."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if any(x < 1 for x in self.parts):
            raise DomainError(f"cycle type parts must be positive: {self.parts!r}")
        object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))

    @property
    def n(self) -> int:
        return sum(self.parts)

    def key(self) -> str:
        return "[" + ",".join(map(str, self.parts)) + "]"

    def __str__(self):
        return self.key()


def _guard(name: str, value: int):
    if value > LIMITS[name]:
        raise ResourceGuardError(f"{name} enumeration size {value} exceeds guard {LIMITS[name]}")


def enumerate_pairings(n2: int) -> list[Pairing]:
    """All ``(n2-1)!!`` pairings of ``range(n2)`` in lexicographic order."""
    if n2 <= 0 or n2 % 2:
        raise DomainError(f"pairings need an even positive size, got {n2}")
    _guard("pairings", n2)
    out = []
    partner = [-1] * n2

    def rec():
        try:
            a = partner.index(-1)
        except ValueError:
            out.append(Pairing(tuple(partner)))
            return
        for b in range(a + 1, n2):
            if partner[b] == -1:
                partner[a], partner[b] = b, a
                rec()
                partner[a] = partner[b] = -1

    rec()
    return out


def enumerate_eps_pairings(eps: EpsilonWord) -> list[Pairing]:
    """Pairings matching every unstarred letter with a starred one.

    Returns an empty list for an unbalanced (or odd) word.
    """
    if not isinstance(eps, EpsilonWord):
        eps = EpsilonWord.parse(eps)
    if not eps.balanced or len(eps) == 0:
        return []
    _guard("pairings", len(eps))
    st = eps.stars
    n2 = len(st)
    out = []
    partner = [-1] * n2

    def rec():
        try:
            a = partner.index(-1)
        except ValueError:
            out.append(Pairing(tuple(partner)))
            return
        for b in range(a + 1, n2):
            if partner[b] == -1 and st[b] != st[a]:
                partner[a], partner[b] = b, a
                rec()
                partner[a] = partner[b] = -1

    rec()
    return out


def join(p: Pairing, q: Pairing) -> SetPartition:
    """Orbits of the alternating walk ``a -> p(a) -> q(p(a)) -> ...``."""
    if p.n2 != q.n2:
        raise DomainError(f"pairings live on different ground sets ({p.n2} vs {q.n2})")
    n2 = p.n2
    seen = [False] * n2
    blocks = []
    for start in range(n2):
        if seen[start]:
            continue
        block = []
        a = start
        while not seen[a]:
            seen[a] = True
            b = p.partner[a]
            seen[b] = True
            block += [a, b]
            a = q.partner[b]
        blocks.append(tuple(block))
    return SetPartition(n2, tuple(blocks))


def is_noncrossing(pi: SetPartition) -> bool:
    owner = pi.block_of()
    # a partition is non-crossing iff, scanning left to right, every block
    # closes before any block opened after it is resumed (stack discipline)
    last = {}
    for x in range(pi.n):
        last[owner[x]] = x
    stack: list[int] = []
    for x in range(pi.n):
        b = owner[x]
        if stack and stack[-1] == b:
            pass
        elif b in stack:
            return False
        else:
            stack.append(b)
        if last[b] == x:
            stack.pop()
    return True


@lru_cache(maxsize=None)
def _nc_interval(length: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Non-crossing partitions of ``range(length)`` as raw block tuples.

    The block holding 0 is grown left to right; each gap it skips over and
    the tail after its last element are independent smaller intervals.
    """
    if length == 0:
        return ((),)

    def shift(blocks, by):
        return tuple(tuple(x + by for x in b) for b in blocks)

    def grow(block, last):
        res = []
        for tail in _nc_interval(length - last - 1):
            res.append((tuple(block),) + shift(tail, last + 1))
        for nxt in range(last + 1, length):
            for inner in _nc_interval(nxt - last - 1):
                inner = shift(inner, last + 1)
                for rest in grow(block + [nxt], nxt):
                    res.append(rest[:1] + inner + rest[1:])
        return res

    return tuple(grow([0], 0))


def enumerate_nc(n: int) -> list[SetPartition]:
    """All non-crossing partitions of ``range(n)``; there are ``catalan(n)``."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    _guard("nc", n)
    return sorted(SetPartition(n, blocks) for blocks in _nc_interval(n))


def _nc2(n2: int, allowed=None) -> list[Pairing]:
    out = []
    partner = [-1] * n2

    def rec(lo, hi):
        # fills [lo, hi) and yields via callback chain
        if lo == hi:
            yield
            return
        for m in range(lo + 1, hi, 2):
            if allowed is not None and not allowed(lo, m):
                continue
            partner[lo], partner[m] = m, lo
            for _ in rec(lo + 1, m):
                for _ in rec(m + 1, hi):
                    yield
            partner[lo] = partner[m] = -1

    for _ in rec(0, n2):
        out.append(Pairing(tuple(partner)))
    return sorted(out, key=lambda p: p.partner)


def enumerate_nc2(n2: int) -> list[Pairing]:
    """Non-crossing pairings of ``range(n2)``."""
    if n2 <= 0 or n2 % 2:
        raise DomainError(f"pairings need an even positive size, got {n2}")
    _guard("pairings", n2)
    return _nc2(n2)


def enumerate_nc2_eps(eps: EpsilonWord) -> list[Pairing]:
    """Non-crossing pairings whose every pair joins a ``1`` with a ``*``."""
    if not isinstance(eps, EpsilonWord):
        eps = EpsilonWord.parse(eps)
    if len(eps) == 0 or not eps.balanced:
        return []
    _guard("pairings", len(eps))
    st = eps.stars
    return _nc2(len(st), allowed=lambda a, b: st[a] != st[b])


def psi_bijection(sigma: Sequence[int]) -> Pairing:
    """Pairing ``t <-> n + sigma(t)`` on ``range(2n)`` for ``sigma`` in S_n."""
    n = len(sigma)
    if sorted(sigma) != list(range(n)):
        raise DomainError(f"{sigma!r} is not a permutation of range({n})")
    return Pairing.from_pairs(((t, n + s) for t, s in enumerate(sigma)), 2 * n)


def catalan(k: int) -> int:
    if k < 0:
        raise DomainError(f"catalan index must be non-negative, got {k}")
    return math.comb(2 * k, k) // (k + 1)


def cycles(perm: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    out = []
    for s in range(len(perm)):
        if not seen[s]:
            c = []
            t = s
            while not seen[t]:
                seen[t] = True
                c.append(t)
                t = perm[t]
            out.append(tuple(c))
    return out


def cycle_type(perm: Sequence[int]) -> CycleType:
    return CycleType(tuple(len(c) for c in cycles(perm)))


def compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """``(a o b)(x) = a(b(x))``."""
    return tuple(a[x] for x in b)


def inverse(a: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(a)
    for x, y in enumerate(a):
        inv[y] = x
    return tuple(inv)


def permutations_of(n: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n)))
