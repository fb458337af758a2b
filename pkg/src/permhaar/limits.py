"""Large-N limits: *-moments of free R-diagonal families.

Moments are assembled from free cumulants through the moment-cumulant sum
over non-crossing partitions.  A block contributes a non-zero cumulant only
when all of its letters carry one label and its star pattern, read in
increasing position order, alternates with even length; the value is then
the member's determining sequence at half the block size.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .combinatorics import LIMITS, EpsilonWord, SetPartition, _nc_interval, catalan, enumerate_nc2_eps
from .errors import DomainError, ResourceGuardError

__all__ = [
    "RDiagonalSpec",
    "FreeFamily",
    "NCTerm",
    "circular_star_moment",
    "free_cumulant_word",
    "mixed_moment_limit",
    "mixed_moment_terms",
    "haar_moment",
    "parse_spec",
]

_KINDS = ("circular", "haar_unitary", "scaled_haar_sum")


@dataclass(frozen=True)
class RDiagonalSpec:
    """R-diagonal element described by its alternating cumulants.

    ``kind`` is ``"circular"``, ``"haar_unitary"`` or ``"scaled_haar_sum"``;
    the last takes a positive integer ``b`` and interpolates between the
    Haar unitary (``b = 1``) and the circular element (``b -> oo``).
    """

    kind: str
    b: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown R-diagonal kind {self.kind!r}")
        if self.kind == "scaled_haar_sum":
            if not isinstance(self.b, int) or self.b < 1:
                raise DomainError(f"scaled_haar_sum needs a positive integer b, got {self.b!r}")
        elif self.b is not None:
            raise DomainError(f"{self.kind} takes no parameter")

    def determining_sequence(self, n: int) -> Fraction:
        """Alternating cumulant ``kappa_2n(a*, a, ..., a*, a)``."""
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        if self.kind == "circular":
            return Fraction(1 if n == 1 else 0)
        value = Fraction((-1) ** (n - 1) * catalan(n - 1))
        if self.kind == "scaled_haar_sum":
            value *= Fraction(1, self.b ** (2 * n - 2))
        return value

    def __str__(self):
        if self.kind == "scaled_haar_sum":
            return f"scaled-haar-sum:{self.b}"
        return self.kind.replace("_", "-")


def parse_spec(text: str) -> RDiagonalSpec:
    """``circular``, ``haar-unitary`` or ``scaled-haar-sum:B``."""
    name, _, arg = text.strip().partition(":")
    kind = name.replace("-", "_")
    if kind == "scaled_haar_sum":
        try:
            return RDiagonalSpec(kind, int(arg))
        except ValueError:
            raise DomainError(f"scaled-haar-sum needs an integer parameter, got {arg!r}") from None
    if arg:
        raise DomainError(f"{name} takes no parameter")
    return RDiagonalSpec(kind)


@dataclass(frozen=True)
class FreeFamily:
    """Mutually free R-diagonal elements indexed by label."""

    members: Mapping[str, RDiagonalSpec] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "members", dict(self.members))

    def __getitem__(self, label: str) -> RDiagonalSpec:
        try:
            return self.members[label]
        except KeyError:
            raise DomainError(f"label {label!r} is not a member of the family") from None


@dataclass(frozen=True)
class NCTerm:
    partition: SetPartition
    value: Fraction

    def to_json(self) -> dict:
        return {"partition": str(self.partition), "value": _frac_str(self.value)}


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def circular_star_moment(eps: EpsilonWord | str) -> int:
    """``|NC2^eps|``: the *-moment of a circular element."""
    if not isinstance(eps, EpsilonWord):
        eps = EpsilonWord.parse(eps)
    if len(eps) % 2:
        raise DomainError("circular *-moments are defined here for even lengths")
    return len(enumerate_nc2_eps(eps))


def _alternates(stars: Sequence[bool]) -> bool:
    return len(stars) % 2 == 0 and all(stars[k] != stars[k + 1] for k in range(len(stars) - 1))


def free_cumulant_word(spec: RDiagonalSpec, pattern: EpsilonWord | str) -> Fraction:
    """Free cumulant of one element along a star pattern."""
    if not isinstance(pattern, EpsilonWord):
        pattern = EpsilonWord.parse(pattern)
    stars = pattern.stars
    if not stars or not _alternates(stars):
        return Fraction(0)
    return spec.determining_sequence(len(stars) // 2)


def _normalize(word) -> list[tuple[str, bool]]:
    if isinstance(word, str):
        out = []
        for tok in word.split():
            label, _, flag = tok.partition(":")
            if flag not in ("", "1", "*"):
                raise DomainError(f"bad star flag in word token {tok!r}")
            out.append((label, flag == "*"))
        return out
    return [(str(a), bool(b)) for a, b in word]


def _terms(word, family: FreeFamily):
    letters = _normalize(word)
    n = len(letters)
    if n > LIMITS["nc"]:
        raise ResourceGuardError(f"word length {n} exceeds the non-crossing guard {LIMITS['nc']}")
    for label, _ in letters:
        family[label]
    cache: dict[tuple[int, ...], Fraction] = {}

    def block_value(block):
        hit = cache.get(block)
        if hit is None:
            labels = {letters[k][0] for k in block}
            if len(labels) != 1:
                hit = Fraction(0)
            else:
                stars = [letters[k][1] for k in block]
                hit = Fraction(0)
                if _alternates(stars):
                    hit = family[labels.pop()].determining_sequence(len(block) // 2)
            cache[block] = hit
        return hit

    for blocks in _nc_interval(n):
        value = Fraction(1)
        for b in blocks:
            v = block_value(b)
            if not v:
                value = Fraction(0)
                break
            value *= v
        if value:
            yield blocks, value


def mixed_moment_limit(word, family: FreeFamily) -> Fraction:
    """Limit ``phi`` of a word in a free family.

    ``word`` is a sequence of ``(label, starred)`` pairs or a string such as
    ``"u:1 c:1 u:* c:*"``.  The empty word has moment 1.
    """
    total = Fraction(0)
    for _, value in _terms(word, family):
        total += value
    return total


def mixed_moment_terms(word, family: FreeFamily) -> list[NCTerm]:
    """Non-zero partition contributions, in enumeration order."""
    n = len(_normalize(word))
    return [NCTerm(SetPartition.from_blocks(blocks, n), value) for blocks, value in _terms(word, family)]


def haar_moment(k: int) -> int:
    """``phi(u^k)`` for a Haar unitary ``u``."""
    return 1 if k == 0 else 0
