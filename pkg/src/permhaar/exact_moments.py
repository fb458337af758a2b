"""Exact finite-N mixed moments of permuted Haar unitaries.

For a word ``W = U^(s1,e1) ... U^(s2n,e2n)`` the normalised expected trace is

    E tr(W) = sum_{p, q in P2^eps(2n)} Wg_N(p, q) * |A(p, q)| / N,

where ``A(p, q)`` is the set of cyclic index tuples whose transformed entry
coordinates agree along the pairs of ``p`` (rows) and ``q`` (columns).
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .combinatorics import EpsilonWord, Pairing, compose, cycle_type, enumerate_eps_pairings, inverse, join
from .errors import DomainError, ResourceGuardError
from .permutations import EntryPermutation, identity, make_permutation, parse_family
from .weingarten import wg_pair, wg_table

__all__ = [
    "DEFAULT_BUDGET",
    "Word",
    "TermValue",
    "count_A",
    "count_A_bruteforce",
    "exact_mixed_moment",
    "term_values",
    "reindex_check",
    "permutation_form_moment",
]

#: Upper bound on enumerated index tuples per (p, q) term.
DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class Word:
    """Sequence of ``(tag, starred)`` letters and a binding of tags to permutations.

    Binding values are :class:`EntryPermutation` objects or family
    descriptors such as ``"partial-transpose:2,2"``; descriptors are resolved
    at evaluation time for the requested ``N``.  The tag ``id`` always means
    the unpermuted matrix.
    """

    letters: tuple[tuple[str, bool], ...]
    binding: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str, binding: Mapping[str, object] | None = None) -> "Word":
        """Parse ``"s:1 s:* t:1 t:*"``; a bare tag means an unstarred letter."""
        letters = []
        for tok in text.split():
            tag, _, flag = tok.partition(":")
            if not tag:
                raise DomainError(f"empty tag in word token {tok!r}")
            if flag in ("", "1"):
                letters.append((tag, False))
            elif flag == "*":
                letters.append((tag, True))
            else:
                raise DomainError(f"bad star flag in word token {tok!r}")
        binding = dict(binding or {})
        if "id" in binding:
            raise DomainError("'id' is reserved for the unpermuted matrix")
        return cls(tuple(letters), binding)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(f"{t}:{'*' if s else '1'}" for t, s in self.letters)

    @property
    def eps(self) -> EpsilonWord:
        return EpsilonWord(tuple(s for _, s in self.letters))

    @property
    def balanced(self) -> bool:
        return self.eps.balanced

    def resolve(self, N: int) -> list[EntryPermutation]:
        """Permutation of each letter at size ``N``."""
        cache: dict[str, EntryPermutation] = {}
        out = []
        for tag, _ in self.letters:
            if tag not in cache:
                cache[tag] = _resolve_one(tag, self.binding.get(tag), N)
            out.append(cache[tag])
        return out


def _resolve_one(tag, value, N):
    if tag == "id":
        return identity(N)
    if value is None:
        raise DomainError(f"tag {tag!r} is not bound to a permutation")
    if isinstance(value, EntryPermutation):
        perm = value
    else:
        family, params = parse_family(str(value))
        perm = make_permutation(family, N, **params)
    if perm.N != N:
        raise DomainError(f"tag {tag!r} is bound to a permutation of size {perm.N}, not {N}")
    return perm


@dataclass(frozen=True)
class TermValue:
    p: Pairing
    q: Pairing
    countA: int
    wg: Fraction
    value: Fraction

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "q": str(self.q),
            "join_blocks": str(join(self.p, self.q)),
            "countA": self.countA,
            "wg": f"{self.wg.numerator}/{self.wg.denominator}",
            "value": f"{self.value.numerator}/{self.value.denominator}",
        }


def _cell_tables(word: Word, N: int):
    """Row/column of the ``U`` entry read by each letter at each position."""
    perms = word.resolve(N)
    ck = np.empty((len(word), N, N), dtype=np.int64)
    cl = np.empty_like(ck)
    for s, (perm, (_, star)) in enumerate(zip(perms, word.letters)):
        cells = perm.map.reshape(N, N)
        if star:
            cells = cells.T
        ck[s], cl[s] = np.divmod(cells, N)
    return ck, cl


def _guard(word: Word, N: int, budget: int | None):
    budget = DEFAULT_BUDGET if budget is None else budget
    cost = N ** len(word)
    if cost > budget:
        raise ResourceGuardError(
            f"exact evaluation enumerates up to N^{len(word)} = {cost} index tuples per term, "
            f"over the budget of {budget}")


def count_A(p: Pairing, q: Pairing, word: Word, N: int, budget: int | None = None, _tables=None) -> int:
    """``|A(p, q)|`` by pruned depth-first enumeration of the cyclic indices."""
    if p.n2 != len(word) or q.n2 != len(word):
        raise DomainError("pairings and word have different lengths")
    _guard(word, N, budget)
    ck, cl = _tables if _tables is not None else _cell_tables(word, N)
    return int(kernels.count_a(ck, cl, np.asarray(p.partner), np.asarray(q.partner), N))


def _all_tuples(m: int, N: int) -> np.ndarray:
    return np.stack(np.unravel_index(np.arange(N**m), (N,) * m), axis=1) if m else np.zeros((1, 0), int)


def _coords(word: Word, N: int):
    """``k``, ``l`` arrays of shape ``(N^m, m)`` over every cyclic index tuple."""
    ck, cl = _cell_tables(word, N)
    m = len(word)
    idx = _all_tuples(m, N)
    nxt = np.roll(idx, -1, axis=1)
    s = np.arange(m)
    return ck[s, idx, nxt], cl[s, idx, nxt]


def count_A_bruteforce(p: Pairing, q: Pairing, word: Word, N: int) -> int:
    """Unpruned reference count over all ``N^m`` index tuples."""
    K, L = _coords(word, N)
    pp, qq = np.asarray(p.partner), np.asarray(q.partner)
    ok = (K == K[:, pp]).all(axis=1) & (L == L[:, qq]).all(axis=1)
    return int(ok.sum())


def term_values(word: Word, N: int, budget: int | None = None, threads: int = 1) -> list[TermValue]:
    """One :class:`TermValue` per ``(p, q)``, both ranging over ``P2^eps``.

    Order is the canonical pairing order, independent of ``threads``.
    """
    pairings = enumerate_eps_pairings(word.eps)
    if not pairings:
        return []
    _guard(word, N, budget)
    tables = _cell_tables(word, N)
    pairs = [(p, q) for p in pairings for q in pairings]

    def one(pq):
        p, q = pq
        c = count_A(p, q, word, N, budget, _tables=tables)
        w = wg_pair(p, q, N)
        return TermValue(p, q, c, w, w * c / N)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, pairs))
    return [one(pq) for pq in pairs]


def exact_mixed_moment(word: Word, N: int, budget: int | None = None, threads: int = 1) -> Fraction:
    """Exact ``E tr`` of the word at size ``N`` (zero when the word is unbalanced)."""
    if len(word) == 0:
        return Fraction(1)
    if len(word) % 2 or not word.balanced:
        return Fraction(0)
    total = Fraction(0)
    for t in term_values(word, N, budget, threads):
        total += t.value
    return total


def _rho(stars: Sequence[bool]) -> list[int]:
    """Position of each letter after grouping unstarred letters first."""
    n = len(stars) // 2
    ones = stars_seen = 0
    out = []
    for st in stars:
        if st:
            out.append(n + stars_seen)
            stars_seen += 1
        else:
            out.append(ones)
            ones += 1
    return out


def reindex_check(word: Word, N: int, max_tuples: int = 10**6) -> bool:
    """Compare the interleaved pairing sum with the grouped (conjugates last) form.

    Both sides are evaluated tuple by tuple; the grouped side conjugates each
    pairing by the regrouping map and uses pairings that send the first half
    to the second.
    """
    if not word.balanced or len(word) == 0:
        return True
    if N ** len(word) > max_tuples:
        raise ResourceGuardError(f"reindex check needs N^{len(word)} <= {max_tuples}")
    K, L = _coords(word, N)
    m = len(word)
    n = m // 2
    rho = _rho(word.eps.stars)
    rho_inv = inverse(rho)
    Kg, Lg = K[:, list(rho_inv)], L[:, list(rho_inv)]

    def masks(coords, pairings):
        return {p: (coords == coords[:, list(p.partner)]).all(axis=1) for p in pairings}

    interleaved = enumerate_eps_pairings(word.eps)
    lhs = Fraction(0)
    mk, ml = masks(K, interleaved), masks(L, interleaved)
    for p in interleaved:
        for q in interleaved:
            lhs += wg_pair(p, q, N) * int((mk[p] & ml[q]).sum())

    grouped = [Pairing.from_pairs(((t, n + s) for t, s in enumerate(perm)), m)
               for perm in itertools.permutations(range(n))]
    rhs = Fraction(0)
    gk, gl = masks(Kg, grouped), masks(Lg, grouped)
    for p in grouped:
        for q in grouped:
            rhs += wg_pair(p, q, N) * int((gk[p] & gl[q]).sum())

    # the regrouping map is a bijection P2^eps -> P2^delta preserving Wg
    conj = {Pairing.from_pairs(((rho[a], rho[b]) for a, b in p.pairs()), m) for p in interleaved}
    return lhs == rhs and conj == set(grouped)


def permutation_form_moment(word: Word, N: int, max_tuples: int = 10**6) -> Fraction:
    """Independent evaluation through the ``S_n x S_n`` Weingarten sum.

    Each index tuple contributes ``E(prod of entries)``, computed by matching
    unconjugated entries to conjugated ones with permutations ``sigma`` (rows)
    and ``tau`` (columns) weighted by ``Wg_N(sigma^-1 tau)``.
    """
    m = len(word)
    if m == 0:
        return Fraction(1)
    if m % 2 or not word.balanced:
        return Fraction(0)
    if N**m > max_tuples:
        raise ResourceGuardError(f"permutation-form oracle needs N^{m} <= {max_tuples}")
    n = m // 2
    K, L = _coords(word, N)
    stars = word.eps.stars
    plain = [s for s in range(m) if not stars[s]]
    conj = [s for s in range(m) if stars[s]]
    perms = list(itertools.permutations(range(n)))
    table = wg_table(n, N)
    row_ok = {s: np.all([K[:, plain[k]] == K[:, conj[s[k]]] for k in range(n)], axis=0) for s in perms}
    col_ok = {t: np.all([L[:, plain[k]] == L[:, conj[t[k]]] for k in range(n)], axis=0) for t in perms}
    total = Fraction(0)
    for s in perms:
        s_inv = inverse(s)
        for t in perms:
            hits = int((row_ok[s] & col_ok[t]).sum())
            if hits:
                total += hits * table[cycle_type(compose(s_inv, t))]
    return total / N
