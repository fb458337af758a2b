"""Entry permutations of square matrices and their row/column statistics.

A permutation ``sigma`` of the cells of an ``N x N`` matrix acts by
``A^sigma[i, j] = A[sigma(i, j)]``.  Cells are encoded row-major,
``(i, j) <-> i*N + j`` (0-based).

Counting conventions
--------------------
``X`` and ``Y`` are counts of triples ``(i, j, k)`` for which an entry lands in
one of two target positions.  Two readings are supported:

``"multiset"``
    the two target conditions are counted separately and added, i.e. a
    triple meeting both counts twice.  This reproduces the closed forms
    ``Y1(Gamma_bd, Gamma_bd) = b^3 d^3 (1/b + 1/d)`` and
    ``Y1(m_N, m_N) = 2 N^5``, and ``X(sigma, id) = sum_i a_i + b_i``.
``"set"``
    literal set membership; a triple meeting both conditions counts once.
    Gives ``X(id, id) = N(2N - 1)`` and ``Y(id, id) = 2 N^3``.

``Z`` is a sum of two quadruple counts and has no such ambiguity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import kernels
from .errors import DomainError

__all__ = [
    "EntryPermutation",
    "PermStats",
    "ConditionReport",
    "FAMILIES",
    "identity",
    "transpose",
    "partial_transpose",
    "mixing_map",
    "row_shift",
    "uniform_random",
    "make_permutation",
    "parse_family",
    "family_at_size",
    "apply",
    "stat_X",
    "stat_Y",
    "stat_Z",
    "perm_stats",
    "brute_X",
    "brute_Y",
    "brute_Z",
    "condition_report",
]

Convention = Literal["multiset", "set"]
DEFAULT_CONVENTION: Convention = "multiset"


@dataclass(frozen=True, eq=False)
class EntryPermutation:
    """Bijection of the ``N*N`` cells; ``map[c]`` is the image of cell ``c``."""

    N: int
    map: np.ndarray = field(repr=False)
    tag: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.ascontiguousarray(self.map, dtype=np.int64)
        if m.shape != (self.N * self.N,):
            raise DomainError(f"map must have length N*N={self.N * self.N}, got shape {m.shape}")
        seen = np.zeros(self.N * self.N, dtype=bool)
        if m.min(initial=0) < 0 or m.max(initial=0) >= self.N * self.N:
            raise DomainError("map entries out of range")
        seen[m] = True
        if not seen.all():
            raise DomainError("map is not a bijection of the cells")
        m.setflags(write=False)
        object.__setattr__(self, "map", m)
        object.__setattr__(self, "_hash", hash((self.N, m.tobytes())))

    def __eq__(self, other):
        return isinstance(other, EntryPermutation) and self.N == other.N and np.array_equal(self.map, other.map)

    def __hash__(self):
        return self._hash

    def __call__(self, i: int, j: int) -> tuple[int, int]:
        return divmod(int(self.map[i * self.N + j]), self.N)

    @property
    def rows(self) -> np.ndarray:
        """``pi_1 o sigma`` as an ``N x N`` array."""
        return (self.map // self.N).reshape(self.N, self.N)

    @property
    def cols(self) -> np.ndarray:
        """``pi_2 o sigma`` as an ``N x N`` array."""
        return (self.map % self.N).reshape(self.N, self.N)

    def compose(self, other: "EntryPermutation") -> "EntryPermutation":
        """``self o other``."""
        if other.N != self.N:
            raise DomainError("size mismatch")
        return EntryPermutation(self.N, self.map[other.map], "composite")

    def inverse(self) -> "EntryPermutation":
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(self.N * self.N)
        return EntryPermutation(self.N, inv, f"inverse({self.tag})")

    def power(self, k: int) -> "EntryPermutation":
        out = identity(self.N)
        for _ in range(k):
            out = self.compose(out)
        return out

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.map, np.arange(self.N * self.N)))

    def descriptor(self) -> str:
        if self.tag == "partial-transpose":
            return f"partial-transpose:{self.params['b']},{self.params['d']}"
        if self.tag == "mixing":
            return f"mixing:{self.params['m']}"
        if self.tag == "random":
            return f"random:{self.params['seed']}"
        return self.tag

    def to_json(self) -> str:
        """1-based cell images, ``[sigma(1), ..., sigma(N^2)]``."""
        return json.dumps((self.map + 1).tolist())

    @classmethod
    def from_json(cls, text: str, tag: str = "custom") -> "EntryPermutation":
        cells = np.asarray(json.loads(text), dtype=np.int64) - 1
        N = math.isqrt(len(cells))
        if N * N != len(cells):
            raise DomainError(f"{len(cells)} cells do not form a square matrix")
        return cls(N, cells, tag)


def _grid(N):
    i, j = np.divmod(np.arange(N * N, dtype=np.int64), N)
    return i, j


def identity(N: int) -> EntryPermutation:
    return EntryPermutation(N, np.arange(N * N), "identity")


def transpose(N: int) -> EntryPermutation:
    i, j = _grid(N)
    return EntryPermutation(N, j * N + i, "transpose")


def partial_transpose(b: int, d: int) -> EntryPermutation:
    """Transpose each ``d x d`` block of a ``b x b`` block matrix in place."""
    if b < 1 or d < 1:
        raise DomainError(f"block parameters must be positive, got b={b}, d={d}")
    N = b * d
    i, j = _grid(N)
    a1, b1 = np.divmod(i, d)
    a2, b2 = np.divmod(j, d)
    return EntryPermutation(N, (a1 * d + b2) * N + (a2 * d + b1), "partial-transpose", {"b": b, "d": d})


def mixing_map(m: int) -> EntryPermutation:
    """Swap the two middle tensor indices, ``(a,b,c,d) -> (a,c,b,d)``, on ``m^2 x m^2``."""
    if m < 1:
        raise DomainError(f"mixing map needs m >= 1, got {m}")
    N = m * m
    i, j = _grid(N)
    a, b = np.divmod(i, m)
    c, d = np.divmod(j, m)
    return EntryPermutation(N, (a * m + c) * N + (b * m + d), "mixing", {"m": m})


def row_shift(N: int) -> EntryPermutation:
    """Shift row ``i`` circularly by ``i`` places to the right (0-based rows)."""
    i, j = _grid(N)
    return EntryPermutation(N, i * N + (j + i) % N, "row-shift")


def uniform_random(N: int, seed: int) -> EntryPermutation:
    """Uniform permutation of the cells by Fisher-Yates with a 64-bit seed."""
    rng = np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))
    n = N * N
    cells = np.arange(n, dtype=np.int64)
    if n > 1:
        # swap position k with a uniform position in [0, k], k = n-1 .. 1
        picks = rng.integers(0, np.arange(n, 1, -1, dtype=np.int64), dtype=np.int64)
        for k, r in zip(range(n - 1, 0, -1), picks.tolist()):
            cells[k], cells[r] = cells[r], cells[k]
    return EntryPermutation(N, cells, "random", {"seed": int(seed)})


FAMILIES = ("identity", "transpose", "partial-transpose", "mixing", "row-shift", "random")


def make_permutation(tag: str, N: int | None = None, **params) -> EntryPermutation:
    """Construct a permutation by family name.

    ``partial-transpose`` takes ``b`` and/or ``d`` (the missing one is
    ``N // given``); ``mixing`` takes ``m`` or a square ``N``; ``random``
    needs ``seed``.
    """
    tag = tag.replace("_", "-")
    if tag == "partial-transpose":
        b, d = params.get("b"), params.get("d")
        if b is None and d is None:
            if N is None or math.isqrt(N) ** 2 != N:
                raise DomainError(f"balanced partial transpose needs a square N, got {N}")
            b = d = math.isqrt(N)
        elif b is None or d is None:
            given = b if b is not None else d
            if N is None or N % given:
                raise DomainError(f"N={N} is not divisible by the block parameter {given}")
            b, d = (given, N // given) if b is not None else (N // given, given)
        if N is not None and N != b * d:
            raise DomainError(f"partial transpose needs N = b*d, got N={N}, b={b}, d={d}")
        return partial_transpose(int(b), int(d))
    if tag == "mixing":
        m = params.get("m")
        if m is None:
            if N is None or math.isqrt(N) ** 2 != N:
                raise DomainError(f"mixing map needs a perfect-square N, got {N}")
            m = math.isqrt(N)
        if N is not None and N != m * m:
            raise DomainError(f"mixing map with m={m} acts on size {m * m}, not {N}")
        return mixing_map(int(m))
    if N is None:
        raise DomainError(f"family {tag!r} needs a size N")
    if tag == "identity" or tag == "id":
        return identity(N)
    if tag == "transpose":
        return transpose(N)
    if tag == "row-shift":
        return row_shift(N)
    if tag == "random":
        if "seed" not in params:
            raise DomainError("random permutations need a seed")
        return uniform_random(N, params["seed"])
    raise DomainError(f"unknown permutation family {tag!r}; expected one of {FAMILIES}")


def parse_family(text: str) -> tuple[str, dict]:
    """Parse ``family[:params]``, e.g. ``partial-transpose:2,3``, ``mixing:3``, ``random:7``.

    ``partial-transpose:B`` fixes the number of blocks and leaves ``d`` to the size.
    """
    name, _, rest = text.strip().partition(":")
    name = name.strip().replace("_", "-")
    args = [a for a in rest.split(",") if a.strip()] if rest else []
    try:
        ints = [int(a) for a in args]
    except ValueError:
        raise DomainError(f"bad family parameters in {text!r}") from None
    if name == "partial-transpose":
        if len(ints) > 2:
            raise DomainError(f"partial-transpose takes b or b,d: {text!r}")
        return name, dict(zip(("b", "d"), ints))
    if name == "mixing":
        if len(ints) > 1:
            raise DomainError(f"mixing takes one parameter m: {text!r}")
        return name, ({"m": ints[0]} if ints else {})
    if name == "random":
        if len(ints) != 1:
            raise DomainError(f"random takes a seed: {text!r}")
        return name, {"seed": ints[0]}
    if name in ("identity", "id", "transpose", "row-shift"):
        if ints:
            raise DomainError(f"{name} takes no parameters: {text!r}")
        return ("identity" if name == "id" else name), {}
    raise DomainError(f"unknown permutation family {name!r}")


def family_at_size(tag: str, N: int, **params) -> EntryPermutation:
    """Member of a family at size ``N`` for size sweeps.

    For the partial transpose with both ``b`` and ``d`` given, the ratio
    ``b : d`` is kept and both are scaled by ``sqrt(N / (b d))``.
    """
    tag = tag.replace("_", "-")
    if tag == "partial-transpose" and params.get("b") and params.get("d"):
        b, d = params["b"], params["d"]
        scale = math.sqrt(N / (b * d))
        bs, ds = round(b * scale), round(d * scale)
        if bs * ds != N:
            raise DomainError(f"cannot scale partial transpose {b}:{d} to size {N}")
        return partial_transpose(bs, ds)
    if tag == "mixing":
        params = {k: v for k, v in params.items() if k != "m"}
    return make_permutation(tag, N, **params)


def apply(perm: EntryPermutation, matrix: np.ndarray) -> np.ndarray:
    """Return ``B`` with ``B[i, j] = A[perm(i, j)]``; works on stacks ``(..., N, N)``."""
    matrix = np.asarray(matrix)
    N = perm.N
    if matrix.shape[-2:] != (N, N):
        raise DomainError(f"matrix shape {matrix.shape} does not match permutation size {N}")
    flat = matrix.reshape(matrix.shape[:-2] + (N * N,))
    return flat[..., perm.map].reshape(matrix.shape)


# -- statistics ---------------------------------------------------------------


def _check(convention):
    if convention not in ("multiset", "set"):
        raise DomainError(f"convention must be 'multiset' or 'set', got {convention!r}")
    return convention == "set"


def _same_size(a: EntryPermutation, b: EntryPermutation):
    if a.N != b.N:
        raise DomainError(f"size mismatch: {a.N} vs {b.N}")


def stat_X(sigma: EntryPermutation, tau: EntryPermutation | None = None,
           convention: Convention = DEFAULT_CONVENTION) -> int:
    """Triples ``(i, j, k)`` with ``sigma(i,j)`` in ``{tau(i,k), tau(k,j)}``."""
    tau = identity(sigma.N) if tau is None else tau
    _same_size(sigma, tau)
    return int(kernels.stat_x(sigma.map, tau.map, sigma.N, _check(convention)))


def stat_Y(sigma: EntryPermutation, mu: EntryPermutation | None = None,
           convention: Convention = DEFAULT_CONVENTION) -> tuple[int, int, int]:
    """``(Y1, Y2, Y1 + Y2)``: row (resp. column) index coincidences after the maps."""
    mu = sigma if mu is None else mu
    _same_size(sigma, mu)
    y1, y2 = kernels.stat_y(sigma.map, mu.map, sigma.N, _check(convention))
    return int(y1), int(y2), int(y1 + y2)


def stat_Z(sigma: EntryPermutation) -> int:
    return int(kernels.stat_z(sigma.map, sigma.N))


def brute_X(sigma, tau=None, convention: Convention = DEFAULT_CONVENTION) -> int:
    """``O(N^3)`` reference count of :func:`stat_X`."""
    tau = identity(sigma.N) if tau is None else tau
    S = sigma.map.reshape(sigma.N, sigma.N)
    T = tau.map.reshape(tau.N, tau.N)
    a = S[:, :, None] == T[:, None, :]       # sigma(i,j) == tau(i,k)
    b = S[:, :, None] == T.T[None, :, :]     # sigma(i,j) == tau(k,j)
    if _check(convention):
        return int((a | b).sum())
    return int(a.sum() + b.sum())


def brute_Y(sigma, mu=None, convention: Convention = DEFAULT_CONVENTION) -> tuple[int, int, int]:
    """``O(N^3)`` reference count of :func:`stat_Y`."""
    mu = sigma if mu is None else mu
    set_mode = _check(convention)
    out = []
    for fs, fm in ((sigma.rows, mu.rows), (sigma.cols, mu.cols)):
        a = fs[:, :, None] == fm[:, None, :]
        b = fs[:, :, None] == fm.T[None, :, :]
        out.append(int((a | b).sum()) if set_mode else int(a.sum() + b.sum()))
    return out[0], out[1], out[0] + out[1]


def brute_Z(sigma) -> int:
    """``O(N^4)`` reference count of :func:`stat_Z`, indices ``(i, j, k, l)``."""
    R, C = sigma.rows, sigma.cols
    r = R[:, :, None, None]
    c = C[:, :, None, None]
    first = (r == R[:, None, None, :]) & (c == C.T[None, :, :, None])
    second = (r == R.T[None, :, :, None]) & (c == C[:, None, None, :])
    return int(first.sum() + second.sum())


@dataclass(frozen=True)
class PermStats:
    N: int
    X: int
    Y1: int
    Y2: int
    Y: int
    Z: int

    @property
    def ratios(self) -> dict[str, float]:
        N = self.N
        return {"X_over_N2": self.X / N**2, "Y_over_N3": self.Y / N**3, "Z_over_N4": self.Z / N**4}


def perm_stats(sigma: EntryPermutation, convention: Convention = DEFAULT_CONVENTION) -> PermStats:
    """``X(sigma, id)``, ``Y(sigma, sigma)`` and ``Z(sigma)`` together."""
    x = stat_X(sigma, None, convention)
    y1, y2, y = stat_Y(sigma, None, convention)
    return PermStats(sigma.N, x, y1, y2, y, stat_Z(sigma))


@dataclass
class ConditionReport:
    """Ratio table over a size sweep plus trend verdicts.

    A condition is reported as holding when its ratio decreases strictly over
    the sweep and the log-log slope of ratio against ``N`` is at most
    ``-slope_threshold``.  This is a finite-size trend check, not a proof.
    """

    family: str
    sizes: list[int]
    stats: list[PermStats]
    pair_family: str | None = None
    pair: list[tuple[int, int]] = field(default_factory=list)  # (X(sigma,tau), Y(sigma,tau))
    slope_threshold: float = 0.25

    def ratio_table(self) -> dict[str, list[float]]:
        t = {
            "C": [s.Y / s.N**3 for s in self.stats],
            "C1": [s.Z / s.N**4 for s in self.stats],
            "C2": [s.X / s.N**2 for s in self.stats],
        }
        if self.pair:
            t["C3_X"] = [x / N**2 for (x, _), N in zip(self.pair, self.sizes)]
            t["C3_Y"] = [y / N**3 for (_, y), N in zip(self.pair, self.sizes)]
        return t

    def slopes(self) -> dict[str, float]:
        out = {}
        logs = np.log(np.asarray(self.sizes, dtype=float))
        for name, vals in self.ratio_table().items():
            v = np.asarray(vals, dtype=float)
            if len(v) < 2 or np.any(v <= 0):
                out[name] = float("-inf") if np.all(v == 0) else float("nan")
                continue
            out[name] = float(np.polyfit(logs, np.log(v), 1)[0])
        return out

    def verdicts(self) -> dict[str, bool]:
        out = {}
        slopes = self.slopes()
        for name, vals in self.ratio_table().items():
            decreasing = all(b < a for a, b in zip(vals, vals[1:])) or all(v == 0 for v in vals)
            s = slopes[name]
            out[name] = bool(decreasing and (s == float("-inf") or s <= -self.slope_threshold))
        if "C3_X" in out:
            out["C3"] = out.pop("C3_X") and out.pop("C3_Y")
        return out

    def csv_rows(self) -> list[dict]:
        rows = []
        for s in self.stats:
            rows.append({"family": self.family, "N": s.N, "X": s.X, "Y1": s.Y1, "Y2": s.Y2,
                         "Y": s.Y, "Z": s.Z, **s.ratios})
        return rows


def condition_report(family: str, sizes: Sequence[int], params: dict | None = None,
                     pair: tuple[str, dict] | None = None,
                     convention: Convention = DEFAULT_CONVENTION) -> ConditionReport:
    """Statistics of a permutation family across ``sizes``.

    ``pair`` names a second family; its members at the same sizes are used
    for the pairwise ``X(sigma, tau) / N^2`` and ``Y(sigma, tau) / N^3`` ratios.
    """
    params = dict(params or {})
    stats, pairs = [], []
    name = family
    for N in sizes:
        sigma = family_at_size(family, N, **params)
        name = sigma.tag
        stats.append(perm_stats(sigma, convention))
        if pair is not None:
            tau = family_at_size(pair[0], N, **pair[1])
            pairs.append((stat_X(sigma, tau, convention), stat_Y(sigma, tau, convention)[2]))
    return ConditionReport(name, list(sizes), stats, pair[0] if pair else None, pairs)
