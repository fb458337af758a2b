"""Seeded Monte Carlo for words in entry-permuted Haar unitaries.

Every trial draws its own Haar unitary from a seed derived from the master
seed and the trial index, so results do not depend on batching or on the
number of worker threads.  Trials are grouped in chunks whose size depends
only on ``N``; chunks may run concurrently and are reduced in index order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .exact_moments import Word
from .permutations import EntryPermutation, apply

__all__ = [
    "HaarSample",
    "TraceEstimate",
    "RandPermStats",
    "trial_seed",
    "sample_haar",
    "sample_haar_batch",
    "estimate_moment",
    "estimate_moments",
    "estimate_variance",
    "estimate_covariance",
    "trace_samples",
    "spectral_norm",
    "singular_value_histogram",
    "randperm_experiment",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class HaarSample:
    N: int
    U: np.ndarray
    seed: int


@dataclass(frozen=True)
class TraceEstimate:
    """Sample mean of ``(1/N) Tr`` with its standard error."""

    mean: complex
    stderr: float
    trials: int


@dataclass(frozen=True)
class RandPermStats:
    """Means and standard errors of the four pair-transfer counts.

    ``rr`` counts unordered pairs of cells in a common row whose images share
    a row; ``rc`` pairs in a row mapped into a common column, ``cr`` pairs in
    a column mapped into a common row and ``cc`` pairs in a column mapped into
    a common column.
    """

    N: int
    samples: int
    mean: dict
    stderr: dict

    @property
    def bound(self) -> int:
        return self.N * self.N * (self.N - 1) // 2

    @property
    def predicted(self) -> float:
        """Common expectation ``N/(N+1) * N(N-1)/2`` under a uniform permutation."""
        N = self.N
        return N / (N + 1) * N * (N - 1) / 2


def trial_seed(master: int, index: int) -> int:
    """64-bit seed of trial ``index``; a hash of ``(master, index)``."""
    ss = np.random.SeedSequence([int(master) & _MASK64, int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _ginibre(N: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(int(seed) & _MASK64))
    z = rng.standard_normal((N, N, 2))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def _haar_from_ginibre(Z: np.ndarray) -> np.ndarray:
    # QR alone is not Haar; fix the phases of diag(R)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    phase = d / np.abs(d)
    return Q * phase[..., None, :]


def sample_haar(N: int, seed: int) -> HaarSample:
    """Haar unitary from a complex Ginibre matrix and phase-corrected QR."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    return HaarSample(N, _haar_from_ginibre(_ginibre(N, seed)), int(seed))


def sample_haar_batch(N: int, seeds: Sequence[int]) -> np.ndarray:
    """Stack of Haar unitaries, one per seed; shape ``(len(seeds), N, N)``."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    Z = np.stack([_ginibre(N, s) for s in seeds])
    return _haar_from_ginibre(Z)


def _chunk_size(N: int) -> int:
    return max(1, min(4096, (1 << 19) // (N * N)))


def _letters(word: Word, N: int):
    if len(word) == 0:
        raise DomainError("word must have at least one letter")
    perms = word.resolve(N)
    for perm in perms:
        if perm.N != N:
            raise DomainError(f"permutation of size {perm.N} used at N={N}")
    return [(perm, star) for perm, (_, star) in zip(perms, word.letters)]


def _letter_matrix(perm, star, U, cache):
    key = (perm, star)
    if key not in cache:
        V = U if perm.is_identity() else apply(perm, U)
        cache[key] = np.conj(np.swapaxes(V, -1, -2)) if star else V
    return cache[key]


def _evaluate(plans, U: np.ndarray) -> list[np.ndarray]:
    """Unnormalised traces of each word's product, on a stack ``U``.

    ``Tr(AB)`` is read off the two half-words without forming ``AB``; products
    of letter runs are shared within the chunk.
    """
    letters: dict = {}
    products: dict = {}

    def product(run):
        if run not in products:
            last = _letter_matrix(*run[-1], U, letters)
            products[run] = last if len(run) == 1 else product(run[:-1]) @ last
        return products[run]

    out = []
    for plan in plans:
        if len(plan) == 1:
            diag = np.diagonal(product(plan), axis1=-2, axis2=-1)
        else:
            h = len(plan) // 2
            diag = np.einsum("...ij,...ji->...i", product(plan[:h]), product(plan[h:]))
        out.append(_neumaier(diag.real) + 1j * _neumaier(diag.imag))
    # product() closes over itself, so drop the matrices now rather than at gc time
    products.clear()
    letters.clear()
    return out


def _neumaier(x: np.ndarray) -> np.ndarray:
    # compensated sum over the last axis, vectorised over the rest
    total = np.zeros(x.shape[:-1])
    comp = np.zeros_like(total)
    for k in range(x.shape[-1]):
        v = x[..., k]
        t = total + v
        comp += np.where(np.abs(total) >= np.abs(v), (total - t) + v, (v - t) + total)
        total = t
    return total + comp


def trace_samples(words: Sequence[Word], N: int, trials: int, seed: int,
                  threads: int = 1) -> np.ndarray:
    """Unnormalised traces, shape ``(len(words), trials)``; all words share samples."""
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    plans = [tuple(_letters(w, N)) for w in words]
    size = _chunk_size(N)
    starts = list(range(0, trials, size))

    def run(start):
        seeds = [trial_seed(seed, k) for k in range(start, min(trials, start + size))]
        return _evaluate(plans, sample_haar_batch(N, seeds))

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    out = np.empty((len(words), trials), dtype=complex)
    for w in range(len(words)):
        out[w] = np.concatenate([part[w] for part in parts])
    return out


def _summary(values: np.ndarray) -> TraceEstimate:
    n = len(values)
    mean = complex(math.fsum(values.real) / n, math.fsum(values.imag) / n)
    if n < 2:
        return TraceEstimate(mean, 0.0, n)
    dev = np.abs(values - mean) ** 2
    var = math.fsum(dev) / (n - 1)
    return TraceEstimate(mean, math.sqrt(var / n), n)


def estimate_moment(word: Word, N: int, trials: int, seed: int, threads: int = 1) -> TraceEstimate:
    """Mean of ``(1/N) Tr`` of the word over ``trials`` Haar samples.

    ``stderr`` is the sample standard deviation of the complex values
    divided by ``sqrt(trials)``.
    """
    return _summary(trace_samples([word], N, trials, seed, threads)[0] / N)


def estimate_moments(words: Sequence[Word], N: int, trials: int, seed: int,
                     threads: int = 1) -> list[TraceEstimate]:
    """:func:`estimate_moment` for several words on common samples."""
    return [_summary(row / N) for row in trace_samples(words, N, trials, seed, threads)]


def estimate_covariance(word1: Word, word2: Word, N: int, trials: int, seed: int,
                        threads: int = 1) -> float:
    """Unbiased sample covariance ``Re E[(X - EX) conj(Y - EY)]`` of unnormalised traces."""
    if trials < 2:
        raise DomainError(f"covariance needs at least 2 trials, got {trials}")
    X, Y = trace_samples([word1, word2], N, trials, seed, threads)
    dx = X - X.mean()
    dy = Y - Y.mean()
    return math.fsum((dx * np.conj(dy)).real) / (trials - 1)


def estimate_variance(word: Word, N: int, trials: int, seed: int, threads: int = 1) -> float:
    """Unbiased sample variance ``E|X - EX|^2`` of the unnormalised trace."""
    if trials < 2:
        raise DomainError(f"variance needs at least 2 trials, got {trials}")
    X = trace_samples([word], N, trials, seed, threads)[0]
    return math.fsum(np.abs(X - X.mean()) ** 2) / (trials - 1)


def _power_iteration(matvec: Callable, rmatvec: Callable, N: int, rng, tol: float, max_iter: int) -> float:
    x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = rmatvec(matvec(x))
        new = float(np.vdot(x, y).real)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam


def spectral_norm(perm: EntryPermutation, N: int, seed: int, tol: float = 1e-8,
                  max_iter: int = 200_000) -> float:
    """Largest singular value of ``U^perm`` for one Haar sample.

    Power iteration on ``A* A``, stopping when the Rayleigh quotient changes by
    less than ``tol`` relative.
    """
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    if perm.N != N:
        raise DomainError(f"permutation of size {perm.N} used at N={N}")
    U = sample_haar(N, seed).U
    A = U if perm.is_identity() else apply(perm, U)
    AH = A.conj().T
    rng = np.random.Generator(np.random.PCG64(trial_seed(seed, 1 << 32)))
    lam = _power_iteration(A.dot, AH.dot, N, rng, tol, max_iter)
    return math.sqrt(max(lam, 0.0))


def singular_value_histogram(perm: EntryPermutation, N: int, seed: int, trials: int = 1,
                             bins: int = 50) -> list[tuple[float, float, int]]:
    """Histogram ``(lo, hi, count)`` of singular values pooled over trials."""
    if perm.N != N:
        raise DomainError(f"permutation of size {perm.N} used at N={N}")
    values = []
    for k in range(trials):
        U = sample_haar(N, trial_seed(seed, k)).U
        values.append(np.linalg.svd(apply(perm, U), compute_uv=False))
    values = np.concatenate(values)
    counts, edges = np.histogram(values, bins=bins, range=(0.0, max(1.0, float(values.max()))))
    return [(float(edges[k]), float(edges[k + 1]), int(counts[k])) for k in range(bins)]


def _pair_counts(h: np.ndarray) -> np.ndarray:
    # h: (samples, N, N) histogram; sum of C(h, 2) per sample
    return (h * (h - 1) // 2).sum(axis=(1, 2))


def _hist_batch(keys: np.ndarray, values: np.ndarray, N: int) -> np.ndarray:
    S = keys.shape[0]
    flat = (np.arange(S)[:, None] * N * N + keys * N + values).ravel()
    return np.bincount(flat, minlength=S * N * N).reshape(S, N, N)


def randperm_experiment(N: int, samples: int, seed: int) -> RandPermStats:
    """Pair-transfer counts over uniform random permutations of the ``N x N`` cells."""
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    if samples < 2:
        raise DomainError(f"samples must be at least 2, got {samples}")
    rows_of, cols_of = np.divmod(np.arange(N * N), N)
    chunk = max(1, (1 << 18) // (N * N))
    parts = {k: [] for k in ("rr", "rc", "cr", "cc")}
    for c, start in enumerate(range(0, samples, chunk)):
        S = min(chunk, samples - start)
        rng = np.random.Generator(np.random.PCG64(trial_seed(seed, c)))
        maps = rng.permuted(np.tile(np.arange(N * N), (S, 1)), axis=1)
        r, col = np.divmod(maps, N)
        src_r = np.broadcast_to(rows_of, maps.shape)
        src_c = np.broadcast_to(cols_of, maps.shape)
        parts["rr"].append(_pair_counts(_hist_batch(src_r, r, N)))
        parts["rc"].append(_pair_counts(_hist_batch(src_r, col, N)))
        parts["cr"].append(_pair_counts(_hist_batch(src_c, r, N)))
        parts["cc"].append(_pair_counts(_hist_batch(src_c, col, N)))
    mean, err = {}, {}
    for k, chunks in parts.items():
        v = np.concatenate(chunks).astype(float)
        mean[k] = math.fsum(v) / samples
        err[k] = float(v.std(ddof=1) / math.sqrt(samples))
    return RandPermStats(N, samples, mean, err)

