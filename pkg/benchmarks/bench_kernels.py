"""Time the compiled counting kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--sizes 16,32,64] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from permhaar import kernels
from permhaar.combinatorics import EpsilonWord, enumerate_eps_pairings
from permhaar.exact_moments import Word, _cell_tables
from permhaar.permutations import identity, uniform_random


def _cases(N):
    s = uniform_random(N, 1).map
    t = identity(N).map
    yield "stat_x", lambda k: k.stat_x(s, t, N, 0)
    yield "stat_y", lambda k: k.stat_y(s, s, N, 0)
    yield "stat_z", lambda k: k.stat_z(s, N)


def _count_case(N):
    word = Word.parse("r:1 r:* r:1 r:*", {"r": uniform_random(N, 2)})
    ck, cl = _cell_tables(word, N)
    pairs = enumerate_eps_pairings(EpsilonWord.parse("1*1*"))
    p = np.asarray(pairs[0].partner)
    q = np.asarray(pairs[-1].partner)
    return lambda k: k.count_a(ck, cl, p, q, N)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="16,32,64")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    try:
        fast = kernels.backend("cython")
    except ImportError:
        print("compiled kernels are not built; only the fallback can be timed")
        fast = None
    slow = kernels.backend("python")

    print(f"{'kernel':8} {'N':>5} {'python [s]':>12} {'cython [s]':>12} {'speedup':>9}")
    for N in map(int, args.sizes.split(",")):
        cases = list(_cases(N))
        if N <= 32:
            cases.append(("count_a", _count_case(N)))
        for name, fn in cases:
            if fast is not None:
                assert np.all(np.asarray(fn(fast)) == np.asarray(fn(slow))), name
            tp = min(timeit.repeat(lambda: fn(slow), number=1, repeat=args.repeat))
            if fast is None:
                print(f"{name:8} {N:5d} {tp:12.5f} {'-':>12} {'-':>9}")
                continue
            tc = min(timeit.repeat(lambda: fn(fast), number=1, repeat=args.repeat))
            print(f"{name:8} {N:5d} {tp:12.5f} {tc:12.5f} {tp / tc:9.1f}")


if __name__ == "__main__":
    main()
