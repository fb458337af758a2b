import itertools
import math

import pytest
from hypothesis import given, strategies as st

from permhaar.combinatorics import (
    LIMITS,
    CycleType,
    EpsilonWord,
    Pairing,
    SetPartition,
    catalan,
    cycle_type,
    enumerate_eps_pairings,
    enumerate_nc,
    enumerate_nc2,
    enumerate_nc2_eps,
    enumerate_pairings,
    is_noncrossing,
    join,
    psi_bijection,
)
from permhaar.errors import DomainError, ResourceGuardError


def P(*pairs):
    """Pairing from 1-based pairs."""
    return Pairing.from_pairs([(a - 1, b - 1) for a, b in pairs])


def SP(n, *blocks):
    return SetPartition.from_blocks([[x - 1 for x in b] for b in blocks], n)


def union_find_join(p, q):
    parent = list(range(p.n2))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pairing in (p, q):
        for a, b in pairing.pairs():
            parent[find(a)] = find(b)
    groups = {}
    for x in range(p.n2):
        groups.setdefault(find(x), []).append(x)
    return SetPartition.from_blocks(groups.values(), p.n2)


@pytest.mark.parametrize("n2,count", [(2, 1), (4, 3), (6, 15), (8, 105)])
def test_pairing_counts(n2, count):
    ps = enumerate_pairings(n2)
    assert len(ps) == count
    assert len(set(ps)) == count
    assert ps == sorted(ps, key=lambda p: p.partner)


def test_pairing_guards():
    with pytest.raises(DomainError):
        enumerate_pairings(3)
    with pytest.raises(ResourceGuardError):
        enumerate_pairings(LIMITS["pairings"] + 2)


def test_pairing_validation():
    with pytest.raises(DomainError):
        Pairing((0, 1))
    with pytest.raises(DomainError):
        Pairing((1, 2, 0))
    assert str(P((1, 2), (3, 4))) == "{(1,2),(3,4)}"


def test_eps_pairings_examples():
    assert enumerate_eps_pairings(EpsilonWord.parse("1*")) == [P((1, 2))]
    assert set(enumerate_eps_pairings(EpsilonWord.parse("1*1*"))) == {P((1, 2), (3, 4)), P((1, 4), (2, 3))}
    assert set(enumerate_eps_pairings(EpsilonWord.parse("11**"))) == {P((1, 3), (2, 4)), P((1, 4), (2, 3))}
    assert enumerate_eps_pairings(EpsilonWord.parse("111*")) == []


def test_eps_pairings_factorial():
    for n2 in (2, 4, 6, 8, 10):
        for stars in itertools.product([False, True], repeat=n2):
            eps = EpsilonWord(stars)
            if eps.balanced:
                assert len(enumerate_eps_pairings(eps)) == math.factorial(n2 // 2)
            else:
                assert enumerate_eps_pairings(eps) == []


def test_join_examples():
    a = P((1, 2), (3, 4))
    b = P((1, 4), (2, 3))
    assert join(a, a) == SP(4, (1, 2), (3, 4))
    assert join(a, b) == SP(4, (1, 2, 3, 4))


def test_join_from_psi_example():
    # sigma = (1)(2,3), tau = (1,2,3) on [3]
    sigma = (0, 2, 1)
    tau = (1, 2, 0)
    got = join(psi_bijection(sigma), psi_bijection(tau))
    assert str(got) == "{(1,3,4,5),(2,6)}"
    assert got.blocks == ((0, 2, 3, 4), (1, 5))


def test_join_mismatched():
    with pytest.raises(DomainError):
        join(P((1, 2)), P((1, 2), (3, 4)))


@pytest.mark.parametrize("n2", [2, 4, 6, 8])
def test_join_matches_union_find(n2):
    ps = enumerate_pairings(n2)
    for p in ps:
        for q in ps:
            j = join(p, q)
            assert j == union_find_join(p, q)
            assert all(len(b) % 2 == 0 for b in j.blocks)


def test_noncrossing_examples():
    assert is_noncrossing(SP(4, (1, 2), (3, 4)))
    assert not is_noncrossing(SP(4, (1, 3), (2, 4)))
    assert is_noncrossing(SP(4, (1, 4), (2, 3)))


def brute_noncrossing(pi):
    owner = pi.block_of()
    n = pi.n
    for a, b, c, d in itertools.combinations(range(n), 4):
        if owner[a] == owner[c] and owner[b] == owner[d] and owner[a] != owner[b]:
            return False
    return True


@pytest.mark.parametrize("n", range(1, 9))
def test_nc_counts_are_catalan(n):
    ncs = enumerate_nc(n)
    assert len(ncs) == catalan(n)
    assert len(set(ncs)) == len(ncs)
    assert all(brute_noncrossing(pi) for pi in ncs)


def test_nc_small():
    assert len(enumerate_nc(3)) == 5
    with pytest.raises(ResourceGuardError):
        enumerate_nc(LIMITS["nc"] + 1)


def test_nc2_eps():
    assert len(enumerate_nc2_eps(EpsilonWord.parse("1*1*"))) == 2
    assert enumerate_nc2_eps(EpsilonWord.parse("11**")) == [P((1, 4), (2, 3))]
    for n in range(1, 6):
        assert len(enumerate_nc2_eps(EpsilonWord.parse("1*" * n))) == catalan(n)
        assert len(enumerate_nc2(2 * n)) == catalan(n)


def test_psi_examples():
    assert psi_bijection((0,)) == P((1, 2))
    assert psi_bijection((0, 1)) == P((1, 3), (2, 4))
    assert psi_bijection((1, 0)) == P((1, 4), (2, 3))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_psi_injective_and_bipartite(n):
    images = [psi_bijection(s) for s in itertools.permutations(range(n))]
    assert len(set(images)) == math.factorial(n)
    delta = EpsilonWord((False,) * n + (True,) * n)
    assert set(images) == set(enumerate_eps_pairings(delta))


def test_catalan():
    assert [catalan(k) for k in range(6)] == [1, 1, 2, 5, 14, 42]
    with pytest.raises(DomainError):
        catalan(-1)


def test_cycle_type():
    assert cycle_type((0, 2, 1)) == CycleType((2, 1))
    assert CycleType((1, 2)).key() == "[2,1]"
    assert CycleType((3, 1, 2)).n == 6


@given(st.permutations(range(6)))
def test_cycle_type_is_a_partition(perm):
    ct = cycle_type(tuple(perm))
    assert sum(ct.parts) == 6
    assert list(ct.parts) == sorted(ct.parts, reverse=True)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.permutations(range(2 * n)), st.permutations(range(2 * n)))))
def test_join_properties(perms):
    a, b = perms
    p = Pairing.from_pairs(zip(a[::2], a[1::2]))
    q = Pairing.from_pairs(zip(b[::2], b[1::2]))
    j = join(p, q)
    assert j == join(q, p)
    assert j == union_find_join(p, q)
    assert sum(len(b) for b in j.blocks) == p.n2
