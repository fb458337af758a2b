import numpy as np
import pytest
from hypothesis import given, strategies as st

from permhaar.errors import DomainError
from permhaar.permutations import (
    EntryPermutation,
    apply,
    brute_X,
    brute_Y,
    brute_Z,
    condition_report,
    family_at_size,
    identity,
    make_permutation,
    mixing_map,
    parse_family,
    partial_transpose,
    perm_stats,
    row_shift,
    stat_X,
    stat_Y,
    stat_Z,
    transpose,
    uniform_random,
)


def zoo(N):
    out = [identity(N), transpose(N), row_shift(N), uniform_random(N, 11), uniform_random(N, 12)]
    for b in range(1, N + 1):
        if N % b == 0:
            out.append(partial_transpose(b, N // b))
    m = int(round(N**0.5))
    if m * m == N:
        out.append(mixing_map(m))
    return out


def test_partial_transpose_edges():
    for N in (1, 2, 5, 6):
        assert partial_transpose(N, 1) == identity(N)
        assert partial_transpose(1, N) == transpose(N)


def test_partial_transpose_blocks():
    A = np.arange(16).reshape(4, 4)
    B = apply(partial_transpose(2, 2), A)
    for r in range(2):
        for c in range(2):
            np.testing.assert_array_equal(B[2 * r:2 * r + 2, 2 * c:2 * c + 2], A[2 * r:2 * r + 2, 2 * c:2 * c + 2].T)


def test_apply_basics():
    A = np.arange(25).reshape(5, 5) * 1.5
    np.testing.assert_array_equal(apply(identity(5), A), A)
    np.testing.assert_array_equal(apply(transpose(5), A), A.T)
    with pytest.raises(DomainError):
        apply(identity(4), A)
    stack = np.stack([A, A + 1])
    np.testing.assert_array_equal(apply(transpose(5), stack)[1], (A + 1).T)


def test_mixing_map_cells():
    m = mixing_map(2)
    for i in range(4):
        for j in range(4):
            a, b = divmod(i, 2)
            c, d = divmod(j, 2)
            assert m(i, j) == (a * 2 + c, b * 2 + d)
    assert m.compose(m).is_identity()


def test_involutions_and_shift_order():
    for b, d in [(2, 3), (3, 2), (4, 4)]:
        g = partial_transpose(b, d)
        assert g.compose(g).is_identity()
    assert mixing_map(3).compose(mixing_map(3)).is_identity()
    for N in (3, 4, 7):
        assert row_shift(N).power(N).is_identity()
        assert not row_shift(N).power(N - 1).is_identity()


def test_constructor_errors():
    with pytest.raises(DomainError):
        make_permutation("partial-transpose", 7, b=2, d=3)
    with pytest.raises(DomainError):
        make_permutation("mixing", 8)
    with pytest.raises(DomainError):
        make_permutation("random", 4)
    with pytest.raises(DomainError):
        make_permutation("nope", 4)
    with pytest.raises(DomainError):
        EntryPermutation(2, np.array([0, 0, 1, 2]))


def test_family_parsing():
    assert parse_family("partial-transpose:2,3") == ("partial-transpose", {"b": 2, "d": 3})
    assert parse_family("partial-transpose:2") == ("partial-transpose", {"b": 2})
    assert parse_family("mixing:3") == ("mixing", {"m": 3})
    assert parse_family("random:7") == ("random", {"seed": 7})
    assert parse_family("id") == ("identity", {})
    with pytest.raises(DomainError):
        parse_family("mixing:a")
    assert family_at_size("partial-transpose", 36, b=2, d=2) == partial_transpose(6, 6)
    assert family_at_size("partial-transpose", 40, b=2) == partial_transpose(2, 20)
    assert family_at_size("mixing", 16, m=3) == mixing_map(4)


def test_random_reproducible():
    assert uniform_random(9, 3) == uniform_random(9, 3)
    assert uniform_random(9, 3) != uniform_random(9, 4)
    assert uniform_random(9, 3).descriptor() == "random:3"


def test_json_roundtrip():
    g = partial_transpose(2, 3)
    back = EntryPermutation.from_json(g.to_json())
    assert back == g
    assert min(__import__("json").loads(g.to_json())) == 1


@pytest.mark.parametrize("N", [1, 2, 3, 4, 6, 9])
@pytest.mark.parametrize("convention", ["multiset", "set"])
def test_fast_statistics_match_brute_force(N, convention):
    perms = zoo(N)
    for s in perms:
        assert stat_X(s, None, convention) == brute_X(s, None, convention)
        assert stat_Y(s, None, convention) == brute_Y(s, None, convention)
        assert stat_Z(s) == brute_Z(s)
        for t in perms[:3]:
            assert stat_X(s, t, convention) == brute_X(s, t, convention)
            assert stat_Y(s, t, convention) == brute_Y(s, t, convention)


@pytest.mark.parametrize("N", [12, 16, 24])
def test_fast_statistics_match_brute_force_larger(N):
    for s in zoo(N)[:6]:
        for convention in ("multiset", "set"):
            assert stat_X(s, None, convention) == brute_X(s, None, convention)
            assert stat_Y(s, None, convention) == brute_Y(s, None, convention)
        if N <= 12:
            assert stat_Z(s) == brute_Z(s)


def test_literal_set_counts():
    for N in (3, 4, 5):
        assert stat_X(identity(N), None, "set") == N * (2 * N - 1)
        assert stat_Y(identity(N), None, "set")[2] == 2 * N**3
    b, d = 2, 3
    assert stat_X(partial_transpose(b, d), None, "set") == 2 * b * b * d - b * d


def test_multiset_closed_forms():
    for b, d in [(2, 3), (3, 4), (4, 4), (2, 5)]:
        g = partial_transpose(b, d)
        assert stat_Y(g)[0] * b * d == b**3 * d**3 * (b + d)
    for N in (2, 3, 4):
        assert stat_Y(mixing_map(N))[0] == 2 * N**5


def test_z_examples():
    for N in (3, 4):
        assert stat_Z(identity(N)) == N**4 + N**2
        assert stat_Z(transpose(N)) == N**4 + N**2
    # Z of a uniform permutation grows like N^2, so Z/N^4 falls like N^-2
    worst = {N: max(stat_Z(uniform_random(N, s)) / N**4 for s in range(20)) for N in (10, 20)}
    assert worst[10] < 0.1
    assert worst[20] < 0.05
    assert worst[20] < worst[10] / 3


@pytest.mark.parametrize("convention", ["multiset", "set"])
def test_statistic_inequalities(convention):
    for N in (4, 6, 9):
        for s in zoo(N):
            y = stat_Y(s, None, convention)[2]
            assert stat_Z(s) <= N * y
            assert stat_X(s, None, convention) * N <= y
            assert y >= N * N


@given(st.integers(2, 7), st.integers(0, 2**32))
def test_random_statistics_property(N, seed):
    s = uniform_random(N, seed)
    assert stat_X(s) == brute_X(s)
    assert stat_Y(s) == brute_Y(s)
    assert stat_Z(s) == brute_Z(s)
    st_ = perm_stats(s)
    assert st_.Y == st_.Y1 + st_.Y2


def test_condition_report_partial_transpose():
    rep = condition_report("partial-transpose", [16, 36, 64], {"b": 4, "d": 4})
    np.testing.assert_allclose(rep.ratio_table()["C"], [1.0, 2 / 3, 0.5])
    assert rep.verdicts()["C"]
    rep = condition_report("partial-transpose", [16, 32, 64], {"b": 2})
    y1 = [s.Y1 / s.N**3 for s in rep.stats]
    np.testing.assert_allclose(y1, [0.5 + 1 / d for d in (8, 16, 32)])
    assert not rep.verdicts()["C"]


def test_condition_report_identity_and_pair():
    rep = condition_report("identity", [8, 16], convention="set")
    assert rep.ratio_table()["C"] == [2.0, 2.0]
    assert not rep.verdicts()["C"]
    rep = condition_report("mixing", [16, 36, 64], pair=("partial-transpose", {}))
    assert set(rep.verdicts()) == {"C", "C1", "C2", "C3"}
    rows = rep.csv_rows()
    assert list(rows[0]) == ["family", "N", "X", "Y1", "Y2", "Y", "Z", "X_over_N2", "Y_over_N3", "Z_over_N4"]
