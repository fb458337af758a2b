import itertools
from fractions import Fraction

import pytest

from permhaar.combinatorics import EpsilonWord, catalan
from permhaar.errors import DomainError, ResourceGuardError
from permhaar.limits import (
    FreeFamily,
    RDiagonalSpec,
    circular_star_moment,
    free_cumulant_word,
    haar_moment,
    mixed_moment_limit,
    mixed_moment_terms,
    parse_spec,
)

F = Fraction
CIRC = RDiagonalSpec("circular")
HAAR = RDiagonalSpec("haar_unitary")


def balanced_patterns(max_len):
    for n2 in range(2, max_len + 1, 2):
        for stars in itertools.product([False, True], repeat=n2):
            if sum(stars) * 2 == n2:
                yield stars


def test_determining_sequences():
    assert [CIRC.determining_sequence(n) for n in (1, 2, 3)] == [1, 0, 0]
    assert [HAAR.determining_sequence(n) for n in (1, 2, 3, 4)] == [1, -1, 2, -5]
    s = RDiagonalSpec("scaled_haar_sum", 3)
    assert s.determining_sequence(2) == F(-1, 9)
    assert s.determining_sequence(3) == F(2, 81)
    with pytest.raises(DomainError):
        RDiagonalSpec("scaled_haar_sum", 0)
    with pytest.raises(DomainError):
        RDiagonalSpec("wigner")


def test_parse_spec():
    assert parse_spec("circular") == CIRC
    assert parse_spec("haar-unitary") == HAAR
    assert parse_spec("scaled-haar-sum:2") == RDiagonalSpec("scaled_haar_sum", 2)
    assert str(parse_spec("scaled-haar-sum:2")) == "scaled-haar-sum:2"
    with pytest.raises(DomainError):
        parse_spec("scaled-haar-sum:x")


def test_circular_star_moment_examples():
    assert circular_star_moment("1*1*") == 2
    assert circular_star_moment("11**") == 1
    assert circular_star_moment("111*") == 0
    assert circular_star_moment("1*" * 4) == catalan(4)
    with pytest.raises(DomainError):
        circular_star_moment("1*1")


def test_free_cumulant_word():
    assert free_cumulant_word(CIRC, "1*") == 1
    assert free_cumulant_word(CIRC, "*1") == 1
    assert free_cumulant_word(HAAR, "1*1*") == -1
    assert free_cumulant_word(HAAR, "*1*1") == -1
    assert free_cumulant_word(RDiagonalSpec("scaled_haar_sum", 2), "1*1*") == F(-1, 4)
    assert free_cumulant_word(HAAR, "11**") == 0
    assert free_cumulant_word(HAAR, "1*1") == 0
    assert free_cumulant_word(CIRC, "11") == 0


def test_mixed_examples():
    fam = FreeFamily({"c": CIRC, "u": HAAR})
    assert mixed_moment_limit("c:1 c:* c:1 c:*", fam) == 2
    assert mixed_moment_limit("u:1 c:1 u:* c:*", fam) == 0
    assert mixed_moment_limit("", fam) == 1
    for b in (1, 2, 3, 7):
        a = FreeFamily({"a": RDiagonalSpec("scaled_haar_sum", b)})
        assert mixed_moment_limit([("a", False), ("a", True)] * 2, a) == 2 - F(1, b * b)
    with pytest.raises(DomainError):
        mixed_moment_limit("x:1 x:*", fam)
    with pytest.raises(ResourceGuardError):
        mixed_moment_limit("c:1 c:* " * 7, fam)


def test_terms_breakdown():
    a = FreeFamily({"a": RDiagonalSpec("scaled_haar_sum", 2)})
    terms = mixed_moment_terms("a:1 a:* a:1 a:*", a)
    assert sorted(str(t.partition) for t in terms) == ["{(1,2),(3,4)}", "{(1,2,3,4)}", "{(1,4),(2,3)}"]
    assert sum(t.value for t in terms) == F(7, 4)
    assert terms[1].to_json()["value"] == "-1/4"


def test_circular_consistency():
    fam = FreeFamily({"c": CIRC})
    for stars in balanced_patterns(8):
        assert mixed_moment_limit([("c", s) for s in stars], fam) == circular_star_moment(EpsilonWord(stars))


def test_unitary_relation():
    fam = FreeFamily({"u": HAAR})
    for n in range(1, 5):
        assert mixed_moment_limit("u:1 u:* " * n, fam) == 1
        assert mixed_moment_limit("u:* u:1 " * n, fam) == 1


def test_scaled_one_is_haar():
    fam1 = FreeFamily({"a": RDiagonalSpec("scaled_haar_sum", 1)})
    famh = FreeFamily({"a": HAAR})
    for stars in balanced_patterns(8):
        word = [("a", s) for s in stars]
        assert mixed_moment_limit(word, fam1) == mixed_moment_limit(word, famh)


def test_scaled_haar_powers_of_u():
    # words like u u u* u* reduce to 1 by unitarity; u u* is the only way to pair letters
    fam = FreeFamily({"u": HAAR})
    assert mixed_moment_limit("u:1 u:1 u:* u:*", fam) == 1
    assert mixed_moment_limit("u:1 u:1 u:1 u:* u:* u:*", fam) == 1
    assert mixed_moment_limit("u:1 u:1 u:* u:1 u:* u:*", fam) == 1
    assert mixed_moment_limit("u:1 u:1 u:1 u:*", fam) == 0


def test_positivity_and_monotonicity():
    for n in range(1, 5):
        word = "a:1 a:* " * n
        seq = []
        for spec in (HAAR, CIRC) + tuple(RDiagonalSpec("scaled_haar_sum", b) for b in (1, 2, 3, 5)):
            v = mixed_moment_limit(word, FreeFamily({"a": spec}))
            assert 0 < v <= catalan(n)
            if spec.kind == "scaled_haar_sum":
                seq.append(v)
        assert all(b >= a for a, b in zip(seq, seq[1:]))


def test_free_pair_factorizes():
    # phi(u u* c c*) = phi(u u*) phi(c c*) for free u, c
    fam = FreeFamily({"c": CIRC, "u": HAAR})
    assert mixed_moment_limit("u:1 u:* c:1 c:*", fam) == 1
    assert mixed_moment_limit("c:1 c:* c:1 c:* u:1 u:*", fam) == 2


def test_haar_moment():
    assert haar_moment(0) == 1
    assert haar_moment(3) == 0
    assert haar_moment(-2) == 0
