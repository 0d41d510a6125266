import pytest
from hypothesis import given, strategies as st

from handlecalc.monodromy import (WORD_MIDDLE, WORD_NINE_A, GENERATORS, MonodromyWord, Sl2Matrix,
                                  conjugation_certificate, cyclic_shift, cyclically_equal, evaluate,
                                  global_monodromy, parse_word, verify_monodromy_identity)
from oracles import sl2_word

words = st.text(alphabet="abAB", max_size=30)


def as_word(s):
    return MonodromyWord.from_letters([(c.lower(), 1 if c.islower() else -1) for c in s])


def test_generator_matrices():
    assert evaluate(parse_word("a")).rows() == [[1, 1], [0, 1]]
    assert GENERATORS["b"].rows() == [[1, 0], [-1, 1]]


def test_empty_word_is_identity():
    assert evaluate(MonodromyWord(())) == Sl2Matrix.identity()


def test_ab_sixth_power_is_identity():
    assert evaluate(parse_word("(a b)^6")) == Sl2Matrix.identity()
    assert sl2_word("ab" * 6) == [[1, 0], [0, 1]]


@pytest.mark.parametrize("n,length", [(1, 12), (2, 24), (7, 84)])
def test_global_word_length(n, length):
    w = global_monodromy(n)
    assert len(w) == length
    assert evaluate(w) == Sl2Matrix.identity()


@given(words)
def test_evaluation_matches_oracle(s):
    assert evaluate(as_word(s)).rows() == sl2_word(s)


@given(words, words)
def test_evaluation_is_a_homomorphism(s, t):
    assert evaluate(as_word(s) * as_word(t)) == evaluate(as_word(s)) @ evaluate(as_word(t))
    assert evaluate(as_word(s).inverse()) == evaluate(as_word(s)).inverse()


def test_parser_syntax():
    assert parse_word(" a^3 b a^3 b a^3 b ") == WORD_NINE_A
    assert str(parse_word("a^2 a")) == str(parse_word("a^3"))
    assert parse_word("(a b)^-1") == parse_word("b^-1 a^-1")
    assert len(parse_word("a a^-1")) == 0


@pytest.mark.parametrize("bad", ["a c", "a^", "(a b", "a)"])
def test_parser_rejects(bad):
    with pytest.raises(ValueError):
        parse_word(bad)


def test_det_enforced():
    with pytest.raises(ValueError):
        Sl2Matrix(1, 1, 1, 1)


def test_cyclic_equality_examples():
    assert cyclically_equal(parse_word("a b"), parse_word("b a"))
    assert cyclically_equal(WORD_MIDDLE, WORD_NINE_A)
    assert not cyclically_equal(parse_word("a^3 b"), parse_word("a b^3"))


@given(words, st.integers(0, 40))
def test_rotation_conjugation_certificate(s, k):
    w = as_word(s)
    if len(w) == 0:
        return
    k %= len(w)
    rot = w.rotate(k)
    if len(rot) == len(w):
        # no free cancellation across the seam: a genuine letter rotation
        assert cyclic_shift(w, rot) is not None
    c = conjugation_certificate(w, k)
    assert evaluate(rot) == c @ evaluate(w) @ c.inverse()


@pytest.mark.parametrize("n", [1, 2, 5])
def test_verify_monodromy_identity(n):
    rep = verify_monodromy_identity(n)
    assert rep.ok and rep.failures() == []
    assert (rep.a_count, rep.b_count) == (9 * n, 3 * n)


def test_letter_counts_n2():
    w = WORD_NINE_A ** 2
    assert (w.count("a"), w.count("b")) == (18, 6)


def test_verify_monodromy_identity_rejects_zero():
    with pytest.raises(ValueError):
        verify_monodromy_identity(0)
