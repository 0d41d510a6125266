import pytest
from hypothesis import given, strategies as st

from handlecalc import invariants
from handlecalc.braids import (BridgePresentation, PureBraidWord, abelianize, emit_surgery_skeleton,
                               one_handle_count, parse_braid, relation_labels, torus_bridge_number,
                               validate)


def test_single_generator_is_pure():
    ok, problems = validate(PureBraidWord(4, ((1, 2, 1),)))
    assert ok and problems == []


def test_bad_indices():
    ok, problems = validate(PureBraidWord(4, ((3, 2, 1),)))
    assert not ok and "violates" in problems[0]


def test_word_on_six_strands():
    w = parse_braid("T(2,5) T(1,2)^-1", 6)
    assert validate(w)[0]
    assert w.factors == ((2, 5, 1), (1, 2, -1))


@st.composite
def braid_words(draw, strands=6):
    k = draw(st.integers(0, 6))
    out = []
    for _ in range(k):
        i = draw(st.integers(1, strands - 1))
        j = draw(st.integers(i + 1, strands))
        out.append((i, j, draw(st.sampled_from([-2, -1, 1, 3]))))
    return PureBraidWord(strands, tuple(out))


@given(braid_words())
def test_generators_expand_to_pure_braids(w):
    # the Artin expansion must always have identity permutation
    assert w.permutation() == tuple(range(1, 7))
    assert (w * w.inverse()).permutation() == tuple(range(1, 7))


@given(braid_words(), braid_words())
def test_abelianization_is_additive(u, v):
    total = dict(abelianize(u))
    for k, e in abelianize(v).items():
        total[k] = total.get(k, 0) + e
    assert abelianize(u * v) == {k: e for k, e in sorted(total.items()) if e}


def test_abelianize_examples():
    assert abelianize(parse_braid("T(2,5)^2", 6)) == {(2, 5): 2}
    assert abelianize(parse_braid("T(1,2) T(1,2)^-1", 4)) == {}


@pytest.mark.parametrize("text,pos", [("T(1,2) X", 7), ("T(1,9)", 0), ("T(1,2)^0", 0)])
def test_parse_errors_mention_position(text, pos):
    with pytest.raises(ValueError, match="position"):
        parse_braid(text, 4)


def test_torus_bridge_numbers():
    assert torus_bridge_number(2, 3) == 2
    assert torus_bridge_number(1, 7) == 1
    assert torus_bridge_number(10, 11) == 10
    with pytest.raises(ValueError):
        torus_bridge_number(4, 6)


@pytest.mark.parametrize("b,count", [(1, 2), (2, 3), (9, 10)])
def test_one_handle_count(b, count):
    assert one_handle_count(b) == count


def test_presentation_strand_check():
    with pytest.raises(ValueError, match="strands"):
        BridgePresentation(2, PureBraidWord(6))


def test_trivial_one_bridge_skeleton():
    sk = emit_surgery_skeleton(BridgePresentation.trivial(1))
    assert len(sk.dotted_indices()) == 2
    assert "centered" in sk.labels


@pytest.mark.parametrize("b", range(1, 8))
def test_dotted_count_is_bridges_plus_one(b):
    sk = emit_surgery_skeleton(BridgePresentation.trivial(b))
    assert len(sk.dotted_indices()) == one_handle_count(b)
    assert [sk.labels[i] for i in sk.two_handle_indices()] == relation_labels(b)


def test_three_bridge_with_braid():
    pres = BridgePresentation(3, parse_braid("T(2,5)", 6))
    sk = emit_surgery_skeleton(pres)
    assert len(sk.dotted_indices()) == 4
    # strand 2 is in bridge 1, strand 5 in bridge 3
    assert sk.entry(sk.index("centered"), sk.index("comp:3")) == 1
    assert invariants(sk).rank >= 2


def test_relation_rows_sum_to_zero():
    sk = emit_surgery_skeleton(BridgePresentation.trivial(4))
    for lab in relation_labels(4):
        i = sk.index(lab)
        assert sum(sk.entry(i, d) for d in sk.dotted_indices()) == 0
