import pytest
from hypothesis import given, settings, strategies as st

from handlecalc import intalg
from oracles import det_cofactor, determinantal_divisors, inertia_jacobi


def sym(draw_vals, n):
    it = iter(draw_vals)
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            m[i][j] = m[j][i] = next(it)
    return m


@st.composite
def symmetric(draw, max_n=5, bound=7):
    n = draw(st.integers(1, max_n))
    return sym(draw(st.lists(st.integers(-bound, bound), min_size=n * (n + 1) // 2,
                             max_size=n * (n + 1) // 2)), n)


def test_divisors_of_hyperbolic_plane():
    assert intalg.elementary_divisors([[0, 1], [1, 0]]) == [1, 1]


def test_divisors_keep_zeros_last():
    assert intalg.elementary_divisors([[0, 0], [0, 4]]) == [4, 0]
    assert intalg.elementary_divisors([[2, 0], [0, 3]]) == [1, 6]


def test_non_square_rejected():
    with pytest.raises(ValueError):
        intalg.elementary_divisors([[1, 2]])


def test_inertia_of_zero_diagonal_matrix():
    assert intalg.inertia([[0, 2, 0], [2, 0, 0], [0, 0, 0]]) == (1, 1, 1)


@settings(max_examples=150, deadline=None)
@given(symmetric())
def test_divisor_chain_and_minors(m):
    divs = intalg.elementary_divisors(m)
    nz = [d for d in divs if d]
    assert divs == nz + [0] * (len(divs) - len(nz))
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert divs == determinantal_divisors(m)


@settings(max_examples=150, deadline=None)
@given(symmetric())
def test_inertia_and_determinant_oracles(m):
    pos, neg, zero = intalg.inertia(m)
    assert (pos, neg) == inertia_jacobi(m)
    assert pos + neg + zero == len(m)
    assert intalg.signature(m) == pos - neg
    assert intalg.det_bareiss(m) == det_cofactor(m)
    prod = 1
    for d in intalg.elementary_divisors(m):
        prod *= d
    assert prod == abs(det_cofactor(m))
