"""Hypothesis strategies for random framed links."""
import numpy as np
from hypothesis import strategies as st

from handlecalc import FramedLink, Kind


@st.composite
def two_handle_links(draw, min_size=2, max_size=6, bound=9):
    n = draw(st.integers(min_size, max_size))
    vals = draw(st.lists(st.integers(-bound, bound), min_size=n * (n + 1) // 2,
                         max_size=n * (n + 1) // 2))
    m = np.zeros((n, n), dtype=np.int64)
    it = iter(vals)
    for i in range(n):
        for j in range(i + 1):
            m[i, j] = m[j, i] = next(it)
    return FramedLink((Kind.TWO_HANDLE,) * n, m)


def random_link(rng, n, bound=9, dotted=0):
    """Symmetric random link; the first ``dotted`` components are 1-handles."""
    m = rng.integers(-bound, bound + 1, size=(n, n))
    m = np.triu(m) + np.triu(m, 1).T
    m[:dotted, :dotted] = 0
    kinds = (Kind.DOTTED,) * dotted + (Kind.TWO_HANDLE,) * (n - dotted)
    return FramedLink(kinds, m.astype(np.int64))
