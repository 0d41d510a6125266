"""Pure-braid words in the generators T(i, j) and bridge-presentation bookkeeping.

The skeleton emitted by :func:`emit_surgery_skeleton` is an algebraic stand-in
for the handle diagram of (S^3 - nu(K)) x S^1 built from an n-bridge
presentation.  Layout convention (fixed, deterministic):

* ``dot:s`` -- dotted 1-handle of the S^1 direction;
* ``dot:x1`` .. ``dot:xb`` -- one dotted 1-handle per bridge;
* ``centered`` -- 0-framed 2-handle running over ``dot:x1`` (+1) and
  ``dot:x2`` (-1); sliding a meridian handle over it moves that handle from
  the first bridge meridian to the second;
* ``comp:i`` for 2 <= i <= b -- 0-framed companion running over ``dot:xi``
  (+1) and ``dot:x(i+1 mod b)`` (-1).

So the 0-framed handles are the abelianized Wirtinger relations x_i = x_{i+1}
arranged in a cycle.  Off-diagonal entries between relation handles i and j
are the exponent sums of T(k, l) with strand k in bridge i and strand l in
bridge j (bridge i owns strands 2i-1 and 2i).  Twists inside one bridge do not
reach the matrix.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from handlecalc.framedlink import FramedLink, Kind


@dataclass(frozen=True)
class PureBraidWord:
    strands: int
    factors: tuple[tuple[int, int, int], ...] = ()

    def problems(self) -> list[str]:
        out = []
        if self.strands < 1:
            out.append(f"strand count {self.strands} must be positive")
        for pos, (i, j, e) in enumerate(self.factors):
            if not 1 <= i < j <= self.strands:
                out.append(f"factor {pos} T({i},{j}) violates 1 <= i < j <= {self.strands}")
            if e == 0:
                out.append(f"factor {pos} has zero exponent")
        return out

    def __mul__(self, other: "PureBraidWord") -> "PureBraidWord":
        if other.strands != self.strands:
            raise ValueError("strand counts differ")
        return PureBraidWord(self.strands, self.factors + other.factors)

    def inverse(self) -> "PureBraidWord":
        return PureBraidWord(self.strands, tuple((i, j, -e) for i, j, e in reversed(self.factors)))

    def artin_letters(self) -> list[int]:
        """Expansion into Artin generators (+-k for sigma_k^{+-1}).

        T(i, j) = s_{j-1} ... s_{i+1} s_i^2 s_{i+1}^{-1} ... s_{j-1}^{-1}.
        """
        out: list[int] = []
        for i, j, e in self.factors:
            up = list(range(j - 1, i, -1))
            core = up + [i, i] + [-k for k in reversed(up)]
            letter = core if e > 0 else [-k for k in reversed(core)]
            out.extend(letter * abs(e))
        return out

    def permutation(self) -> tuple[int, ...]:
        """Underlying strand permutation (1-based images), computed from the Artin expansion."""
        perm = list(range(1, self.strands + 1))
        for s in self.artin_letters():
            k = abs(s)
            perm[k - 1], perm[k] = perm[k], perm[k - 1]
        return tuple(perm)


def validate(word: PureBraidWord) -> tuple[bool, list[str]]:
    problems = word.problems()
    if not problems and word.permutation() != tuple(range(1, word.strands + 1)):
        problems.append("underlying permutation is not the identity")
    return not problems, problems


def abelianize(word: PureBraidWord) -> dict[tuple[int, int], int]:
    total: Counter = Counter()
    for i, j, e in word.factors:
        total[(i, j)] += e
    return {k: v for k, v in sorted(total.items()) if v}


_BRAID_TOKEN = re.compile(r"\s*T\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)(?:\s*\^\s*(-?\d+))?")


def parse_braid(text: str, strands: int) -> PureBraidWord:
    """Parse ``"T(2,5)^2 T(1,3)^-1"``; errors cite the token position."""
    pos = 0
    factors = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _BRAID_TOKEN.match(text, pos)
        if not mt:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ValueError(f"cannot parse braid token at position {at}: {text[at:at + 12]!r}")
        i, j = int(mt.group(1)), int(mt.group(2))
        e = int(mt.group(3)) if mt.group(3) is not None else 1
        if e == 0:
            raise ValueError(f"zero exponent at position {mt.start(1)}")
        if not 1 <= i < j <= strands:
            raise ValueError(f"T({i},{j}) at position {mt.start(1)} is out of range for {strands} strands")
        factors.append((i, j, e))
        pos = mt.end()
    return PureBraidWord(strands, tuple(factors))


@dataclass(frozen=True)
class BridgePresentation:
    bridges: int
    braid: PureBraidWord

    def __post_init__(self):
        if self.bridges < 1:
            raise ValueError("a bridge presentation needs at least one bridge")
        if self.braid.strands != 2 * self.bridges:
            raise ValueError(f"braid has {self.braid.strands} strands, expected {2 * self.bridges}")
        ok, problems = validate(self.braid)
        if not ok:
            raise ValueError("; ".join(problems))

    @classmethod
    def trivial(cls, bridges: int) -> "BridgePresentation":
        return cls(bridges, PureBraidWord(2 * bridges))


def torus_bridge_number(p: int, q: int) -> int:
    if p < 1 or q < 1:
        raise ValueError("torus knot parameters must be positive")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    return min(p, q)


def one_handle_count(b: int) -> int:
    """1-handles of (S^3 - nu(K)) x S^1 from a b-bridge presentation."""
    if b < 1:
        raise ValueError("bridge number must be at least 1")
    return b + 1


def relation_labels(bridges: int) -> list[str]:
    return ["centered"] + [f"comp:{i}" for i in range(2, bridges + 1)]


def emit_surgery_skeleton(pres: BridgePresentation) -> FramedLink:
    b = pres.bridges
    labels = ["dot:s"] + [f"dot:x{i}" for i in range(1, b + 1)] + relation_labels(b)
    kinds = (Kind.DOTTED,) * (b + 1) + (Kind.TWO_HANDLE,) * b
    n = len(labels)
    m = np.zeros((n, n), dtype=np.int64)
    rel0 = b + 1
    for i in range(1, b + 1):
        r = rel0 + i - 1
        nxt = i % b + 1
        if nxt != i:
            m[r, i] += 1
            m[r, nxt] -= 1
            m[i, r], m[nxt, r] = m[r, i], m[r, nxt]
    for (k, l), e in abelianize(pres.braid).items():
        bk, bl = (k + 1) // 2, (l + 1) // 2
        if bk != bl:
            m[rel0 + bk - 1, rel0 + bl - 1] += e
            m[rel0 + bl - 1, rel0 + bk - 1] += e
    return FramedLink(kinds, m, 0, tuple(labels))
