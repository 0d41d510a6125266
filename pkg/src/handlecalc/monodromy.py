"""Words in the generators a, b of SL(2, Z) and the elliptic monodromy rewriting.

``a = [[1, 1], [0, 1]]`` and ``b = [[1, 0], [-1, 1]]``.  Words are stored
run-length encoded, e.g. ``a^3 b`` is ``(("a", 3), ("b", 1))``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from handlecalc.framedlink import IntegerOverflow

_LIMIT = 1 << 63


@dataclass(frozen=True)
class Sl2Matrix:
    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        if self.m11 * self.m22 - self.m12 * self.m21 != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1")
        if any(abs(x) >= _LIMIT for x in (self.m11, self.m12, self.m21, self.m22)):
            raise IntegerOverflow("SL(2,Z) entry exceeds 64 bits")

    @classmethod
    def identity(cls) -> "Sl2Matrix":
        return cls(1, 0, 0, 1)

    def __matmul__(self, o: "Sl2Matrix") -> "Sl2Matrix":
        return Sl2Matrix(self.m11 * o.m11 + self.m12 * o.m21, self.m11 * o.m12 + self.m12 * o.m22,
                         self.m21 * o.m11 + self.m22 * o.m21, self.m21 * o.m12 + self.m22 * o.m22)

    def inverse(self) -> "Sl2Matrix":
        return Sl2Matrix(self.m22, -self.m12, -self.m21, self.m11)

    def det(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    def rows(self) -> list[list[int]]:
        return [[self.m11, self.m12], [self.m21, self.m22]]


GENERATORS = {"a": Sl2Matrix(1, 1, 0, 1), "b": Sl2Matrix(1, 0, -1, 1)}


def _normalize(runs: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    out: list[tuple[str, int]] = []
    for letter, exp in runs:
        if letter not in GENERATORS:
            raise ValueError(f"unknown generator {letter!r}")
        if exp == 0:
            continue
        if out and out[-1][0] == letter:
            total = out[-1][1] + exp
            out.pop()
            if total:
                out.append((letter, total))
        else:
            out.append((letter, exp))
    return tuple(out)


@dataclass(frozen=True)
class MonodromyWord:
    """Free-monoid-with-inverses word; runs are maximal and nonzero."""

    runs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "runs", _normalize(self.runs))

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[str, int]]) -> "MonodromyWord":
        return cls(tuple(letters))

    @classmethod
    def parse(cls, text: str) -> "MonodromyWord":
        return parse_word(text)

    def letters(self) -> list[tuple[str, int]]:
        """Unit letters ``(g, +-1)`` in order."""
        out = []
        for g, e in self.runs:
            out.extend([(g, 1 if e > 0 else -1)] * abs(e))
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.runs)

    def __mul__(self, other: "MonodromyWord") -> "MonodromyWord":
        return MonodromyWord(self.runs + other.runs)

    def __pow__(self, k: int) -> "MonodromyWord":
        if k < 0:
            return self.inverse() ** (-k)
        return MonodromyWord(self.runs * k)

    def inverse(self) -> "MonodromyWord":
        return MonodromyWord(tuple((g, -e) for g, e in reversed(self.runs)))

    def count(self, letter: str) -> int:
        """Number of occurrences of ``letter`` (either sign)."""
        return sum(abs(e) for g, e in self.runs if g == letter)

    def rotate(self, k: int) -> "MonodromyWord":
        """Move the first ``k`` unit letters to the end."""
        ls = self.letters()
        if not ls:
            return self
        k %= len(ls)
        return MonodromyWord.from_letters(ls[k:] + ls[:k])

    def prefix(self, k: int) -> "MonodromyWord":
        return MonodromyWord.from_letters(self.letters()[:k])

    def __str__(self) -> str:
        if not self.runs:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.runs)


_TOKEN = re.compile(r"\s*(?:(?P<letter>[A-Za-z])|(?P<open>\()|(?P<close>\))|\^\s*(?P<exp>-?\d+))")


def parse_word(text: str) -> MonodromyWord:
    """Parse literals such as ``"(a b)^6"`` or ``"a^3 b a^3 b a^3 b"``."""
    pos = 0
    stack: list[list[tuple[str, int]]] = [[]]
    last: list[tuple[str, int]] | None = None
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"unexpected character {text[pos]!r} at position {pos}")
        if mt.group("letter"):
            g = mt.group("letter")
            if g not in GENERATORS:
                raise ValueError(f"unknown letter {g!r} at position {mt.start('letter')}")
            last = [(g, 1)]
            stack[-1].extend(last)
        elif mt.group("open"):
            stack.append([])
            last = None
        elif mt.group("close"):
            if len(stack) == 1:
                raise ValueError(f"unbalanced ')' at position {mt.start('close')}")
            group = stack.pop()
            stack[-1].extend(group)
            last = group
        else:
            if last is None:
                raise ValueError(f"exponent without a base at position {mt.start()}")
            k = int(mt.group("exp"))
            base = list(last)
            del stack[-1][len(stack[-1]) - len(base):]
            if k < 0:
                base = [(g, -e) for g, e in reversed(base)]
                k = -k
            stack[-1].extend(base * k)
            last = None
        pos = mt.end()
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    return MonodromyWord(tuple(stack[0]))


def evaluate(word: MonodromyWord) -> Sl2Matrix:
    """Left-to-right product of generator matrices."""
    acc = Sl2Matrix.identity()
    for g, e in word.runs:
        step = GENERATORS[g] if e > 0 else GENERATORS[g].inverse()
        for _ in range(abs(e)):
            acc = acc @ step
    return acc


def global_monodromy(n: int) -> MonodromyWord:
    """The word (ab)^{6n} of E(n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return MonodromyWord((("a", 1), ("b", 1)) * (6 * n))


WORD_MIDDLE = MonodromyWord.parse("a^2 b a^3 b a^3 b a")
WORD_NINE_A = MonodromyWord.parse("a^3 b a^3 b a^3 b")


def cyclic_shift(w1: MonodromyWord, w2: MonodromyWord) -> int | None:
    """Smallest k with ``w1.rotate(k) == w2`` on unit letters, else None."""
    l1, l2 = w1.letters(), w2.letters()
    if len(l1) != len(l2):
        return None
    if not l1:
        return 0
    for k in range(len(l1)):
        if l1[k:] + l1[:k] == l2:
            return k
    return None


def cyclically_equal(w1: MonodromyWord, w2: MonodromyWord) -> bool:
    return cyclic_shift(w1, w2) is not None


def conjugation_certificate(word: MonodromyWord, k: int) -> Sl2Matrix:
    """C with eval(rotate(word, k)) = C eval(word) C^-1; C is the inverse of the rotated prefix."""
    return evaluate(word.prefix(k)).inverse()


@dataclass(frozen=True)
class MonodromyReport:
    n: int
    matrices_equal: bool
    cyclic_shift: int | None
    a_count: int
    b_count: int
    conjugator: Sl2Matrix | None
    total_matrix: Sl2Matrix

    @property
    def ok(self) -> bool:
        return (self.matrices_equal and self.cyclic_shift is not None
                and self.a_count == 9 * self.n and self.b_count == 3 * self.n
                and self.total_matrix == Sl2Matrix.identity())

    def failures(self) -> list[str]:
        out = []
        if not self.matrices_equal:
            out.append("eval((ab)^{6n}) != eval((a^2 b a^3 b a^3 b a)^n)")
        if self.cyclic_shift is None:
            out.append("(a^2 b a^3 b a^3 b a)^n is not a rotation of (a^3 b a^3 b a^3 b)^n")
        if (self.a_count, self.b_count) != (9 * self.n, 3 * self.n):
            out.append(f"letter counts {(self.a_count, self.b_count)} != {(9 * self.n, 3 * self.n)}")
        if self.total_matrix != Sl2Matrix.identity():
            out.append("global monodromy is not the identity")
        return out


def verify_monodromy_identity(n: int) -> MonodromyReport:
    if n < 1:
        raise ValueError("n must be at least 1")
    glob = global_monodromy(n)
    middle = WORD_MIDDLE ** n
    right = WORD_NINE_A ** n
    g = evaluate(glob)
    shift = cyclic_shift(middle, right)
    conj = None
    if shift is not None:
        conj = conjugation_certificate(middle, shift)
        if evaluate(right) != conj @ evaluate(middle) @ conj.inverse():
            raise AssertionError("conjugation certificate failed")
    return MonodromyReport(n, g == evaluate(middle), shift, right.count("a"), right.count("b"), conj, g)
