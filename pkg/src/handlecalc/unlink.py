"""Splitting a -m-linked pair of meridian 2-handles with a -2-chain of length m+1.

Let ``(A, B)`` be the pair, framings (-m, -m) and mutual linking -m, and
``C1 .. C(m+1)`` the chain.  The script slides the pair's second member over
the odd-numbered chain members and the first member over the even-numbered
ones, all with sign +1, in chain order.  In the lattice this replaces the
pair by ``A + sum(C_even)`` and ``B + sum(C_odd)``; the two sums pair to +m,
which cancels the -m linking, and their norms give the parity-dependent
framings.

Stages: the first two slides form the base block and take the linking from
-m to -(m-1); every later slide is one recursive stage removing one more unit
of linking and one chain member from play.  The recorded ``(m, c)`` pairs
keep ``c = m + 1`` (chain members still in play, counting the frontier).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from handlecalc.chain import chain_matrix, is_chain
from handlecalc.framedlink import FramedLink, HandleError, MoveScript, ScriptBuilder


def pair_setup(n: int, base: FramedLink | None = None, h0: str = "h0", h1: str = "h1"
               ) -> tuple[MoveScript, FramedLink]:
    """Mint ``h1`` as a 2-/3-canceling pair and slide it over the -n-framed ``h0``.

    Without ``base`` a lone -n-framed ``h0`` is created first (not part of the script).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if base is None:
        base = FramedLink.from_framings([-n], labels=[h0])
    elif base.framing(base.index(h0)) != -n:
        raise HandleError(f"{h0} is not -{n}-framed")
    b = ScriptBuilder(base, name=f"pair-setup-{n}")
    b.add_pair(h1)
    b.slide(h1, h0, +1)
    return b.script(), b.link


def unlink_framings(m: int) -> tuple[int, int]:
    if m < 1:
        raise ValueError("m must be at least 1")
    if m % 2:
        return (-2 * m - 1, -2 * m - 1)
    return (-2 * m, -2 * m - 2)


def double_unlink_framings(n: int) -> tuple[int, int, int, int]:
    if n < 2:
        raise ValueError("the second unlinking stage needs n >= 2")
    if n % 2:
        t = (-4 * n - 3,) * 4
    else:
        t = (-4 * n, -4 * n - 2, -4 * n - 4, -4 * n - 6)
    first = unlink_framings(n)
    composed = unlink_framings(-first[0]) + unlink_framings(-first[1])
    if composed != t:
        raise AssertionError(f"closed form {t} disagrees with composed unlinkings {composed}")
    return t


def stage_two_chain_needs(n: int) -> tuple[int, int]:
    """Chain lengths needed to unlink the two second-stage pairs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    f0, f1 = unlink_framings(n)
    return (-f0 + 1, -f1 + 1)


@dataclass(frozen=True)
class Stage:
    linking: int
    components: int
    slides: tuple[int, ...]

    def to_dict(self):
        return {"m": self.linking, "c": self.components, "slides": list(self.slides)}


@dataclass(frozen=True)
class UnlinkResult:
    script: MoveScript
    link: FramedLink
    pair: tuple[int, int]
    chain: tuple[int, ...]
    m: int
    stages: tuple[Stage, ...]

    @property
    def framings(self) -> tuple[int, int]:
        return (self.link.framing(self.pair[0]), self.link.framing(self.pair[1]))

    @property
    def mutual_linking(self) -> int:
        return self.link.entry(*self.pair)

    def chain_linking(self) -> list[list[int]]:
        return [[self.link.entry(p, c) for c in self.chain] for p in self.pair]

    @property
    def depth(self) -> int:
        """Number of recursive stages after the base block."""
        return len(self.stages) - 1

    def report(self) -> dict:
        return {"m": self.m, "framings": list(self.framings), "mutual_linking": self.mutual_linking,
                "stages": [s.to_dict() for s in self.stages],
                "pair_chain_linking": self.chain_linking()}


def unlink_pair(state: FramedLink, pair: Sequence[int], chain: Sequence[int]) -> UnlinkResult:
    """Untie the pair using the leading ``m + 1`` members of ``chain``."""
    a, b = pair
    if a == b or state.is_dotted(a) or state.is_dotted(b):
        raise HandleError("pair must be two distinct 2-handles")
    link0 = state.entry(a, b)
    if link0 >= 0:
        raise HandleError(f"pair linking {link0} is not negative")
    m = -link0
    chain = list(chain)
    if len(chain) < m + 1:
        raise HandleError(f"budget violation: unlinking a -{m}-linked pair needs a -2-chain of "
                          f"length {m + 1}, got {len(chain)}")
    used = chain[:m + 1]
    if not is_chain(state, used):
        raise HandleError("chain indices do not form a -2-chain")
    if any(state.entry(p, c) for p in pair for c in used):
        raise HandleError("pair must start unlinked from the chain")
    builder = ScriptBuilder(state, name=f"unlink-{m}")
    stages = []
    for pos, c in enumerate(used, 1):
        rider = b if pos % 2 else a
        builder.slide(rider, c, +1)
        k = -builder.link.entry(a, b)
        if pos == 2:
            stages.append(Stage(k, k + 1, (0, 1)))
        elif pos > 2:
            stages.append(Stage(k, k + 1, (pos - 1,)))
    link = builder.link
    if link.entry(a, b) != 0:
        raise AssertionError("unlinking script left a nonzero mutual linking")
    if (link.framing(a), link.framing(b)) != unlink_framings(m):
        raise AssertionError("unlinking script missed the closed-form framings")
    return UnlinkResult(builder.script(), link, (a, b), tuple(used), m, tuple(stages))


def unlink_instance(m: int, chain_length: int | None = None) -> tuple[FramedLink, MoveScript, FramedLink]:
    """-m-framed ``h0`` beside a split -2-chain, then the pair setup.

    Returns (initial link, pair-setup script, state ready for unlinking).
    """
    k = m + 1 if chain_length is None else chain_length
    n = 1 + k
    mat = np.zeros((n, n), dtype=np.int64)
    mat[0, 0] = -m
    mat[1:, 1:] = chain_matrix(k)
    initial = FramedLink.from_framings(list(np.diag(mat)), mat,
                                       ["h0"] + [f"chain:{i}" for i in range(1, k + 1)])
    setup, state = pair_setup(m, initial)
    return initial, setup, state


def setup_and_unlink(m: int) -> tuple[FramedLink, MoveScript, UnlinkResult]:
    """Standalone run: returns the initial link, the full script and the unlinking result."""
    initial, setup, state = unlink_instance(m)
    pair = (state.index("h0"), state.index("h1"))
    chain = [state.index(f"chain:{i}") for i in range(1, m + 2)]
    res = unlink_pair(state, pair, chain)
    return initial, setup + res.script, res


@dataclass(frozen=True)
class BudgetLedger:
    n: int
    total_chain: int
    stage1_active: int
    separator: int
    remainder: int
    stage2_need: int
    stage2_parity_split: tuple[int, int]

    @property
    def stage2_feasible(self) -> bool:
        return self.stage2_need <= self.remainder

    def rows(self) -> list[tuple[str, int | bool]]:
        return [("totalChain", self.total_chain), ("stage1Active", self.stage1_active),
                ("separator", self.separator), ("remainder", self.remainder),
                ("stage2Need", self.stage2_need), ("stage2Feasible", self.stage2_feasible)]


def budget_ledger(n: int) -> BudgetLedger:
    if n < 1:
        raise ValueError("n must be at least 1")
    total = 9 * n - 1
    active = n + 1
    remainder = total - active - 1
    split = stage_two_chain_needs(n)
    need = split[0] + 1 + split[1]
    if need != 4 * n + 5:
        raise AssertionError(f"stage-2 need {need} != 4n+5")
    return BudgetLedger(n, total, active, 1, remainder, need, split)
