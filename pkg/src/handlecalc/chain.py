"""-2-chains built by handle slides from parallel -1-framed vanishing cycles.

Parallel copies of a vanishing cycle are pushed off along the fiber, so they
carry pairwise linking 0 while each is framed -1.  Sliding copy i over copy
i+1 with sign -1 turns it into a -2-framed unknot linking its neighbours once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from handlecalc.framedlink import (FramedLink, HandleError, MoveScript, ScriptBuilder,
                                   SelectSublink)


def chain_matrix(length: int, adjacency: int = 1) -> np.ndarray:
    m = np.zeros((length, length), dtype=np.int64)
    for i in range(length):
        m[i, i] = -2
        if i + 1 < length:
            m[i, i + 1] = m[i + 1, i] = adjacency
    return m


def is_chain(link: FramedLink, indices: Sequence[int], adjacency: int = 1) -> bool:
    """True when ``indices`` span a -2-chain: consecutive entries ``adjacency``, others 0."""
    idx = list(indices)
    if not idx or any(link.is_dotted(i) for i in idx):
        return False
    return np.array_equal(link.linking[np.ix_(idx, idx)], chain_matrix(len(idx), adjacency))


def parallel_cycles(k: int, framing: int = -1, pushoff_linking: int = 0,
                    prefix: str = "cyc") -> FramedLink:
    """``k`` parallel framed copies of one curve.

    ``pushoff_linking`` is the mutual linking of two copies; fiber push-offs
    of a vanishing cycle have 0.
    """
    if k < 1:
        raise ValueError("need at least one component")
    m = np.full((k, k), pushoff_linking, dtype=np.int64)
    np.fill_diagonal(m, framing)
    return FramedLink.from_framings([framing] * k, m, [f"{prefix}:{i}" for i in range(1, k + 1)])


@dataclass(frozen=True)
class ChainBuild:
    script: MoveScript
    link: FramedLink
    chain: tuple[int, ...]
    residual: int
    residual_linking: tuple[int, ...]

    def annotation(self) -> dict:
        roles = {str(i): f"chain:{p}" for p, i in enumerate(self.chain, 1)}
        roles[str(self.residual)] = "residual"
        return {"roles": roles, "residual_linking": list(self.residual_linking)}


def chain_slides(builder: ScriptBuilder, members: Sequence[int]) -> None:
    """Slide members[i] over members[i+1] with sign -1 for every consecutive pair."""
    for a, b in zip(members, members[1:]):
        builder.slide(a, b, -1)


def build_chain(k: int) -> ChainBuild:
    """Chain of length k-1 plus the residual -1 copy, from k parallel -1 cycles."""
    if k < 2:
        raise ValueError("build_chain needs k >= 2")
    start = parallel_cycles(k)
    b = ScriptBuilder(start, name=f"chain-{k}")
    chain_slides(b, list(range(k)))
    chain = tuple(range(k - 1))
    res = k - 1
    link = b.link.relabel({i: f"chain:{i + 1}" for i in chain} | {res: "residual"})
    return ChainBuild(b.script(), link, chain, res,
                      tuple(int(link.linking[res, i]) for i in chain))


@dataclass(frozen=True)
class ChainSelection:
    link: FramedLink
    active: tuple[int, ...]
    dropped: int
    reserved: tuple[int, ...]
    move: SelectSublink


def select_subchain(link: FramedLink, chain: Sequence[int], drop_position: int) -> ChainSelection:
    """Set aside the chain member at 1-based ``drop_position`` and everything after it.

    The reserved components stay in the diagram; only labels change.
    """
    chain = list(chain)
    if not is_chain(link, chain):
        raise HandleError("indices do not form a -2-chain")
    if not 1 <= drop_position <= len(chain):
        raise HandleError(f"drop position {drop_position} outside chain of length {len(chain)}")
    active = tuple(chain[:drop_position - 1])
    if not active:
        raise HandleError("dropping the first member leaves an empty active chain")
    dropped = chain[drop_position - 1]
    reserved = tuple(chain[drop_position:])
    labels = {i: f"chain:{p}" for p, i in enumerate(active, 1)}
    labels[dropped] = "separator:0"
    labels |= {i: f"reserve:{p}" for p, i in enumerate(reserved, 1)}
    return ChainSelection(link.relabel(labels), active, dropped, reserved,
                          SelectSublink(active, "active-chain"))
