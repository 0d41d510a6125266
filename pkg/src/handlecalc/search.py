"""Breadth-first search over handle slides, deduplicated up to component permutation.

This is the independent check on the constructive scripts: it knows nothing
about chains or unlinking and only explores declared slides.
"""
from __future__ import annotations

import os
import struct
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence


from handlecalc.framedlink import FramedLink, MoveScript, Slide, replay, slide

DEFAULT_MAX_STATES = 2_000_000
MAX_STATES_ENV = "HANDLECALC_MAX_STATES"


def default_max_states() -> int:
    return int(os.environ.get(MAX_STATES_ENV, DEFAULT_MAX_STATES))


# --- canonical form ----------------------------------------------------------


def _refine(m: list[list[int]], colors: list[int]) -> list[int]:
    n = len(colors)
    while True:
        sigs = [(colors[i], tuple(sorted((colors[k], m[i][k]) for k in range(n) if k != i)))
                for i in range(n)]
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _twins(m, base, u, v) -> bool:
    if base[u] != base[v] or m[u][u] != m[v][v]:
        return False
    ru, rv = m[u], m[v]
    return all(ru[k] == rv[k] for k in range(len(m)) if k != u and k != v)


def _certificate(m, base, order):
    return (tuple(base[i] for i in order),
            tuple(m[i][j] for a, i in enumerate(order) for j in order[a:]))


def canonical_form(link: FramedLink, colors: Sequence[int] | None = None) -> tuple:
    """Lexicographically least certificate over an invariant search tree.

    Components are first ordered by (colour, kind, framing, multiset of
    |off-diagonal| entries), then refined by neighbour colours; remaining ties
    are broken by individualising each candidate (skipping twins) and keeping
    the smallest resulting matrix.
    """
    n = link.size
    m = link.linking.tolist()
    cols = list(colors) if colors is not None else [0] * n
    init = [(cols[i], link.kinds[i].value, m[i][i],
             tuple(sorted(abs(m[i][k]) for k in range(n) if k != i))) for i in range(n)]
    ranking = {s: r for r, s in enumerate(sorted(set(init)))}
    base = [ranking[s] for s in init]
    best = None

    def descend(c):
        nonlocal best
        c = _refine(m, c)
        if len(set(c)) == n:
            cert = _certificate(m, base, sorted(range(n), key=lambda i: c[i]))
            if best is None or cert < best:
                best = cert
            return
        cell_color = min(x for x in set(c) if c.count(x) > 1)
        cell = [i for i in range(n) if c[i] == cell_color]
        tried: list[int] = []
        for v in cell:
            if any(_twins(m, base, v, u) for u in tried):
                continue
            tried.append(v)
            nc = [2 * x + (0 if i == v or x != cell_color else 1) for i, x in enumerate(c)]
            descend(nc)

    if n:
        descend(list(base))
    kinds = tuple(sorted((init[i][:2] for i in range(n))))
    return (link.three_handles, n, kinds, best)


def canonical_key(link: FramedLink, colors: Sequence[int] | None = None) -> bytes:
    """Permutation-invariant byte key (stable across runs and platforms)."""
    three, n, kinds, cert = canonical_form(link, colors)
    out = [struct.pack(">qq", three, n)]
    for col, kind in kinds:
        out.append(struct.pack(">q", col) + kind.encode())
    if cert is not None:
        out.append(struct.pack(f">{len(cert[0])}q", *cert[0]))
        out.append(struct.pack(f">{len(cert[1])}q", *cert[1]))
    return b"|".join(out)


def equal_up_to_permutation(a: FramedLink, b: FramedLink) -> bool:
    return a.size == b.size and canonical_key(a) == canonical_key(b)


# --- problems ------------------------------------------------------------------


@dataclass(frozen=True)
class MutualLinkingZero:
    pair: tuple[int, int]
    framings: tuple[int, int] | None = None

    def __call__(self, link: FramedLink) -> bool:
        a, b = self.pair
        if link.entry(a, b):
            return False
        if self.framings is None:
            return True
        return sorted((link.framing(a), link.framing(b))) == sorted(self.framings)

    def describe(self) -> dict:
        return {"goal": "mutual_linking_zero", "pair": list(self.pair),
                "framings": None if self.framings is None else list(self.framings)}


@dataclass(frozen=True, eq=False)
class MatrixEquals:
    target: FramedLink
    key: bytes = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "key", canonical_key(self.target))

    def __call__(self, link: FramedLink) -> bool:
        return link.size == self.target.size and canonical_key(link) == self.key

    def describe(self) -> dict:
        return {"goal": "matrix_equals", "target": self.target.to_dict()}


Goal = MutualLinkingZero | MatrixEquals


@dataclass(frozen=True, eq=False)
class SearchProblem:
    initial: FramedLink
    goal: Goal
    moves: tuple[Slide, ...]
    max_depth: int
    marked: tuple[int, ...] = ()
    max_states: int = field(default_factory=default_max_states)

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        object.__setattr__(self, "moves", tuple(sorted(self.moves, key=lambda s: (s.rider, s.over, s.sign))))

    def colors(self) -> list[int]:
        return [1 if i in self.marked else 0 for i in range(self.initial.size)]


def slide_moves(riders: Sequence[int], overs: Sequence[int], signs: Sequence[int] = (-1, 1)) -> tuple[Slide, ...]:
    return tuple(Slide(r, o, s) for r in riders for o in overs if r != o for s in signs)


@dataclass
class SearchResult:
    found: bool
    script: MoveScript | None
    states_explored: int
    canonical_dedup_hits: int
    status: str = "searched"
    depth_reached: int = 0
    peak_frontier: int = 0
    elapsed: float = 0.0

    def summary(self) -> dict:
        return {"found": self.found, "status": self.status,
                "witness_length": None if self.script is None else len(self.script),
                "states_explored": self.states_explored,
                "canonical_dedup_hits": self.canonical_dedup_hits,
                "depth_reached": self.depth_reached, "peak_frontier": self.peak_frontier}


def search(problem: SearchProblem) -> SearchResult:
    """Shortest witness within ``max_depth`` slides, or found=False.

    Not finding a witness only means none exists within the depth bound.
    Exceeding ``max_states`` stored states yields status ``"memory_exceeded"``.
    """
    t0 = time.perf_counter()
    colors = problem.colors()
    start = problem.initial
    goal = problem.goal
    if goal(start):
        return SearchResult(True, MoveScript(()), 1, 0, elapsed=time.perf_counter() - t0)
    seen_raw = {start.linking.tobytes()}
    seen = {canonical_key(start, colors)}
    frontier = deque([(start, ())])
    explored = 1
    hits = 0
    peak = 1
    for depth in range(problem.max_depth):
        nxt = deque()
        while frontier:
            link, path = frontier.popleft()
            for mv in problem.moves:
                child = slide(link, mv)
                raw = child.linking.tobytes()
                if raw in seen_raw:
                    hits += 1
                    continue
                seen_raw.add(raw)
                key = canonical_key(child, colors)
                if key in seen:
                    hits += 1
                    continue
                seen.add(key)
                explored += 1
                cpath = path + (mv,)
                if goal(child):
                    script = MoveScript(cpath, "search-witness")
                    final = replay(start, script, certify=False).link
                    if not goal(final):
                        raise AssertionError("search witness does not replay to the goal")
                    return SearchResult(True, script, explored, hits, depth_reached=depth + 1,
                                        peak_frontier=max(peak, len(nxt)),
                                        elapsed=time.perf_counter() - t0)
                if len(seen_raw) + len(seen) > problem.max_states:
                    return SearchResult(False, None, explored, hits, "memory_exceeded", depth + 1, peak,
                                        time.perf_counter() - t0)
                nxt.append((child, cpath))
        peak = max(peak, len(nxt))
        frontier = nxt
        if not frontier:
            return SearchResult(False, None, explored, hits, "exhausted", depth + 1, peak,
                                time.perf_counter() - t0)
    return SearchResult(False, None, explored, hits, "depth_bound", problem.max_depth, peak,
                        time.perf_counter() - t0)


def cross_validate(script: MoveScript, problem: SearchProblem, witness: SearchResult | None = None) -> dict:
    """Check a constructive script against the problem's goal and a search witness."""
    final = replay(problem.initial, script, certify=False).link
    out = {"goal": problem.goal.describe(), "script_length": len(script),
           "constructive_reaches_goal": bool(problem.goal(final))}
    if witness is None:
        witness = search(problem)
    out["search"] = witness.summary()
    if witness.found:
        found_final = replay(problem.initial, witness.script, certify=False).link
        agree = equal_up_to_permutation(final, found_final)
        out["finals_agree_up_to_permutation"] = agree
        if not agree:
            out["constructive_final"] = final.linking.tolist()
            out["witness_final"] = found_final.linking.tolist()
    out["passed"] = out["constructive_reaches_goal"] and out.get("finals_agree_up_to_permutation", True)
    if not out["constructive_reaches_goal"]:
        out["constructive_final"] = final.linking.tolist()
    return out


def unlink_problem(m: int, chain_length: int | None = None, max_depth: int = 25,
                   signs: Sequence[int] = (-1, 1), target: FramedLink | None = None) -> SearchProblem:
    """Pair after setup plus a split -2-chain; slides of the pair over chain members.

    The default goal is mutual linking 0 with the closed-form framings; with
    ``target`` it is equality with ``target`` up to permutation.
    """
    from handlecalc.unlink import unlink_framings, unlink_instance

    _, _, state = unlink_instance(m, chain_length)
    pair = (state.index("h0"), state.index("h1"))
    chain = [i for i in range(state.size) if i not in pair]
    goal: Goal = MatrixEquals(target) if target is not None else MutualLinkingZero(pair, unlink_framings(m))
    return SearchProblem(state, goal, slide_moves(pair, chain, signs), max_depth, marked=pair)
