"""Framed links at the linking-matrix level and the moves of the handle calculus.

A :class:`FramedLink` is the algebraic shadow of a Kirby diagram: an ordered
list of components (framed 2-handles or dotted 1-handles), a symmetric integer
linking matrix whose diagonal holds the framings, and a count of 3-handles.
Every move is a pure function returning a new link.

Dotted rows record algebraic run-through counts of 2-handles over the
1-handle.  Dotted diagonals and dotted-dotted entries are always 0.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from handlecalc import intalg

LINK_SCHEMA = "flk-1"
SCRIPT_SCHEMA = "mvs-1"

# |entry| bound kept so that a single slide cannot leave int64
_ENTRY_LIMIT = 1 << 60


class HandleError(ValueError):
    """A move precondition failed."""


class IntegerOverflow(OverflowError):
    """An entry left the fixed-width range; never wrapped silently."""


class Kind(enum.Enum):
    TWO_HANDLE = "two_handle"
    DOTTED = "dotted"


def _check_range(values: np.ndarray) -> None:
    if values.size and int(np.abs(values).max()) >= _ENTRY_LIMIT:
        raise IntegerOverflow("linking entry exceeds the 61-bit working range")


@dataclass(frozen=True, eq=False)
class FramedLink:
    kinds: tuple[Kind, ...]
    linking: np.ndarray
    three_handles: int = 0
    labels: tuple[str | None, ...] = ()

    def __post_init__(self):
        kinds = tuple(Kind(k) for k in self.kinds)
        n = len(kinds)
        raw = self.linking
        if not (isinstance(raw, np.ndarray) and raw.dtype == np.int64):
            if any(abs(int(x)) >= _ENTRY_LIMIT for x in np.asarray(raw, dtype=object).ravel()):
                raise IntegerOverflow("linking entry exceeds the 61-bit working range")
        try:
            m = np.array(raw, dtype=np.int64).reshape(n, n)
        except ValueError as exc:
            raise HandleError(f"linking matrix is not {n}x{n}") from exc
        _check_range(m)
        if not np.array_equal(m, m.T):
            raise HandleError("linking matrix is not symmetric")
        dotted = np.array([k is Kind.DOTTED for k in kinds], dtype=bool)
        if dotted.any() and m[np.ix_(dotted, dotted)].any():
            raise HandleError("dotted components must have zero diagonal and zero mutual entries")
        if self.three_handles < 0:
            raise HandleError("three_handles must be non-negative")
        labels = tuple(self.labels) if self.labels else (None,) * n
        if len(labels) != n:
            raise HandleError("labels length does not match component count")
        m.setflags(write=False)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "linking", m)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def _trusted(cls, kinds, linking, three_handles, labels) -> "FramedLink":
        # moves build their results from already-valid links and range-check
        # the entries they change; skip full re-validation
        linking.setflags(write=False)
        obj = object.__new__(cls)
        object.__setattr__(obj, "kinds", kinds)
        object.__setattr__(obj, "linking", linking)
        object.__setattr__(obj, "three_handles", three_handles)
        object.__setattr__(obj, "labels", labels)
        return obj

    # construction helpers

    @classmethod
    def empty(cls) -> "FramedLink":
        return cls((), np.zeros((0, 0), dtype=np.int64))

    @classmethod
    def from_framings(cls, framings: Sequence[int], linking: Sequence[Sequence[int]] | None = None,
                      labels: Sequence[str | None] | None = None, three_handles: int = 0) -> "FramedLink":
        """All-2-handle link; ``linking`` off-diagonals default to 0."""
        n = len(framings)
        m = np.zeros((n, n), dtype=np.int64) if linking is None else np.array(linking, dtype=np.int64)
        m = m.copy()
        np.fill_diagonal(m, framings)
        return cls((Kind.TWO_HANDLE,) * n, m, three_handles, tuple(labels or ()))

    # accessors

    def __len__(self) -> int:
        return len(self.kinds)

    @property
    def size(self) -> int:
        return len(self.kinds)

    def framing(self, i: int) -> int:
        if self.kinds[i] is Kind.DOTTED:
            raise HandleError(f"component {i} is a dotted 1-handle and carries no framing")
        return int(self.linking[i, i])

    def framings(self) -> list[int | None]:
        return [None if k is Kind.DOTTED else int(self.linking[i, i]) for i, k in enumerate(self.kinds)]

    def entry(self, i: int, j: int) -> int:
        return int(self.linking[i, j])

    def is_dotted(self, i: int) -> bool:
        return self.kinds[i] is Kind.DOTTED

    def dotted_indices(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k is Kind.DOTTED]

    def two_handle_indices(self) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k is Kind.TWO_HANDLE]

    def two_handle_block(self) -> np.ndarray:
        idx = self.two_handle_indices()
        return self.linking[np.ix_(idx, idx)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no component labelled {label!r}") from None

    def with_labels(self, labels: Sequence[str | None]) -> "FramedLink":
        return FramedLink(self.kinds, self.linking, self.three_handles, tuple(labels))

    def relabel(self, mapping: dict[int, str | None]) -> "FramedLink":
        labels = list(self.labels)
        for i, lab in mapping.items():
            labels[i] = lab
        return self.with_labels(labels)

    def permute(self, order: Sequence[int]) -> "FramedLink":
        """Component ``k`` of the result is component ``order[k]`` of ``self``."""
        order = list(order)
        if sorted(order) != list(range(self.size)):
            raise HandleError("not a permutation of the components")
        m = self.linking[np.ix_(order, order)]
        return FramedLink(tuple(self.kinds[i] for i in order), m, self.three_handles,
                          tuple(self.labels[i] for i in order))

    def __eq__(self, other):
        if not isinstance(other, FramedLink):
            return NotImplemented
        return (self.kinds == other.kinds and self.three_handles == other.three_handles
                and self.labels == other.labels and np.array_equal(self.linking, other.linking))

    def same_matrix(self, other: "FramedLink") -> bool:
        """Equality ignoring labels."""
        return (self.kinds == other.kinds and self.three_handles == other.three_handles
                and np.array_equal(self.linking, other.linking))

    def __hash__(self):
        return hash((self.kinds, self.three_handles, self.labels, self.linking.tobytes()))

    def __repr__(self):
        return (f"FramedLink(kinds={[k.value for k in self.kinds]}, "
                f"linking={self.linking.tolist()}, three_handles={self.three_handles})")

    # serialization

    def to_dict(self) -> dict:
        comps = []
        for i, k in enumerate(self.kinds):
            c: dict = {"kind": k.value}
            if k is Kind.TWO_HANDLE:
                c["framing"] = int(self.linking[i, i])
            if self.labels[i] is not None:
                c["label"] = self.labels[i]
            comps.append(c)
        lower = [int(self.linking[i, j]) for i in range(self.size) for j in range(i + 1)]
        return {"schema": LINK_SCHEMA, "components": comps, "linking_lower": lower,
                "three_handles": self.three_handles}

    @classmethod
    def from_dict(cls, data: dict) -> "FramedLink":
        if data.get("schema") != LINK_SCHEMA:
            raise HandleError(f"expected schema {LINK_SCHEMA!r}, got {data.get('schema')!r}")
        comps = data["components"]
        n = len(comps)
        lower = data["linking_lower"]
        if len(lower) != n * (n + 1) // 2:
            raise HandleError("linking_lower has the wrong length")
        m = [[0] * n for _ in range(n)]
        it = iter(lower)
        for i in range(n):
            for j in range(i + 1):
                v = int(next(it))
                m[i][j] = m[j][i] = v
        kinds = []
        for i, c in enumerate(comps):
            kind = Kind(c["kind"])
            kinds.append(kind)
            if kind is Kind.TWO_HANDLE and "framing" in c and c["framing"] != m[i][i]:
                raise HandleError(f"component {i}: framing disagrees with the diagonal")
        return cls(tuple(kinds), np.array(m, dtype=object) if n else np.zeros((0, 0), dtype=np.int64),
                   int(data.get("three_handles", 0)), tuple(c.get("label") for c in comps))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FramedLink":
        return cls.from_dict(json.loads(text))


# --- moves -----------------------------------------------------------------


@dataclass(frozen=True)
class Slide:
    rider: int
    over: int
    sign: int = 1


@dataclass(frozen=True)
class AddCancelingPair:
    label: str | None = None


@dataclass(frozen=True)
class Cancel12:
    dotted: int
    handle: int


@dataclass(frozen=True)
class BlowUp:
    sign: int
    label: str | None = None


@dataclass(frozen=True)
class BlowDown:
    index: int


@dataclass(frozen=True)
class SelectSublink:
    """Matrix no-op that records a selection (used for chain reservations)."""
    indices: tuple[int, ...]
    tag: str = ""


Move = Union[Slide, AddCancelingPair, Cancel12, BlowUp, BlowDown, SelectSublink]

_MOVE_TAGS = {Slide: "slide", AddCancelingPair: "add_canceling_pair", Cancel12: "cancel12",
              BlowUp: "blow_up", BlowDown: "blow_down", SelectSublink: "select_sublink"}


def move_to_dict(move: Move) -> dict:
    d = {"op": _MOVE_TAGS[type(move)]}
    for k, v in move.__dict__.items():
        if v is None:
            continue
        d[k] = list(v) if isinstance(v, tuple) else v
    return d


def move_from_dict(d: dict) -> Move:
    d = dict(d)
    op = d.pop("op")
    for cls, tag in _MOVE_TAGS.items():
        if tag == op:
            if cls is SelectSublink:
                d["indices"] = tuple(int(i) for i in d.get("indices", ()))
            return cls(**d)
    raise HandleError(f"unknown move {op!r}")


@dataclass(frozen=True)
class MoveScript:
    moves: tuple[Move, ...] = ()
    name: str = ""

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __add__(self, other: "MoveScript") -> "MoveScript":
        return MoveScript(self.moves + other.moves, self.name)

    def to_dict(self) -> dict:
        d = {"schema": SCRIPT_SCHEMA, "moves": [move_to_dict(m) for m in self.moves]}
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "MoveScript":
        if data.get("schema") != SCRIPT_SCHEMA:
            raise HandleError(f"expected schema {SCRIPT_SCHEMA!r}, got {data.get('schema')!r}")
        return cls(tuple(move_from_dict(m) for m in data["moves"]), data.get("name", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MoveScript":
        return cls.from_dict(json.loads(text))


def _check_index(link: FramedLink, i: int, what: str) -> None:
    if not isinstance(i, (int, np.integer)) or not 0 <= i < link.size:
        raise HandleError(f"{what} index {i} out of range for {link.size} components")


def slide(link: FramedLink, move: Slide) -> FramedLink:
    """Band-sum the rider with the ``over`` handle (sign +1 adds, -1 subtracts).

    On the 2-handle block this is the congruence ``E^T M E`` where ``E`` adds
    ``sign`` times column ``over`` to column ``rider``.
    """
    i, j, eps = move.rider, move.over, move.sign
    _check_index(link, i, "rider")
    _check_index(link, j, "over")
    if i == j:
        raise HandleError("a component cannot slide over itself")
    if eps not in (1, -1):
        raise HandleError(f"slide sign must be +1 or -1, got {eps}")
    if link.is_dotted(i) or link.is_dotted(j):
        raise HandleError("slides are only defined between 2-handles")
    m = link.linking
    _check_range(np.concatenate([m[i], m[j]]) * 4)
    new = m.copy()
    fi = int(m[i, i]) + int(m[j, j]) + 2 * eps * int(m[i, j])
    lij = int(m[i, j]) + eps * int(m[j, j])
    row = m[i] + eps * m[j]
    new[i, :] = row
    new[:, i] = row
    new[i, j] = new[j, i] = lij
    new[i, i] = fi
    _check_range(new[i])
    return FramedLink._trusted(link.kinds, new, link.three_handles, link.labels)


def add_canceling_pair(link: FramedLink, label: str | None = None) -> FramedLink:
    """Append a split 0-framed unknot together with its canceling 3-handle."""
    n = link.size
    m = np.zeros((n + 1, n + 1), dtype=np.int64)
    m[:n, :n] = link.linking
    return FramedLink(link.kinds + (Kind.TWO_HANDLE,), m, link.three_handles + 1, link.labels + (label,))


def _drop(link: FramedLink, idx: Iterable[int]) -> FramedLink:
    gone = set(idx)
    keep = [k for k in range(link.size) if k not in gone]
    return FramedLink._trusted(tuple(link.kinds[k] for k in keep), link.linking[np.ix_(keep, keep)],
                               link.three_handles, tuple(link.labels[k] for k in keep))


def cancel12(link: FramedLink, dotted: int, handle: int) -> FramedLink:
    _check_index(link, dotted, "dotted")
    _check_index(link, handle, "handle")
    if not link.is_dotted(dotted):
        raise HandleError(f"component {dotted} is not a dotted 1-handle")
    if link.is_dotted(handle):
        raise HandleError(f"component {handle} is not a 2-handle")
    m = link.linking
    if abs(int(m[dotted, handle])) != 1:
        raise HandleError(f"handle {handle} runs over dotted {dotted} algebraically "
                          f"{int(m[dotted, handle])} times, need +-1")
    for k in range(link.size):
        if k not in (dotted, handle) and m[dotted, k]:
            raise HandleError(f"residual link: component {k} ({link.labels[k]}) runs over dotted "
                              f"{dotted} with multiplicity {int(m[dotted, k])}")
    for k in link.dotted_indices():
        if k != dotted and m[handle, k]:
            raise HandleError(f"residual link: handle {handle} also runs over dotted component {k} "
                              f"({link.labels[k]}) with multiplicity {int(m[handle, k])}")
    return _drop(link, (dotted, handle))


def blow_up(link: FramedLink, sign: int, label: str | None = None) -> FramedLink:
    if sign not in (1, -1):
        raise HandleError(f"blow-up sign must be +1 or -1, got {sign}")
    n = link.size
    m = np.zeros((n + 1, n + 1), dtype=np.int64)
    m[:n, :n] = link.linking
    m[n, n] = sign
    return FramedLink(link.kinds + (Kind.TWO_HANDLE,), m, link.three_handles, link.labels + (label,))


def blow_down(link: FramedLink, index: int) -> FramedLink:
    _check_index(link, index, "blow-down")
    if link.is_dotted(index) or abs(link.framing(index)) != 1:
        raise HandleError(f"component {index} is not a +-1-framed 2-handle")
    linked = [k for k in range(link.size) if k != index and link.linking[index, k]]
    if linked:
        raise HandleError(f"component {index} still links components {linked}")
    return _drop(link, (index,))


def select_sublink(link: FramedLink, indices: Sequence[int]) -> FramedLink:
    for i in indices:
        _check_index(link, i, "selection")
    return link


def apply_move(link: FramedLink, move: Move) -> FramedLink:
    if isinstance(move, Slide):
        return slide(link, move)
    if isinstance(move, AddCancelingPair):
        return add_canceling_pair(link, move.label)
    if isinstance(move, Cancel12):
        return cancel12(link, move.dotted, move.handle)
    if isinstance(move, BlowUp):
        return blow_up(link, move.sign, move.label)
    if isinstance(move, BlowDown):
        return blow_down(link, move.index)
    if isinstance(move, SelectSublink):
        return select_sublink(link, move.indices)
    raise HandleError(f"unknown move {move!r}")


# --- invariants ------------------------------------------------------------


@dataclass(frozen=True)
class InvariantSummary:
    rank: int
    signature: int
    abs_determinant: int
    boundary_torsion: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"rank": self.rank, "signature": self.signature,
                "abs_determinant": self.abs_determinant,
                "boundary_torsion": list(self.boundary_torsion)}


def invariants(link: FramedLink) -> InvariantSummary:
    """Rank, signature, |det| and elementary divisors of the 2-handle block."""
    block = link.two_handle_block().tolist()
    divisors = intalg.elementary_divisors(block)
    pos, neg, _ = intalg.inertia(block)
    rank = sum(1 for d in divisors if d)
    if rank != pos + neg:
        raise AssertionError("Smith rank and LDL rank disagree")
    det = 1
    for d in divisors:
        det *= d
    return InvariantSummary(rank, pos - neg, det, tuple(divisors))


def slide_matrix(n: int, rider: int, over: int, sign: int) -> np.ndarray:
    """Elementary unimodular E adding ``sign`` * column ``over`` to column ``rider``."""
    e = np.eye(n, dtype=object)
    e[over, rider] = sign
    return e


def congruence_check(before: FramedLink, after: FramedLink, move: Slide) -> bool:
    """Rebuild the post-slide 2-handle block as E^T M E, exactly."""
    idx = before.two_handle_indices()
    pos = {k: p for p, k in enumerate(idx)}
    m = np.array(before.two_handle_block().tolist(), dtype=object)
    e = slide_matrix(len(idx), pos[move.rider], pos[move.over], move.sign)
    rebuilt = e.T.dot(m).dot(e)
    return rebuilt.tolist() == after.two_handle_block().tolist()


@dataclass(frozen=True)
class StepRecord:
    step: int
    move: Move
    summary: InvariantSummary | None


@dataclass(frozen=True)
class ReplayResult:
    link: FramedLink
    steps: tuple[StepRecord, ...] = field(default=())


class ReplayError(HandleError):
    def __init__(self, step: int, move: Move, reason: str):
        super().__init__(f"step {step} ({move_to_dict(move)}): {reason}")
        self.step = step
        self.move = move
        self.reason = reason


def replay(initial: FramedLink, script: MoveScript | Iterable[Move], certify: bool = True) -> ReplayResult:
    """Replay ``script`` from ``initial``.

    With ``certify`` every slide is rebuilt as ``E^T M E`` and the invariant
    summary is recomputed and compared; turn it off for very large links where
    only preconditions and the final state matter.
    """
    link = initial
    moves = script.moves if isinstance(script, MoveScript) else tuple(script)
    records = []
    summary = invariants(link) if certify else None
    for k, move in enumerate(moves):
        try:
            nxt = apply_move(link, move)
        except (HandleError, OverflowError) as exc:
            raise ReplayError(k, move, str(exc)) from exc
        if certify:
            new_summary = invariants(nxt)
            if isinstance(move, Slide):
                if not congruence_check(link, nxt, move):
                    raise ReplayError(k, move, "slide does not match its E^T M E reconstruction")
                if new_summary != summary:
                    raise ReplayError(k, move, "slide changed the invariant summary")
            summary = new_summary
        records.append(StepRecord(k, move, summary))
        link = nxt
    return ReplayResult(link, tuple(records))


class ScriptBuilder:
    """Apply moves one at a time while recording them."""

    def __init__(self, initial: FramedLink, name: str = ""):
        self.initial = initial
        self.link = initial
        self.moves: list[Move] = []
        self.name = name

    def apply(self, move: Move) -> FramedLink:
        self.link = apply_move(self.link, move)
        self.moves.append(move)
        return self.link

    def slide(self, rider: int | str, over: int | str, sign: int = 1) -> FramedLink:
        return self.apply(Slide(self._idx(rider), self._idx(over), sign))

    def cancel(self, dotted: int | str, handle: int | str) -> FramedLink:
        return self.apply(Cancel12(self._idx(dotted), self._idx(handle)))

    def add_pair(self, label: str | None = None) -> FramedLink:
        return self.apply(AddCancelingPair(label))

    def _idx(self, ref: int | str) -> int:
        return self.link.index(ref) if isinstance(ref, str) else ref

    def script(self) -> MoveScript:
        return MoveScript(tuple(self.moves), self.name)
