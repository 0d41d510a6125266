"""Feasibility checkers for removing every 1-handle of E(n)_K and E(n)_{p,q}.

Each positive verdict carries a move script on an algebraic model of the
handle diagram.  The script is replayed as part of the check and must end with
no dotted components.

Model (beyond the skeleton documented in :mod:`handlecalc.braids`):

* ``a:1`` .. ``a:9n`` -- -1-framed vanishing cycles of the letter a, fiber
  push-offs of one another (mutual linking 0);
* ``vc:b`` -- the -1-framed cycle of one letter b, running once over ``dot:s``;
* ``h0`` (log-transform) / ``section`` (knot surgery) -- the -n-framed
  section handle.

For knot surgery the a-cycles run once over ``dot:x1`` and the section runs
over ``dot:s``.  For the log-transform the section runs over ``dot:x1`` and
each a-cycle runs ``pq`` times over it.  Linking numbers between E(n)-side
handles that the construction does not force are 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from handlecalc import braids, chain as chainmod, unlink
from handlecalc.framedlink import (FramedLink, Kind, MoveScript, ScriptBuilder, SelectSublink,
                                   replay)

YES = "yes"
NOT_GUARANTEED = "notGuaranteed"
REPORT_SCHEMA = "rpt-1"

# citation anchors: short formula-level tags, one per fact used
CITES = {
    "bridge-bound": "b(K) <= 9n  =>  E(n)_K has a handle decomposition without 1-handles",
    "log-bound": "gcd(p,q)=1, min(p,q) <= 4  =>  E(n)_{p,q} has no 1-handles",
    "n1-bound": "gcd(p,q)=1, min(p,q) <= 9  =>  E(1)_{p,q} has no 1-handles",
    "torus-equality": "E(1)_{p,q} = E(1)_{T(p,q)}",
    "torus-bridge": "b(T(p,q)) = min(p,q)",
    "one-handles": "(S^3 - nu(K)) x S^1 admits b(K)+1 1-handles",
    "a-slots": "(ab)^{6n} ~ (a^3 b a^3 b a^3 b)^n gives 9n parallel -1-framed a-cycles",
    "meridian-d": "d is carried to the meridian of a 1-handle",
    "s-handle": "a -1-framed 2-handle runs over the S^1-direction 1-handle",
    "section": "the section gives a -n-framed 2-handle h0",
    "chain-length": "-2-chain of length 9n-1 from the a-cycles",
    "chain-split": "drop member n+2: active length n+1, rest 8n-3",
    "unlink-1": "(h0', h1') framings (-2n-1,-2n-1) odd / (-2n,-2n-2) even",
    "stage2-need": "(2n+2)+1+(2n+2) = (2n+1)+1+(2n+3) = 4n+5",
    "stage2-budget": "4n+5 <= 8n-3 for n >= 2",
    "unlink-2": "(-4n-3)^4 odd / (-4n,-4n-2,-4n-4,-4n-6) even",
    "centered": "meridian handles are moved between 1-handles over the centered 0-framed 2-handles",
    "gluing-knot": "phi(m)=lambda1, phi(l)=d, phi(s)=lambda2",
    "gluing-log": "phi'(m)=d, phi'(l)=lambda1-pq d, phi'(s)=lambda2",
    "prior-four-pairs": "(p,q) in {(2,3),(2,5),(3,4),(4,5)}, all n: no 1-handles (prior result)",
    "prior-5-6": "E(n)_{5,6} without 1-handles for n >= 4 is a prior result outside this checker",
    "open-10-11": "E(1)_{10,11} is open",
}


# --- gluing data ---------------------------------------------------------------


@dataclass(frozen=True)
class GluingMap:
    kind: str
    matrix: tuple[tuple[int, int, int], ...]
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if abs(self.det()) != 1:
            raise ValueError(f"gluing matrix {self.matrix} is not unimodular")

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.matrix
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def image(self, col: int) -> tuple[int, int, int]:
        return tuple(row[col] for row in self.matrix)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params),
                "matrix": [list(r) for r in self.matrix], "det": self.det()}


def knot_surgery_gluing() -> GluingMap:
    """Columns are images of (m, l, s) in the basis (d, lambda1, lambda2)."""
    return GluingMap("knotSurgery", ((0, 1, 0), (1, 0, 0), (0, 0, 1)))


def log_transform_gluing(p: int, q: int) -> GluingMap:
    _coprime(p, q)
    return GluingMap("logTransform", ((1, -p * q, 0), (0, 1, 0), (0, 0, 1)), (p, q))


def general_log_gluing(p: int, p_prime: int, b: int, c: int) -> GluingMap:
    """d -> p'(b lambda1 + c lambda2) + p d, completed to a unimodular map.

    The first column is the image of d; the other two are a deterministic
    completion (only the image of d is prescribed).
    """
    if math.gcd(p, p_prime) != 1 or math.gcd(b, c) != 1:
        raise ValueError("need gcd(p, p') = 1 and gamma primitive")
    col = (p, p_prime * b, p_prime * c)
    return GluingMap("generalLog", _complete(col), (p, p_prime, b, c))


def _complete(v: tuple[int, int, int]) -> tuple[tuple[int, int, int], ...]:
    # row-reduce v to e1 with an integer matrix E (E v = e1); then E^{-1} has first column v
    e = [[int(i == j) for j in range(3)] for i in range(3)]
    w = list(v)

    def addmul(i, j, k):  # row_i += k * row_j
        w[i] += k * w[j]
        e[i] = [x + k * y for x, y in zip(e[i], e[j])]

    while sum(1 for x in w if x) > 1:
        nz = [i for i in range(3) if w[i]]
        piv = min(nz, key=lambda i: abs(w[i]))
        for i in nz:
            if i != piv:
                addmul(i, piv, -(w[i] // w[piv]))
    piv = next(i for i in range(3) if w[i])
    if piv != 0:
        addmul(0, piv, 1)
        addmul(piv, 0, -1)
    if w[0] == -1:
        w[0] = 1
        e[0] = [-x for x in e[0]]
    assert w == [1, 0, 0]
    # unimodular inverse via the adjugate
    m = e
    cof = [[(m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
             - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3]) for j in range(3)]
           for i in range(3)]
    det = sum(m[0][k] * cof[k][0] for k in range(3))
    u = tuple(tuple(c * det for c in row) for row in cof)
    if tuple(row[0] for row in u) != tuple(v):
        raise AssertionError("unimodular completion failed")
    return u


def seifert_coefficients(p: int, q: int) -> tuple[int, int]:
    """(u, v) with p*v + q*u = 1 and 0 <= u < p (u = 0 when p = 1)."""
    _coprime(p, q)
    u = pow(q, -1, p) if p > 1 else 0
    v = (1 - q * u) // p
    assert p * v + q * u == 1
    return u, v


def _coprime(p: int, q: int) -> None:
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")


# --- reports -------------------------------------------------------------------


@dataclass
class LedgerRow:
    name: str
    value: object
    cite: str

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "cite": self.cite,
                "anchor": CITES.get(self.cite, "plumbing")}


@dataclass
class FeasibilityReport:
    feasible: str
    theorem: str
    params: dict
    ledger: list[LedgerRow] = field(default_factory=list)
    framing_tuple: tuple[int, ...] | None = None
    notes: list[str] = field(default_factory=list)
    initial: FramedLink | None = None
    script: MoveScript | None = None
    final: FramedLink | None = None
    stages: list[dict] = field(default_factory=list)

    @property
    def yes(self) -> bool:
        return self.feasible == YES

    def row(self, name: str):
        return next(r.value for r in self.ledger if r.name == name)

    def to_dict(self, include_script: bool = False) -> dict:
        d = {"schema": REPORT_SCHEMA, "feasible": self.feasible, "theorem": self.theorem,
             "theorem_anchor": CITES[self.theorem], "params": self.params,
             "ledger": [r.to_dict() for r in self.ledger],
             "framing_tuple": None if self.framing_tuple is None else list(self.framing_tuple),
             "notes": list(self.notes), "stages": self.stages}
        if self.script is not None:
            d["script"] = {"name": self.script.name, "length": len(self.script),
                           "initial_components": self.initial.size,
                           "final_dotted": len(self.final.dotted_indices()),
                           "final_components": self.final.size}
            if include_script:
                d["script"]["moves"] = self.script.to_dict()["moves"]
                d["script"]["initial"] = self.initial.to_dict()
        return d

    def to_json(self, include_script: bool = False) -> str:
        return json.dumps(self.to_dict(include_script), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"verdict: {self.feasible}   [{self.theorem}] {CITES[self.theorem]}",
                 "params: " + ", ".join(f"{k}={v}" for k, v in self.params.items())]
        for r in self.ledger:
            lines.append(f"  {r.name:<24} {str(r.value):<12} [{r.cite}] {CITES.get(r.cite, 'plumbing')}")
        if self.framing_tuple is not None:
            lines.append(f"  framings: {self.framing_tuple}")
        if self.script is not None:
            lines.append(f"  script: {len(self.script)} moves, {self.initial.size} -> {self.final.size} "
                         f"components, dotted left: {len(self.final.dotted_indices())}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


# --- diagram models ------------------------------------------------------------


def _extend(link: FramedLink, labels: list[str], framings: list[int],
            dotted_rows: dict[str, dict[str, int]]) -> FramedLink:
    """Append 2-handles with given framings and runs over named dotted components."""
    n0 = link.size
    n = n0 + len(labels)
    m = np.zeros((n, n), dtype=np.int64)
    m[:n0, :n0] = link.linking
    for k, (lab, f) in enumerate(zip(labels, framings)):
        i = n0 + k
        m[i, i] = f
        for dlab, c in dotted_rows.get(lab, {}).items():
            j = link.index(dlab)
            m[i, j] = m[j, i] = c
    return FramedLink(link.kinds + (Kind.TWO_HANDLE,) * len(labels), m, link.three_handles,
                      link.labels + tuple(labels))


def knot_surgery_diagram(n: int, pres: braids.BridgePresentation) -> FramedLink:
    sk = braids.emit_surgery_skeleton(pres)
    a_labels = [f"a:{i}" for i in range(1, 9 * n + 1)]
    rows = {lab: {"dot:x1": 1} for lab in a_labels}
    rows["vc:b"] = {"dot:s": 1}
    rows["section"] = {"dot:s": 1}
    return _extend(sk, a_labels + ["vc:b", "section"], [-1] * (9 * n) + [-1, -n], rows)


def log_transform_diagram(n: int, p: int, q: int) -> FramedLink:
    b = braids.torus_bridge_number(p, q)
    sk = braids.emit_surgery_skeleton(braids.BridgePresentation.trivial(b))
    a_labels = [f"a:{i}" for i in range(1, 9 * n + 1)]
    rows = {lab: {"dot:x1": p * q} for lab in a_labels}
    rows["vc:b"] = {"dot:s": 1}
    rows["h0"] = {"dot:x1": 1}
    return _extend(sk, a_labels + ["vc:b", "h0"], [-1] * (9 * n) + [-1, -n], rows)


def _ferry(b: ScriptBuilder, handle: str, target: int) -> None:
    """Move a handle running over dot:x1 to dot:x<target> over the relation handles."""
    rel = braids.relation_labels(max(target, 2))
    for r in rel[:target - 1]:
        b.slide(handle, r, -1)


def _clear_and_cancel(b: ScriptBuilder, cancellers: dict[str, str]) -> None:
    """Clear every dotted run except the cancellers', then cancel 1-/2-pairs."""
    for dl, hl in cancellers.items():
        d, h = b.link.index(dl), b.link.index(hl)
        row = [b.link.entry(h, k) for k in b.link.dotted_indices()]
        if abs(b.link.entry(d, h)) != 1 or sum(abs(x) for x in row) != 1:
            raise AssertionError(f"{hl} is not in canceling position over {dl}")
    canc_handles = set(cancellers.values())
    for dl, hl in cancellers.items():
        sgn = b.link.entry(b.link.index(dl), b.link.index(hl))
        for lab in [l for l in b.link.labels if l not in canc_handles]:
            i = b.link.index(lab)
            if b.link.is_dotted(i):
                continue
            c = b.link.entry(i, b.link.index(dl))
            for _ in range(abs(c)):
                b.slide(lab, hl, -1 if c * sgn > 0 else 1)
    for dl, hl in cancellers.items():
        b.cancel(dl, hl)


def _finish(rep: FeasibilityReport, builder: ScriptBuilder) -> FeasibilityReport:
    script = builder.script()
    final = replay(builder.initial, script, certify=False).link
    if not final.same_matrix(builder.link):
        raise AssertionError("replayed script disagrees with the constructed diagram")
    if final.dotted_indices():
        raise AssertionError("script leaves dotted components")
    rep.initial, rep.script, rep.final = builder.initial, script, final
    rep.ledger.append(LedgerRow("scriptLength", len(script), "plumbing"))
    rep.ledger.append(LedgerRow("dottedAfterReplay", 0, "plumbing"))
    return rep


def _check_positive(**kw) -> None:
    for k, v in kw.items():
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{k} must be a positive integer, got {v!r}")


def check_knot_surgery(n: int, bridge: int, pres: braids.BridgePresentation | None = None
                       ) -> FeasibilityReport:
    _check_positive(n=n, bridge=bridge)
    if pres is not None and pres.bridges != bridge:
        raise ValueError("presentation bridge count disagrees with bridge")
    slots = 9 * n
    to_cancel = braids.one_handle_count(bridge)
    ok = bridge <= slots
    rep = FeasibilityReport(YES if ok else NOT_GUARANTEED, "bridge-bound", {"n": n, "bridge": bridge})
    rep.ledger += [LedgerRow("aCycleSlots", slots, "a-slots"),
                   LedgerRow("oneHandlesToCancel", to_cancel, "one-handles"),
                   LedgerRow("meridianHitByD", 1, "meridian-d"),
                   LedgerRow("bridgeWithinSlots", ok, "bridge-bound")]
    if not ok:
        rep.notes.append(f"b(K)={bridge} exceeds 9n={slots}; the sufficient condition does not apply")
        return rep
    pres = pres or braids.BridgePresentation.trivial(bridge)
    builder = ScriptBuilder(knot_surgery_diagram(n, pres), name=f"knot-surgery-n{n}-b{bridge}")
    for i in range(2, bridge + 1):
        _ferry(builder, f"a:{i}", i)
    cancellers = {"dot:s": "section"} | {f"dot:x{i}": f"a:{i}" for i in range(1, bridge + 1)}
    _clear_and_cancel(builder, cancellers)
    return _finish(rep, builder)


def check_log_transform(n: int, p: int, q: int) -> FeasibilityReport:
    _check_positive(n=n, p=p, q=q)
    _coprime(p, q)
    b = braids.torus_bridge_number(p, q)
    params = {"n": n, "p": p, "q": q}
    if n == 1:
        inner = check_knot_surgery(1, b)
        rep = FeasibilityReport(YES if b <= 9 else NOT_GUARANTEED, "n1-bound", params,
                                [LedgerRow("torusBridge", b, "torus-bridge"),
                                 LedgerRow("reduction", "E(1)_{T(p,q)}", "torus-equality")] + inner.ledger,
                                notes=list(inner.notes))
        if (p, q) in ((10, 11), (11, 10)):
            rep.notes.append(CITES["open-10-11"])
        rep.initial, rep.script, rep.final = inner.initial, inner.script, inner.final
        return rep
    ledger = budget_ledger_rows(n)
    rep = FeasibilityReport(YES if b <= 4 else NOT_GUARANTEED, "log-bound", params,
                            [LedgerRow("torusBridge", b, "torus-bridge"),
                             LedgerRow("gluingOffDiagonal", -p * q, "gluing-log")] + ledger)
    if b > 4:
        if min(p, q) == 5 and max(p, q) == 6 and n >= 4:
            rep.notes.append(CITES["prior-5-6"])
        rep.notes.append(f"min(p,q)={b} > 4; the sufficient condition does not apply")
        return rep

    builder = ScriptBuilder(log_transform_diagram(n, p, q), name=f"log-n{n}-p{p}-q{q}")
    a = [builder.link.index(f"a:{i}") for i in range(1, 9 * n + 1)]
    chainmod.chain_slides(builder, a)
    sel = chainmod.select_subchain(builder.link, a[:-1], n + 2)
    builder.link = sel.link.relabel({a[-1]: "residual"})
    builder.apply(sel.move)
    stages = []
    stage1, pair_state = unlink.pair_setup(n, builder.link, "h0", "h1")
    for mv in stage1:
        builder.apply(mv)
    res1 = unlink.unlink_pair(builder.link, (builder.link.index("h0"), builder.link.index("h1")),
                              list(sel.active))
    for mv in res1.script:
        builder.apply(mv)
    stages.append({"stage": 1} | res1.report())
    rep.ledger.append(LedgerRow("stage1Framings", list(res1.framings), "unlink-1"))
    if b <= 2:
        rep.theorem = "log-bound"
        rep.framing_tuple = res1.framings
        cancellers = {"dot:s": "vc:b", "dot:x1": "h0"}
        if b == 2:
            _ferry(builder, "h1", 2)
            cancellers["dot:x2"] = "h1"
    else:
        m1, m2 = -res1.framings[0], -res1.framings[1]
        reserve = list(sel.reserved)
        need = (m1 + 1) + 1 + (m2 + 1)
        if need > len(reserve):
            raise AssertionError(f"stage-2 chain budget {need} exceeds reserve {len(reserve)}")
        for src, new in (("h0", "h2"), ("h1", "h3")):
            builder.add_pair(new)
            builder.slide(new, src, +1)
        sub1 = reserve[:m1 + 1]
        sub2 = reserve[m1 + 2:m1 + 2 + m2 + 1]
        builder.apply(SelectSublink(tuple(sub1), "stage2-first"))
        builder.apply(SelectSublink(tuple(sub2), "stage2-second"))
        r2a = unlink.unlink_pair(builder.link, (builder.link.index("h0"), builder.link.index("h2")), sub1)
        for mv in r2a.script:
            builder.apply(mv)
        r2b = unlink.unlink_pair(builder.link, (builder.link.index("h1"), builder.link.index("h3")), sub2)
        for mv in r2b.script:
            builder.apply(mv)
        stages += [{"stage": 2, "pair": "h0,h2"} | r2a.report(), {"stage": 2, "pair": "h1,h3"} | r2b.report()]
        rep.framing_tuple = r2a.framings + r2b.framings
        expected = unlink.double_unlink_framings(n)
        if rep.framing_tuple != expected:
            raise AssertionError(f"stage-2 framings {rep.framing_tuple} != {expected}")
        rep.ledger.append(LedgerRow("stage2Framings", list(rep.framing_tuple), "unlink-2"))
        order = ["h0", "h2", "h1", "h3"]
        cancellers = {"dot:s": "vc:b"}
        for target, lab in enumerate(order[:b], 1):
            if target > 1:
                _ferry(builder, lab, target)
            cancellers[f"dot:x{target}"] = lab
        rep.ledger.append(LedgerRow("meridiansDistributed", b, "centered"))
    rep.stages = stages
    _clear_and_cancel(builder, cancellers)
    return _finish(rep, builder)


def budget_ledger_rows(n: int) -> list[LedgerRow]:
    bl = unlink.budget_ledger(n)
    cites = {"totalChain": "chain-length", "stage1Active": "chain-split", "separator": "chain-split",
             "remainder": "chain-split", "stage2Need": "stage2-need", "stage2Feasible": "stage2-budget"}
    return [LedgerRow(k, v, cites[k]) for k, v in bl.rows()]
