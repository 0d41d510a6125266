"""``handlecalc`` command line.

Exit status: 0 pass / yes, 1 bad input, 2 internal assertion failure,
3 notGuaranteed verdict.  Every report echoes its configuration; the
``generated_at`` field is the only non-deterministic part of the output.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
import time

from handlecalc import braids, chain, monodromy, search, theorems, unlink
from handlecalc.framedlink import FramedLink, HandleError, IntegerOverflow, invariants, replay

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_NOT_GUARANTEED = 0, 1, 2, 3
TIMESTAMP_FIELD = "generated_at"

ANCHORS = {
    "verify-monodromy": "(ab)^{6n} ~ (a^2 b a^3 b a^3 b a)^n ~ (a^3 b a^3 b a^3 b)^n",
    "build-chain": "parallel -1-framed 2-handles slide into a -2-chain",
    "unlink": "sliding the pair over a -2-chain of length m+1 unties the -m-linking",
    "check-knot-surgery": theorems.CITES["bridge-bound"],
    "check-log-transform": theorems.CITES["log-bound"],
    "invariants": "plumbing",
    "benchmark": "plumbing",
}


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


# --- commands ------------------------------------------------------------------


def cmd_verify_monodromy(args) -> tuple[int, dict]:
    if args.n < 1:
        raise ValueError("n must be at least 1")
    rep = monodromy.verify_monodromy_identity(args.n)
    body = {"n": args.n, "pass": rep.ok, "matrices_equal": rep.matrices_equal,
            "cyclic_shift": rep.cyclic_shift, "letter_counts": [rep.a_count, rep.b_count],
            "total_matrix": [list(r) for r in rep.total_matrix.rows()],
            "conjugator": None if rep.conjugator is None else [list(r) for r in rep.conjugator.rows()],
            "failures": rep.failures()}
    return (EXIT_OK if rep.ok else EXIT_INTERNAL), body


def cmd_build_chain(args) -> tuple[int, dict]:
    cb = chain.build_chain(args.k)
    final = replay(chain.parallel_cycles(args.k), cb.script).link
    body = {"k": args.k, "chain_length": len(cb.chain), "script_length": len(cb.script),
            "linking": cb.link.linking.tolist(), "labels": list(cb.link.labels),
            "residual_linking": list(cb.residual_linking), "annotation": cb.annotation(),
            "replay_matches": final.same_matrix(cb.link),
            "is_chain": chain.is_chain(cb.link, cb.chain)}
    ok = body["replay_matches"] and body["is_chain"]
    if args.verify:
        start = chain.parallel_cycles(args.k)
        idx = range(args.k)
        prob = search.SearchProblem(start, search.MatrixEquals(cb.link),
                                    search.slide_moves(idx, idx), args.max_depth,
                                    max_states=args.max_states)
        cv = search.cross_validate(cb.script, prob)
        body["cross_validation"] = cv
        ok = ok and cv["passed"] and cv["search"]["found"]
    body["pass"] = ok
    return (EXIT_OK if ok else EXIT_INTERNAL), body


def cmd_unlink(args) -> tuple[int, dict]:
    initial, script, res = unlink.setup_and_unlink(args.m)
    final = replay(initial, script).link
    expected = unlink.unlink_framings(args.m)
    body = {"m": args.m, "framings": list(res.framings), "expected_framings": list(expected),
            "mutual_linking": res.mutual_linking, "script_length": len(script),
            "depth": res.depth, "report": res.report(),
            "replay_matches": final.same_matrix(res.link)}
    ok = res.framings == expected and res.mutual_linking == 0 and body["replay_matches"]
    if args.emit_script:
        body["initial"] = initial.to_dict()
        body["script"] = script.to_dict()
    body["pass"] = ok
    return (EXIT_OK if ok else EXIT_INTERNAL), body


def _verdict(rep: theorems.FeasibilityReport, args) -> tuple[int, dict]:
    body = rep.to_dict(include_script=args.emit_script)
    return (EXIT_OK if rep.yes else EXIT_NOT_GUARANTEED), body


def cmd_check_knot_surgery(args) -> tuple[int, dict]:
    if args.torus:
        p, q = args.torus
        bridge = braids.torus_bridge_number(p, q)
    elif args.bridge is not None:
        bridge = args.bridge
    else:
        raise ValueError("give --bridge or --torus P Q")
    pres = None
    if args.braid:
        pres = braids.BridgePresentation(bridge, braids.parse_braid(args.braid, 2 * bridge))
    code, body = _verdict(theorems.check_knot_surgery(args.n, bridge, pres), args)
    if args.torus:
        body["torus"] = list(args.torus)
    return code, body


def cmd_check_log_transform(args) -> tuple[int, dict]:
    rep = theorems.check_log_transform(args.n, args.p, args.q)
    code, body = _verdict(rep, args)
    u, v = theorems.seifert_coefficients(args.p, args.q)
    body["gluing"] = theorems.log_transform_gluing(args.p, args.q).to_dict()
    body["seifert_coefficients"] = {"u": u, "v": v, "identity": "p*v + q*u = 1"}
    return code, body


def cmd_invariants(args) -> tuple[int, dict]:
    with open(args.file, encoding="utf-8") as fh:
        link = FramedLink.from_json(fh.read())
    inv = invariants(link)
    return EXIT_OK, {"components": link.size, "dotted": len(link.dotted_indices()),
                     "three_handles": link.three_handles, "invariants": inv.to_dict()}


def cmd_benchmark(args) -> tuple[int, dict]:
    rows = []
    for m in range(1, args.max_m + 1):
        prob = search.unlink_problem(m, max_depth=args.max_depth, signs=(1,))
        prob = search.SearchProblem(prob.initial, prob.goal, prob.moves, prob.max_depth,
                                    prob.marked, args.max_states)
        t0 = time.perf_counter()
        res = search.search(prob)
        dt = time.perf_counter() - t0
        seen = res.states_explored + res.canonical_dedup_hits
        rows.append({"m": m, **res.summary(),
                     "states_per_second": round(res.states_explored / dt, 1) if dt > 0 else None,
                     "dedup_hit_rate": round(res.canonical_dedup_hits / seen, 4) if seen else 0.0})
    # timing fields vary between runs; everything else is deterministic
    return EXIT_OK, {"problems": rows, "timing_fields": ["states_per_second"]}


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="handlecalc", description="Linking-matrix Kirby calculus checks.")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--seed", type=int, default=0, help="seed echoed in reports (default 0)")
    ap.add_argument("--no-timestamp", action="store_true", help="omit the generated_at field")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-monodromy", help="check the monodromy word identities for E(n)")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_verify_monodromy)

    p = sub.add_parser("build-chain", help="slide k parallel -1 cycles into a -2-chain")
    p.add_argument("k", type=int)
    p.add_argument("--verify", action="store_true", help="cross-check with the search oracle")
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--max-states", type=int, default=search.default_max_states())
    p.set_defaults(func=cmd_build_chain)

    p = sub.add_parser("unlink", help="untie a -m-linked meridian pair")
    p.add_argument("m", type=int)
    p.add_argument("--emit-script", action="store_true")
    p.set_defaults(func=cmd_unlink)

    p = sub.add_parser("check-knot-surgery", help="1-handle removal for E(n)_K")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--bridge", type=int)
    g.add_argument("--torus", type=int, nargs=2, metavar=("P", "Q"))
    p.add_argument("--braid", help='pure braid word, e.g. "T(1,3)^2 T(2,4)"')
    p.add_argument("--emit-script", action="store_true")
    p.set_defaults(func=cmd_check_knot_surgery)

    p = sub.add_parser("check-log-transform", help="1-handle removal for E(n)_{p,q}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--emit-script", action="store_true")
    p.set_defaults(func=cmd_check_log_transform)

    p = sub.add_parser("invariants", help="invariant summary of a flk-1 JSON link")
    p.add_argument("file")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("benchmark", help="search-oracle throughput on unlinking problems")
    p.add_argument("--max-m", type=int, default=3)
    p.add_argument("--max-depth", type=int, default=25)
    p.add_argument("--max-states", type=int, default=search.default_max_states())
    p.set_defaults(func=cmd_benchmark)
    return ap


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    """Parse and execute; returns (exit code, report).  Never exits."""
    ap = build_parser()
    args = ap.parse_args(argv)
    report = {"schema": theorems.REPORT_SCHEMA, "command": args.command,
              "anchor": ANCHORS[args.command], "config": _config(args)}
    try:
        code, body = args.func(args)
    except (ValueError, HandleError, IntegerOverflow, OSError, json.JSONDecodeError, KeyError) as exc:
        code, body = EXIT_INPUT, {"error": f"{type(exc).__name__}: {exc}"}
    except AssertionError as exc:
        code, body = EXIT_INTERNAL, {"error": f"internal assertion: {exc}"}
    report["result"] = body
    report["exit_code"] = code
    if not args.no_timestamp:
        report[TIMESTAMP_FIELD] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return code, report


def _text(report: dict) -> str:
    res = report["result"]
    lines = [f"{report['command']}  [{report['anchor']}]  exit={report['exit_code']}"]
    if "error" in res:
        lines.append(f"error: {res['error']}")
    elif "feasible" in res:
        lines.append(f"verdict: {res['feasible']}  ({res['theorem_anchor']})")
        for row in res["ledger"]:
            lines.append(f"  {row['name']:<24} {json.dumps(row['value']):<22} [{row['cite']}]")
        if res.get("framing_tuple"):
            lines.append(f"  framings: {tuple(res['framing_tuple'])}")
        if res.get("script"):
            s = res["script"]
            lines.append(f"  script: {s['length']} moves, dotted left {s['final_dotted']}")
        lines.extend(f"  note: {n}" for n in res.get("notes", []))
    else:
        for k, v in res.items():
            if k in ("report", "initial", "script", "linking", "annotation", "cross_validation", "problems"):
                continue
            lines.append(f"  {k}: {json.dumps(v)}")
        for row in res.get("problems", []):
            lines.append(f"  {json.dumps(row, sort_keys=True)}")
        if "cross_validation" in res:
            cv = res["cross_validation"]
            lines.append(f"  cross-validation passed: {cv['passed']}  search: {json.dumps(cv['search'])}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    code, report = run(argv)
    if report["config"].get("format") == "text":
        print(_text(report))
    else:
        print(json.dumps(report, sort_keys=True, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
