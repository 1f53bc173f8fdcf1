"""Command-line front end.

Exit codes: 0 true / pass, 1 false / fail, 2 input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import collapse as col
from .decomposition import (build_decomposition, format_td, is_regular, make_regular, parse_td,
                            regularity_violations, validate)
from .engine import (DPModelChecker, EngineConfig, audit, make_report, model_check_bruteforce)
from .errors import EngineError, InputError, ResourceError
from .folio import delta_folio, extended_delta_folio, w_bounded_delta_folio
from .graph import find_breaking_separation, parse_graph
from .logic import parse
from .paths import dp_query
from .signature import extended_sig, joint_sig, sig

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _graph(path):
    return parse_graph(_read(path))


def _formula(text: str):
    """Formula text, or @path to read it from a file."""
    return parse(_read(text[1:]) if text.startswith("@") else text)


def _pairs(vs: list[int]):
    if len(vs) % 2:
        raise InputError("terminals must come in pairs")
    return [(vs[i], vs[i + 1]) for i in range(0, len(vs), 2)]


def _td(g, path, strategy="exhaustive-minwidth"):
    if path:
        return build_decomposition(g, "from-file", text=_read(path))
    return build_decomposition(g, strategy)


def _values(args):
    if not args.values:
        return None
    out = {}
    for item in args.values:
        name, _, v = item.partition("=")
        if not _ or not name:
            raise InputError(f"--value expects name=vertex, got {item!r}")
        out[name] = int(v)
    return out


def _emit(args, payload: dict, text: str | None = None):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif text is not None:
        print(text)


def _verdict(b: bool) -> int:
    return EXIT_TRUE if b else EXIT_FALSE


# ---------------------------------------------------------------- subcommands

def cmd_check(args) -> int:
    g = _graph(args.graph)
    f = _formula(args.formula)
    res = model_check_bruteforce(g, f, _values(args))
    _emit(args, {"verdict": res}, "true" if res else "false")
    return _verdict(res)


def _config(args) -> EngineConfig:
    return EngineConfig(delta=args.delta, rank=args.rank, k_max=args.k_max, strategy=args.strategy,
                        clique_threshold=args.clique_threshold, folio=not args.no_folio,
                        rep_cap=args.rep_cap, threads=args.threads)


def cmd_check_dp(args) -> int:
    g = _graph(args.graph)
    f = _formula(args.formula)
    td = _td(g, args.td)
    cfg = _config(args)
    if args.audit:
        rep = audit(g, td, f, _values(args), cfg)
        _emit(args, rep, "true" if rep["verdict"] else "false")
        for c in rep["failures"]:
            print(f"audit failure: node {c['node']} {c['check']} {c['detail']}", file=sys.stderr)
        return EXIT_FALSE if rep["failures"] else _verdict(rep["verdict"])
    run = DPModelChecker(cfg).run(g, td, f, _values(args))
    _emit(args, make_report(run, [], None, None, run.seconds), "true" if run.verdict else "false")
    return _verdict(run.verdict)


def cmd_audit(args) -> int:
    g = _graph(args.graph)
    f = _formula(args.formula)
    td = _td(g, args.td)
    mutate = args.seed if args.mutate else None
    rep = audit(g, td, f, _values(args), _config(args), mutate_seed=mutate)
    lines = [f"{c['status']:7} node={c['node']} {c['check']} {c['detail']}".rstrip() for c in rep["audit"]]
    _emit(args, rep, "\n".join(lines))
    return EXIT_FALSE if rep["failures"] else EXIT_TRUE


def cmd_dp(args) -> int:
    g = _graph(args.graph)
    pairs = _pairs(args.terminals)
    if args.witness:
        res, paths = dp_query(g, pairs, witness=True)
        text = "true" if res else "false"
        if res:
            text += "\n" + "\n".join(" ".join(map(str, p)) for p in paths)
        _emit(args, {"verdict": res, "paths": [list(p) for p in paths] if res else None}, text)
    else:
        res = dp_query(g, pairs)
        _emit(args, {"verdict": res}, "true" if res else "false")
    return _verdict(res)


def cmd_sig(args) -> int:
    g = _graph(args.graph)
    R = args.R if args.R is not None else list(g.vertices)
    if args.extended:
        s = extended_sig(g, R, args.rank, args.k_max)
        payload = {"extended": [{"X": [list(e) for e in x], "sig": v.to_sexpr()} for x, v in s.entries.items()]}
        text = "\n".join(f"{list(x)} {v.to_sexpr()}" for x, v in s.entries.items())
    else:
        s = (joint_sig if args.joint else sig)(g, R, args.rank, args.k_max)
        payload = {"sig": s.to_sexpr()}
        text = s.to_sexpr()
    _emit(args, payload, text)
    return EXIT_TRUE


def cmd_folio(args) -> int:
    g = _graph(args.graph)
    if args.extended:
        ef = extended_delta_folio(g, args.delta)
        payload = {"delta": args.delta,
                   "extended": [{"X": [list(e) for e in x], "members": f.strings()} for x, f in ef.entries.items()]}
        text = "\n".join(f"X={list(x)}\n  " + "\n  ".join(f.strings()) for x, f in ef.entries.items())
    else:
        if args.weights:
            w = {}
            for item in args.weights:
                v, _, wt = item.partition(":")
                w[int(v)] = int(wt)
            fol = w_bounded_delta_folio(g, args.delta, w)
        else:
            fol = delta_folio(g, args.delta)
        payload = {"delta": args.delta, "members": fol.strings()}
        text = "\n".join(fol.strings())
    _emit(args, payload, text)
    return EXIT_TRUE


def cmd_decompose(args) -> int:
    g = _graph(args.graph)
    td = build_decomposition(g, args.strategy, text=_read(args.td) if args.td else None)
    if args.regular:
        td = make_regular(g, td)
    out = format_td(td, g.n)
    if args.output:
        Path(args.output).write_text(out)
    _emit(args, {"width": td.width(), "adhesion_width": td.adhesion_width(), "nodes": len(td.bags),
                 "regular": is_regular(g, td), "td": out}, None if args.output else out.rstrip("\n"))
    return EXIT_TRUE


def cmd_verify_td(args) -> int:
    g = _graph(args.graph)
    td = parse_td(_read(args.td))
    rep = validate(g, td)
    problems = list(rep.violations)
    if args.regular and rep.ok:
        problems += regularity_violations(g, td)
    _emit(args, {"valid": rep.ok, "violations": problems},
          "valid" if not problems else "\n".join(f"violation: {p}" for p in problems))
    return _verdict(not problems)


def cmd_unbreakable(args) -> int:
    g = _graph(args.graph)
    h = args.h if args.h is not None else list(g.vertices)
    sep = find_breaking_separation(g, h, args.q, args.k)
    if sep is None:
        _emit(args, {"unbreakable": True, "witness": None}, "unbreakable")
        return EXIT_TRUE
    a, b = sep
    _emit(args, {"unbreakable": False, "witness": {"A": sorted(a), "B": sorted(b)}},
          f"breakable\nA: {' '.join(map(str, sorted(a)))}\nB: {' '.join(map(str, sorted(b)))}")
    return EXIT_FALSE


def cmd_collapse_eval(args) -> int:
    g = _graph(args.graph)
    pairs = _pairs(args.terminals)
    k = len(pairs)
    params = col.CollapseParams(k, args.L, args.p if args.p is not None else col.CollapseParams.nominal_p(k),
                                args.t if args.t is not None else col.CollapseParams.nominal_t(k, args.L))
    branch = None
    if args.branch_sets:
        branch = [[int(v) for v in part.split(",") if v] for part in args.branch_sets.split(";")]
    res = col.collapse_eval(g, pairs, params, branch, check=not args.no_check)
    part = res.partition
    payload = {
        "verdict": res.verdict,
        "params": {"k": params.k, "L": params.L, "p": params.p, "t": params.t},
        "clusters": [sorted(c) for c in part.clusters],
        "separators": [sorted(s) for s in part.separators],
        "enclosures": [sorted(d) for d in part.enclosures],
        "invariant_violations": res.violations,
    }
    lines = []
    for c, s, d in zip(part.clusters, part.separators, part.enclosures):
        lines.append(f"cluster {sorted(c)} separator {sorted(s)} enclosure {sorted(d)}")
    lines += [f"note: {v}" for v in res.violations]
    lines.append("true" if res.verdict else "false")
    if args.emit:
        f = col.emit_collapse_formula(params)
        payload["formula"] = str(f)
        lines.append(str(f))
    _emit(args, payload, "\n".join(lines))
    return _verdict(res.verdict)


# ---------------------------------------------------------------- parser

def _engine_flags(p):
    p.add_argument("--td", help="tree decomposition file (default: exhaustive min-width)")
    p.add_argument("--value", dest="values", action="append", metavar="NAME=V",
                   help="value of a free variable (repeatable)")
    p.add_argument("--strategy", choices=["auto", "greedy", "clique", "none"], default="auto")
    p.add_argument("--delta", type=int, help="folio δ (default: adhesion width + 2 k_max, capped)")
    p.add_argument("--rank", type=int, help="play at least this many rounds")
    p.add_argument("--k-max", type=int, help="track DP atoms of at least this arity")
    p.add_argument("--clique-threshold", type=int)
    p.add_argument("--rep-cap", type=int)
    p.add_argument("--no-folio", action="store_true", help="do not track extended folios")


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fodp", description="Model checking FO+DP on small graphs.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    ap.add_argument("--threads", type=_positive, default=1, help="worker cap")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="brute-force model checking")
    p.add_argument("graph")
    p.add_argument("formula", help="formula text or @file")
    p.add_argument("--value", dest="values", action="append", metavar="NAME=V")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("check-dp", help="model checking along a tree decomposition")
    p.add_argument("graph")
    p.add_argument("formula")
    _engine_flags(p)
    p.add_argument("--audit", action="store_true")
    p.set_defaults(fn=cmd_check_dp)

    p = sub.add_parser("audit", help="recheck every node summary and the verdict")
    p.add_argument("graph")
    p.add_argument("formula")
    _engine_flags(p)
    p.add_argument("--mutate", action="store_true", help="flip one random edge of one representative")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("dp", help="disjoint-paths query")
    p.add_argument("graph")
    p.add_argument("terminals", nargs="+", type=int, help="x1 y1 x2 y2 ...")
    p.add_argument("--witness", action="store_true")
    p.set_defaults(fn=cmd_dp)

    p = sub.add_parser("sig", help="signature of an annotated rooted graph")
    p.add_argument("graph")
    p.add_argument("--R", type=int, nargs="*", help="annotation (default: all vertices)")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--k-max", type=int, default=1)
    p.add_argument("--extended", action="store_true")
    p.add_argument("--joint", action="store_true")
    p.set_defaults(fn=cmd_sig)

    p = sub.add_parser("folio", help="δ-folio as sorted canonical strings")
    p.add_argument("graph")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--extended", action="store_true")
    p.add_argument("--weight", dest="weights", action="append", metavar="V:W")
    p.set_defaults(fn=cmd_folio)

    p = sub.add_parser("decompose", help="build a tree decomposition")
    p.add_argument("graph")
    p.add_argument("--strategy", choices=["single-bag", "exhaustive-minwidth", "from-file"],
                   default="exhaustive-minwidth")
    p.add_argument("--td", help="input for from-file")
    p.add_argument("--regular", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("verify-td", help="validate a tree decomposition")
    p.add_argument("graph")
    p.add_argument("td")
    p.add_argument("--regular", action="store_true", help="also require regularity")
    p.set_defaults(fn=cmd_verify_td)

    p = sub.add_parser("unbreakable", help="(q, k)-unbreakability check")
    p.add_argument("graph")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--h", type=int, nargs="*", help="designated vertices (default: all)")
    p.set_defaults(fn=cmd_unbreakable)

    p = sub.add_parser("collapse-eval", help="DP_k through clusters and separators")
    p.add_argument("graph")
    p.add_argument("terminals", nargs="+", type=int)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--branch-sets", help="e.g. '0;1;2,3'")
    p.add_argument("--no-check", action="store_true", help="skip hypothesis checks")
    p.add_argument("--emit", action="store_true", help="also print the first-order formula")
    p.set_defaults(fn=cmd_collapse_eval)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_TRUE
    try:
        return args.fn(args)
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
