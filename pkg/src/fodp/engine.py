"""Model checking FO+DP: the brute-force oracle and the bottom-up decomposition engine.

Engine outline, per decomposition node x (children first):

* children are grouped under the members of A_x (children whose adhesion is
  not inside a kept sibling's adhesion); each child joins exactly one group;
* G<z> glues the representatives of a group along their adhesions and is
  reduced to a representative rooted at adh(z);
* Ĝ glues those onto G[bag(x)] and is reduced to the node representative
  (G'_x, R'_x), rooted at adh(x) with vertex v labelled v + 1.

A reduction keeps the joint signature (xpattern leaves) and, when affordable,
the extended δ-folio. At the root the sentence is evaluated on G'_root with
quantifiers restricted to R'_root.

User roots and free-variable values are turned into fresh colours first, so
the roots of every intermediate graph are free to mean "adhesion".
"""
from __future__ import annotations

import random
import time
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Mapping

from .decomposition import TreeDecomposition, adhesion_labels, build_decomposition, glue, validate
from .errors import EngineError, InputError, ResourceError
from .folio import (MAX_LIBRARY_DELTA, ExtendedFolio, extended_delta_folio, min_representative_same_extended_folio,
                    same_extended_folio_after_deletion)
from .graph import ColoredRootedGraph
from .logic import (And, Color, Const, Exists, Forall, Formula, Not, Or, RootLabel, conj, evaluate, free_vars,
                    max_dp_arity, prenexify, quantifier_rank)
from .minors import has_clique_minor
from .signature import PatternTable, extended_sig

REPORT_VERSION = 1


@dataclass(frozen=True)
class EngineConfig:
    delta: int | None = None  # folio δ; None means adhesion width + 2 * k_max, clamped to the library cap
    rank: int | None = None  # play at least this many rounds
    k_max: int | None = None  # track DP facts of at least this arity
    strategy: str = "auto"  # auto | clique | greedy | none
    clique_threshold: int | None = None  # K_t order for the clique branch; None: 6 * k^3
    folio: bool = True
    max_folio_roots: int = 3
    group_children: bool = True  # False glues every child on its own (no A_x grouping)
    rep_cap: int | None = None  # only reported; exceeding it is an audit failure
    audit: bool = False
    threads: int = 1


@dataclass
class NodeSummary:
    node: int
    graph: ColoredRootedGraph
    R: frozenset
    sig_id: int
    folio: ExtendedFolio | None
    branch: str
    hat_size: int
    seconds: float = 0.0

    @property
    def size(self) -> int:
        return self.graph.n


@dataclass
class EngineRun:
    verdict: bool
    r: int
    k_max: int
    delta: int
    summaries: dict
    formula: Formula
    graph: ColoredRootedGraph  # the prepared graph (roots and values as colours)
    td: TreeDecomposition
    audit: list = field(default_factory=list)
    seconds: float = 0.0
    delta_clamped: bool = False


# ---------------------------------------------------------------- brute force

def _valuation(f: Formula, vbar) -> dict:
    if vbar is None:
        vbar = {}
    if isinstance(vbar, Mapping):
        return dict(vbar)
    names = sorted(free_vars(f))
    vbar = tuple(vbar)
    if len(vbar) != len(names):
        raise InputError(f"formula has free variables {names}, got {len(vbar)} values")
    return dict(zip(names, vbar))


def model_check_bruteforce(g: ColoredRootedGraph, f: Formula, vbar=None) -> bool:
    """Ground truth. A tuple vbar is matched to the free variables in sorted order."""
    return evaluate(g, f, _valuation(f, vbar))


# ---------------------------------------------------------------- preparation

def _drop_unused_colors(f: Formula, base: int) -> Formula:
    """Colours no vertex carries are false; this frees indices from `base` on."""
    if isinstance(f, Color):
        return Const(False) if f.index >= base else f
    if isinstance(f, (And, Or)):
        return type(f)(_drop_unused_colors(f.a, base), _drop_unused_colors(f.b, base))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, _drop_unused_colors(f.f, base))
    if isinstance(f, Not):
        return Not(_drop_unused_colors(f.f, base))
    return f


def _map_roots(f: Formula, cmap: Mapping[int, int]) -> Formula:
    if isinstance(f, RootLabel):
        return Color(cmap[f.label], f.x) if f.label in cmap else Const(False)
    if isinstance(f, (And, Or)):
        return type(f)(_map_roots(f.a, cmap), _map_roots(f.b, cmap))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, _map_roots(f.f, cmap))
    if isinstance(f, Not):
        return Not(_map_roots(f.f, cmap))
    return f


def prepare(g: ColoredRootedGraph, f: Formula, vbar=None):
    """Turn roots and free-variable values into fresh colours.

    Returns (uncoloured-root graph, prenex sentence) with the same truth value.
    """
    val = _valuation(f, vbar)
    missing = free_vars(f) - set(val)
    if missing:
        raise InputError(f"no value for free variable(s) {sorted(missing)}")
    for x, v in val.items():
        if v not in g:
            raise InputError(f"variable {x} bound to unknown vertex {v}")
    base = 1 + max([-1] + [c for cs in g.colors.values() for c in cs])
    labels = sorted(g.roots.values())
    cmap = {lab: base + i for i, lab in enumerate(labels)}
    f = _drop_unused_colors(f, base)
    colors = {v: set(cs) for v, cs in g.colors.items()}
    for v, lab in g.roots.items():
        colors[v].add(cmap[lab])
    body = _map_roots(f, cmap)
    names = [x for x in sorted(val) if x in free_vars(f)]
    nxt = base + len(labels)
    marks = []
    for x in names:
        colors[val[x]].add(nxt)
        marks.append(Color(nxt, x))
        nxt += 1
    sentence = body
    if names:
        sentence = conj(marks + [body])
        for x in reversed(names):
            sentence = Exists(x, sentence)
    key = tuple((x, val[x]) for x in names)
    per = _PREPARED.setdefault(g, {})
    g0 = per.get(key)
    if g0 is None:
        g0 = per[key] = ColoredRootedGraph.build(g.vertices, g.edges, colors, {})
    return g0, prenexify(sentence)


_PREPARED: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


# ---------------------------------------------------------------- reduction

class _Target:
    """Joint signature of a fixed (graph, R), with the cheap filters precomputed lazily."""

    def __init__(self, g, R, r, k_max):
        self.r = r
        self.k_max = k_max
        self.table = PatternTable(g, k_max)
        self.R = frozenset(R)
        self._ids: dict = {}

    def at(self, depth):
        if depth not in self._ids:
            self._ids[depth] = self.table.sig_id(self.R, self.r, depth)
        return self._ids[depth]

    def matches(self, g, R, table=None) -> bool:
        t = table or PatternTable(g, self.k_max)
        for d in range(1, self.r + 1):
            if t.sig_id(R, self.r, d) != self.at(d):
                return False
        if self.r == 0:
            return t.sig_id(R, 0) == self.at(0)
        return True


def _minimize_R(table, R, r, keep, target_id):
    cur = set(R)
    changed = True
    while changed:
        changed = False
        for v in sorted(cur - keep):
            trial = cur - {v}
            if table.sig_id(trial, r) == target_id:
                cur = trial
                changed = True
    return frozenset(cur)


def reduce_greedy(g, R, r, k_max, delta, folio_ok=True):
    """Greedy signature- and folio-preserving shrinking of (g, R).

    Order: drop annotations, then delete non-root vertices, then delete edges
    not joining two roots; repeat until nothing more goes.
    """
    target = _Target(g, R, r, k_max)
    roots = frozenset(g.roots)
    witnesses = {}
    ref = extended_delta_folio(g, delta, witnesses) if folio_ok else None
    cur_g, cur_R = g, frozenset(R)
    table = target.table
    while True:
        progress = False
        new_R = _minimize_R(table, cur_R, r, roots, target.at(r))
        if new_R != cur_R:
            cur_R, progress = new_R, True
        # helpers first, annotated vertices last
        order = sorted((v for v in cur_g.vertices if v not in roots), key=lambda v: (v in cur_R, v))
        for v in order:
            cand = cur_g.without_vertices([v])
            cand_R = cur_R - {v}
            if ref is not None and not same_extended_folio_after_deletion(cand, ref, witnesses):
                continue
            t = PatternTable(cand, k_max)
            if target.matches(cand, cand_R, t):
                cur_g, cur_R, table, progress = cand, cand_R, t, True
                break
        if progress:
            continue
        for e in cur_g.edges:
            if e[0] in roots and e[1] in roots:
                continue
            cand = cur_g.without_edges([e])
            if ref is not None and not same_extended_folio_after_deletion(cand, ref, witnesses):
                continue
            t = PatternTable(cand, k_max)
            if target.matches(cand, cur_R, t):
                cur_g, table, progress = cand, t, True
                break
        if not progress:
            return cur_g, cur_R, ref


def reduce_clique(g, R, r, k_max, delta, folio_ok=True):
    """The large-clique-minor construction: a minimal annotation R', for every
    set of at most r annotated elements a smallest induced subgraph with the
    same facts, plus a smallest subgraph with the same extended folio; the
    result is induced on the union. Sandwiched between those subgraphs and g,
    every tuple keeps its xpattern."""
    roots = frozenset(g.roots)
    full = PatternTable(g, k_max)
    target_id = full.sig_id(R, r)
    R1 = _minimize_R(full, R, r, roots, target_id)
    pending = set()
    elems = sorted(R1)
    for size in range(1, min(r, len(elems)) + 1):
        for es in combinations(elems, size):
            pending.add(es)
    pending.add(())
    keep = set(roots) | set(R1)
    rest = [v for v in g.vertices if v not in roots]
    found: dict = {}
    for size in range(len(rest) + 1):
        if not pending:
            break
        for extra in combinations(rest, size):
            s = roots | set(extra)
            todo = [es for es in pending if set(es) <= s]
            if not todo:
                continue
            sub = PatternTable(g.induced(s), k_max)
            for es in todo:
                if sub.leaf(es) == full.leaf(es):
                    found[es] = s
                    pending.discard(es)
    for s in found.values():
        keep |= s
    if folio_ok:
        keep |= set(min_representative_same_extended_folio(g, delta).vertices)
    out = g.induced(keep)
    ref = extended_delta_folio(out, delta) if folio_ok else None
    if PatternTable(out, k_max).sig_id(R1, r) != target_id:
        raise EngineError("clique-branch representative lost the signature")
    return out, R1, ref


# ---------------------------------------------------------------- engine

def _relabel_compact(g, R):
    """Renumber non-root vertices above the roots so representatives stay tidy."""
    roots = sorted(g.roots)
    others = [v for v in g.vertices if v not in g.roots]
    top = max(roots, default=-1) + 1
    mapping = {v: v for v in roots}
    for i, v in enumerate(others):
        mapping[v] = top + i
    return g.relabel(mapping), frozenset(mapping[v] for v in R)


class DPModelChecker:
    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self._cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()

    # one summary pass for a prepared graph

    def summaries(self, g0: ColoredRootedGraph, td: TreeDecomposition, r: int, k_max: int, delta: int):
        per = self._cache.setdefault(g0, {})
        key = (id(td), r, k_max, delta)
        hit = per.get(key)
        if hit is not None and hit[0] is td:
            return hit[1]
        out: dict = {}
        if self.config.threads > 1:
            # children before parents: process by decreasing depth
            depth = {td.root: 0}
            for x in td.nodes:
                if td.parent[x] is not None:
                    depth[x] = depth[td.parent[x]] + 1
            levels: dict = {}
            for x in td.nodes:
                levels.setdefault(depth[x], []).append(x)
            with ThreadPoolExecutor(self.config.threads) as pool:
                for d in sorted(levels, reverse=True):
                    done = list(pool.map(lambda x: self.node_summary(g0, td, x, out, r, k_max, delta), levels[d]))
                    for x, s in zip(levels[d], done):
                        out[x] = s
        else:
            for x in td.postorder():
                out[x] = self.node_summary(g0, td, x, out, r, k_max, delta)
        per[key] = (td, out)
        return out

    def _reduce(self, g, R, r, k_max, delta, force=None):
        cfg = self.config
        folio_ok = cfg.folio and len(g.roots) <= cfg.max_folio_roots
        strategy = force or cfg.strategy
        if strategy == "none":
            ref = extended_delta_folio(g, delta) if folio_ok else None
            return g, frozenset(R), ref, "none"
        if strategy == "auto":
            t = cfg.clique_threshold if cfg.clique_threshold is not None else 6 * max(k_max, 1) ** 3
            strategy = "clique" if t <= g.n and has_clique_minor(g, t) else "greedy"
        if strategy == "clique":
            out, R1, ref = reduce_clique(g, R, r, k_max, delta, folio_ok)
            return out, R1, ref, "clique"
        if strategy == "greedy":
            out, R1, ref = reduce_greedy(g, R, r, k_max, delta, folio_ok)
            return out, R1, ref, "greedy"
        raise InputError(f"unknown strategy {strategy!r}")

    def node_summary(self, g0, td, x, child_summaries, r, k_max, delta) -> NodeSummary:
        start = time.perf_counter()
        kids = td.children(x)
        groups: dict = {}
        if self.config.group_children:
            for z in sorted(kids, key=lambda z: (-len(td.adh(z)), z)):
                home = next((y for y in groups if td.adh(z) <= td.adh(y)), None)
                groups.setdefault(z if home is None else home, []).append(z)
        else:
            groups = {z: [z] for z in kids}
        bars = []
        for z, members in groups.items():
            a = td.adh(z)
            if len(members) == 1:
                s = child_summaries[z]
                bars.append((a, s.graph, s.R))
                continue
            base = ColoredRootedGraph.build(a, [], {v: g0.colors[v] for v in a}, adhesion_labels(a))
            Rz = set(a)
            for w in members:
                s = child_summaries[w]
                base, where = glue(base, adhesion_labels(td.adh(w)), s.graph)
                Rz |= {where[v] for v in s.R}
            rep, Rr, _, _ = self._reduce(base, Rz, r, k_max, delta)
            bars.append((a, rep, Rr))
        bag = td.bags[x]
        hat = g0.induced(bag).with_roots(adhesion_labels(td.adh(x)))
        R_hat = set(bag)
        for a, rep, Rr in bars:
            hat, where = glue(hat, adhesion_labels(a), rep)
            R_hat |= {where[v] for v in Rr}
        rep, R1, ref, branch = self._reduce(hat, R_hat, r, k_max, delta)
        rep, R1 = _relabel_compact(rep, R1)
        if ref is not None:
            ref = extended_delta_folio(rep, delta)
        sid = PatternTable(rep, k_max).sig_id(R1, r)
        summ = NodeSummary(x, rep, R1, sid, ref, branch, hat.n, time.perf_counter() - start)
        if self.config.audit:
            for check in audit_node(g0, td, x, summ, r, k_max, delta, self.config):
                if check["status"] == "fail":
                    raise EngineError(f"node {x}: {check['check']} failed: {check['detail']}")
        return summ

    def run(self, g: ColoredRootedGraph, td: TreeDecomposition, f: Formula, vbar=None) -> EngineRun:
        start = time.perf_counter()
        rep = validate(g, td)
        if not rep.ok:
            raise InputError("invalid decomposition: " + "; ".join(rep.violations))
        g0, sentence = prepare(g, f, vbar)
        r = quantifier_rank(sentence)
        k_max = max_dp_arity(sentence)
        if self.config.rank is not None:
            r = max(r, self.config.rank)
        if self.config.k_max is not None:
            k_max = max(k_max, self.config.k_max)
        delta, clamped = choose_delta(self.config, td, k_max)
        sums = self.summaries(g0, td, r, k_max, delta)
        top = sums[td.root]
        if g.n == 0:
            # prenex form is only equivalent on nonempty domains
            verdict = model_check_bruteforce(g, f, vbar)
        else:
            verdict = evaluate(top.graph, sentence, {}, domain=sorted(top.R))
        return EngineRun(verdict, r, k_max, delta, sums, sentence, g0, td,
                         seconds=time.perf_counter() - start, delta_clamped=clamped)


def choose_delta(config: EngineConfig, td: TreeDecomposition, k_max: int) -> tuple[int, bool]:
    """(δ, clamped): the configured δ, or adhesion width + 2 * k_max capped by the pattern library."""
    if config.delta is not None:
        return config.delta, False
    want = td.adhesion_width() + 2 * k_max
    return min(want, MAX_LIBRARY_DELTA), want > MAX_LIBRARY_DELTA


def compute_node_summary(g: ColoredRootedGraph, td: TreeDecomposition, x: int, child_summaries: dict,
                         r: int, k_max: int, delta: int, config: EngineConfig | None = None) -> NodeSummary:
    """One bottom-up step on a prepared graph (no user roots; see prepare)."""
    missing = [z for z in td.children(x) if z not in child_summaries]
    if missing:
        raise InputError(f"node {x}: no summaries for children {missing}")
    return DPModelChecker(config).node_summary(g, td, x, child_summaries, r, k_max, delta)


def model_check_dp(g: ColoredRootedGraph, td: TreeDecomposition | None, f: Formula, vbar=None,
                   config: EngineConfig | None = None, checker: DPModelChecker | None = None) -> bool:
    """Decide g ⊨ f(vbar) through the decomposition engine (exhaustive-minwidth td if None)."""
    if td is None:
        td = build_decomposition(g, "exhaustive-minwidth")
    checker = checker or DPModelChecker(config)
    return checker.run(g, td, f, vbar).verdict


# ---------------------------------------------------------------- audit

def true_cone(g0, td, x):
    cone = td.cone(x)
    return g0.induced(cone).with_roots(adhesion_labels(td.adh(x))), frozenset(cone)


def audit_node(g0, td, x, summ: NodeSummary, r, k_max, delta, config: EngineConfig) -> list[dict]:
    """Recompute the invariants of one summary from the true cone."""
    checks = []
    cone, R = true_cone(g0, td, x)

    def add(name, ok, detail=""):
        checks.append({"node": x, "check": name, "status": "pass" if ok else "fail", "detail": detail})

    try:
        want = PatternTable(cone, k_max).sig_id(R, r)
        add("joint-signature", want == summ.sig_id == PatternTable(summ.graph, k_max).sig_id(summ.R, r))
        add("extended-signature", extended_sig(cone, R, r, k_max) == extended_sig(summ.graph, summ.R, r, k_max))
    except ResourceError as e:
        checks.append({"node": x, "check": "signature", "status": "skipped", "detail": str(e)})
    if config.folio and len(cone.roots) <= config.max_folio_roots:
        try:
            same = extended_delta_folio(cone, delta) == extended_delta_folio(summ.graph, delta)
            add("extended-folio", same)
        except ResourceError as e:
            checks.append({"node": x, "check": "extended-folio", "status": "skipped", "detail": str(e)})
    else:
        checks.append({"node": x, "check": "extended-folio", "status": "skipped",
                       "detail": f"{len(cone.roots)} roots exceed the folio cap"})
    if config.rep_cap is not None:
        add("size-cap", summ.size <= config.rep_cap, f"{summ.size} vertices")
    return checks


def audit(g: ColoredRootedGraph, td: TreeDecomposition, f: Formula, vbar=None,
          config: EngineConfig | None = None, mutate_seed: int | None = None) -> dict:
    """Run the engine, recheck every node against its true cone and the verdict
    against brute force. With mutate_seed, one random representative gets one
    random edge flipped before the checks (mutation testing)."""
    cfg = config or EngineConfig()
    if cfg.audit:
        cfg = EngineConfig(**{**asdict(cfg), "audit": False})
    checker = DPModelChecker(cfg)
    start = time.perf_counter()
    run = checker.run(g, td, f, vbar)
    mutation = None
    if mutate_seed is not None:
        mutation = _mutate(run, mutate_seed)
    checks = []
    for x in td.postorder():
        checks.extend(audit_node(run.graph, td, x, run.summaries[x], run.r, run.k_max, run.delta, cfg))
    truth = model_check_bruteforce(g, f, vbar)
    verdict = run.verdict
    if mutation is not None:
        top = run.summaries[td.root]
        verdict = evaluate(top.graph, run.formula, {}, domain=sorted(top.R))
    checks.append({"node": None, "check": "verdict", "status": "pass" if verdict == truth else "fail",
                   "detail": f"engine={verdict} bruteforce={truth}"})
    return make_report(run, checks, truth, mutation, time.perf_counter() - start)


def _mutate(run: EngineRun, seed: int) -> dict:
    rng = random.Random(seed)
    nodes = [x for x in run.td.nodes if run.summaries[x].graph.n >= 2]
    if not nodes:
        return {"node": None, "edge": None}
    x = rng.choice(nodes)
    s = run.summaries[x]
    u, v = rng.sample(list(s.graph.vertices), 2)
    g2 = s.graph.without_edges([(u, v)]) if s.graph.has_edge(u, v) else s.graph.with_edges([(u, v)])
    s.graph = g2
    s.sig_id = PatternTable(g2, run.k_max).sig_id(s.R, run.r)
    return {"node": x, "edge": [u, v], "added": g2.has_edge(u, v)}


def make_report(run: EngineRun, checks: list, truth, mutation, seconds) -> dict:
    nodes = []
    for x in run.td.nodes:
        s = run.summaries[x]
        nodes.append({
            "node": x,
            "parent": run.td.parent[x],
            "bag": sorted(run.td.bags[x]),
            "adhesion": sorted(run.td.adh(x)),
            "hat_size": s.hat_size,
            "rep_size": s.size,
            "rep_annotated": len(s.R),
            "branch": s.branch,
            "folio": "tracked" if s.folio is not None else "skipped",
            "seconds": round(s.seconds, 6),
        })
    failures = [c for c in checks if c["status"] == "fail"]
    return {
        "version": REPORT_VERSION,
        "verdict": bool(run.verdict),
        "bruteforce": truth,
        "r": run.r,
        "k_max": run.k_max,
        "delta": run.delta,
        "delta_clamped": run.delta_clamped,
        "formula": str(run.formula),
        "nodes": nodes,
        "audit": checks,
        "failures": failures,
        "mutation": mutation,
        "seconds": round(seconds, 6),
    }
