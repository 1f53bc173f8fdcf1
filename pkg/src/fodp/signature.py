"""Patterns and signatures: pruned model-checking game trees with DP facts.

A pattern is the atomic type of a tuple over R ∪ {⊥}. Its terms are the
tuple positions and the roots of the graph, which act as constants; that is
what lets two sides of a separation be glued along their common roots. The
atoms are equalities (⊥ = ⊥ included), colours, edges and DP facts over every
multiset of at most k_max terminal pairs, trivial pairs (v, v) included since
they still keep v out of other interiors.

Canonical form of a pattern: distinct elements are numbered by first
appearance in the tuple, then the remaining roots by label. The pattern is
(position -> element index or -1 for ⊥, (label, element index) per root,
colours, edge bits, DP bits), all in that numbering.

sig^0 is a pattern; sig^i is the set of sig^(i-1) over one more move in
R ∪ {⊥}. Every structure is hash-consed into an integer id, so equality is an
integer comparison. The joint signature puts a whole xpattern (the patterns
in G+H for every graph H on the roots) at each leaf; it is what the model
checker preserves. The extended signature is the tuple of per-H signatures.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Mapping

from .errors import InputError, ResourceError
from .folio import plus, root_graphs
from .graph import ColoredRootedGraph
from .paths import dp_holds

MAX_SIG_LEAVES = 2_000_000

_IDS: dict = {}
_OBJS: list = []
_LOCK = threading.Lock()


def intern(obj) -> int:
    """Insert-if-absent into the global hash-cons table; entries never change."""
    i = _IDS.get(obj)
    if i is None:
        with _LOCK:
            i = _IDS.get(obj)
            if i is None:
                i = len(_OBJS)
                _OBJS.append(obj)
                _IDS[obj] = i
    return i


def lookup(i: int):
    return _OBJS[i]


@lru_cache(maxsize=None)
def _multisets(n: int, k_max: int):
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    ms = []
    for s in range(1, k_max + 1):
        for c in combinations_with_replacement(range(len(pairs)), s):
            ms.append(tuple(pairs[p] for p in c))
    return pairs, tuple(ms), {m: i for i, m in enumerate(ms)}


@lru_cache(maxsize=None)
def _perm_map(perm: tuple, k_max: int) -> tuple:
    # perm[i] = index in sorted order of the i-th element in tuple order
    _, ms, index = _multisets(len(perm), k_max)
    out = []
    for m in ms:
        mapped = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in m))
        out.append(index[mapped])
    return tuple(out)


class PatternTable:
    """Leaf patterns of one graph, cached per tuple.

    `xs` lists the graphs X on the root labels to evaluate in; the default is
    all of them (joint leaves), [()] gives plain patterns of g itself.
    """

    def __init__(self, g: ColoredRootedGraph, k_max: int, xs: Iterable | None = None):
        self.g = g
        self.k_max = k_max
        labels = sorted(g.roots.values())
        self.root_items = tuple((lab, g.vertex_of_label(lab)) for lab in labels)
        self.xs = root_graphs(labels) if xs is None else list(xs)
        self.graphs = [plus(g, x) for x in self.xs]
        self._sets: dict = {}
        self._local: dict = {}
        self._leaf: dict = {}

    def _set_facts(self, srt):
        f = self._sets.get(srt)
        if f is None:
            _, ms, _ = _multisets(len(srt), self.k_max)
            keys = [tuple(sorted((srt[a], srt[b]) for a, b in m)) for m in ms]
            f = tuple(tuple(dp_holds(gg, key) for key in keys) for gg in self.graphs)
            self._sets[srt] = f
        return f

    def _local_id(self, elems):
        lid = self._local.get(elems)
        if lid is None:
            srt = tuple(sorted(elems))
            pos = {v: i for i, v in enumerate(srt)}
            pmap = _perm_map(tuple(pos[v] for v in elems), self.k_max)
            facts = self._set_facts(srt)
            cols = tuple(tuple(sorted(self.g.colors[v])) for v in elems)
            idx_pairs = list(combinations(range(len(elems)), 2))
            parts = []
            for gg, f in zip(self.graphs, facts):
                adj = gg.adj
                edges = tuple(elems[j] in adj[elems[i]] for i, j in idx_pairs)
                parts.append((edges, tuple(f[j] for j in pmap)))
            lid = intern(("local", cols, tuple(parts)))
            self._local[elems] = lid
        return lid

    def leaf(self, tup: tuple) -> int:
        lid = self._leaf.get(tup)
        if lid is None:
            elems: list = []
            posidx = []
            for v in tup:
                if v is None:
                    posidx.append(-1)
                else:
                    if v not in elems:
                        elems.append(v)
                    posidx.append(elems.index(v))
            rootidx = []
            for lab, v in self.root_items:
                if v not in elems:
                    elems.append(v)
                rootidx.append((lab, elems.index(v)))
            lid = intern((tuple(posidx), tuple(rootidx), self._local_id(tuple(elems))))
            self._leaf[tup] = lid
        return lid

    def sig_id(self, R: Iterable[int], r: int, depth: int | None = None) -> int:
        """Id of the signature tree; with depth < r only the first `depth` moves
        are played and the remaining positions are ⊥ (a necessary-condition filter)."""
        choices = tuple(sorted(R)) + (None,)
        depth = r if depth is None else depth
        if len(choices) ** depth > MAX_SIG_LEAVES:
            raise ResourceError(f"signature would have {len(choices) ** depth} leaves")
        pad = (None,) * (r - depth)
        leaf = self.leaf

        def rec(prefix):
            if len(prefix) == depth:
                return leaf(prefix + pad)
            return intern(frozenset(rec(prefix + (u,)) for u in choices))

        return rec(())


# ---------------------------------------------------------------- public types

@dataclass(frozen=True)
class Pattern:
    """Canonical atomic type of one tuple in one graph."""
    positions: tuple  # element index per position, -1 for ⊥
    roots: tuple  # (label, element index)
    colors: tuple  # per element
    edges: tuple  # per element pair i < j
    dp: tuple  # per multiset of element pairs
    k_max: int

    def atoms(self) -> list[str]:
        n = len(self.colors)
        name = {}
        for j, i in enumerate(self.positions):
            if i >= 0 and i not in name:
                name[i] = f"x{j + 1}"
        for lab, i in self.roots:
            name.setdefault(i, f"r{lab}")
        out = []
        r = len(self.positions)
        for a, b in combinations(range(r), 2):
            if self.positions[a] == self.positions[b]:
                out.append(f"x{a + 1}=x{b + 1}")
        for j, i in enumerate(self.positions):
            for lab, ri in self.roots:
                if i == ri:
                    out.append(f"R{lab}(x{j + 1})")
        for i in range(n):
            for c in self.colors[i]:
                out.append(f"C{c}({name[i]})")
        for bit, (i, j) in zip(self.edges, combinations(range(n), 2)):
            if bit:
                out.append(f"E({name[i]},{name[j]})")
        _, ms, _ = _multisets(n, self.k_max)
        for bit, m in zip(self.dp, ms):
            if bit:
                out.append(f"DP{len(m)}[" + ",".join(f"({name[i]},{name[j]})" for i, j in m) + "]")
        return out


def _decode_leaf(leaf_id: int, k_max: int) -> tuple[Pattern, ...]:
    posidx, rootidx, lid = lookup(leaf_id)
    _, cols, parts = lookup(lid)
    return tuple(Pattern(posidx, rootidx, cols, e, d, k_max) for e, d in parts)


@dataclass(frozen=True)
class Signature:
    id: int
    depth: int
    k_max: int

    def __eq__(self, other):
        return isinstance(other, Signature) and self.id == other.id and self.depth == other.depth

    def __hash__(self):
        return hash((self.id, self.depth))

    def to_sexpr(self) -> str:
        """Stable S-expression; children sorted by their own text."""
        memo: dict = {}

        def show(i, d):
            key = (i, d)
            if key in memo:
                return memo[key]
            if d == 0:
                pats = _decode_leaf(i, self.k_max)
                body = " ".join("(p " + " ".join(p.atoms()) + ")" for p in pats)
                s = f"(x {body})" if len(pats) > 1 else body
            else:
                s = "(set " + " ".join(sorted(show(c, d - 1) for c in lookup(i))) + ")"
            memo[key] = s
            return s

        return show(self.id, self.depth)


@dataclass(frozen=True)
class ExtendedSignature:
    entries: Mapping  # X (tuple of label pairs) -> Signature

    def __eq__(self, other):
        return isinstance(other, ExtendedSignature) and dict(self.entries) == dict(other.entries)

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))


def _check_R(g, R):
    R = frozenset(R)
    g.check_vertices(R)
    return R


def pattern(g: ColoredRootedGraph, tup: Iterable, k_max: int) -> Pattern:
    tup = tuple(tup)
    g.check_vertices(v for v in tup if v is not None)
    return _decode_leaf(PatternTable(g, k_max, [()]).leaf(tup), k_max)[0]


def xpattern(g: ColoredRootedGraph, tup: Iterable, k_max: int) -> tuple[Pattern, ...]:
    tup = tuple(tup)
    g.check_vertices(v for v in tup if v is not None)
    return _decode_leaf(PatternTable(g, k_max).leaf(tup), k_max)


def sig(g: ColoredRootedGraph, R: Iterable[int], r: int, k_max: int) -> Signature:
    R = _check_R(g, R)
    return Signature(PatternTable(g, k_max, [()]).sig_id(R, r), r, k_max)


def joint_sig(g: ColoredRootedGraph, R: Iterable[int], r: int, k_max: int) -> Signature:
    """Signature whose leaves are xpatterns (one bisimulation for all H at once)."""
    R = _check_R(g, R)
    return Signature(PatternTable(g, k_max).sig_id(R, r), r, k_max)


def extended_sig(g: ColoredRootedGraph, R: Iterable[int], r: int, k_max: int) -> ExtendedSignature:
    R = _check_R(g, R)
    out = {}
    for x in root_graphs(g.roots.values()):
        out[x] = Signature(PatternTable(plus(g, x), k_max, [()]).sig_id(R, r), r, k_max)
    return ExtendedSignature(out)


def minimal_R(g: ColoredRootedGraph, R: Iterable[int], r: int, k_max: int,
              joint: bool = False) -> frozenset:
    """Greedily drop annotated vertices while the (extended or joint) signature
    stays put. The result admits no further single-vertex removal."""
    R = _check_R(g, R)
    if joint:
        tables = [PatternTable(g, k_max)]
    else:
        tables = [PatternTable(plus(g, x), k_max, [()]) for x in root_graphs(g.roots.values())]

    def key(s):
        return tuple(t.sig_id(s, r) for t in tables)

    target = key(R)
    cur = set(R)
    changed = True
    while changed:
        changed = False
        for v in sorted(cur):
            trial = cur - {v}
            if key(trial) == target:
                cur = trial
                changed = True
    return frozenset(cur)


def project_and_glue(g: ColoredRootedGraph, sep, rep: ColoredRootedGraph, rep_R: Iterable[int],
                     r: int, k_max: int, R: Iterable[int] | None = None,
                     labels: Mapping[int, int] | None = None, check: bool = False):
    """Replace the side_a part of g by `rep` along side_a ∩ side_b.

    rep must be rooted exactly on the labels of the separator (default: vertex
    v gets label v + 1). Returns (glued graph, annotation set).
    """
    from .decomposition import adhesion_labels, glue

    a, b = frozenset(sep[0]), frozenset(sep[1])
    s = a & b
    R = frozenset(g.vertices) if R is None else frozenset(R)
    labels = dict(adhesion_labels(s) if labels is None else labels)
    if set(labels) != set(s):
        raise InputError("labelling does not cover the separator")
    if set(rep.roots.values()) != set(labels.values()):
        raise InputError(f"representative roots {sorted(rep.roots.values())} do not match "
                         f"separator labels {sorted(labels.values())}")
    if not set(g.roots) <= b:
        raise InputError("roots of g must lie on side_b")
    rep_R = frozenset(rep_R)
    if check:
        side = g.induced(a).with_roots(labels)
        if extended_sig(side, R & a, r, k_max) != extended_sig(rep, rep_R, r, k_max):
            raise InputError("representative does not have the extended signature of side_a")
    out, where = glue(g.induced(b), labels, rep)
    return out, frozenset(where[v] for v in rep_R) | (R & b)
