"""δ-folios: which small rooted graphs are topological minors of a rooted graph.

Patterns are uncoloured. A pattern vertex carrying label ℓ must land on the
subject root with label ℓ; unlabelled pattern vertices land anywhere. The
extended folio records the δ-folio of G+X for every graph X on the roots,
where G+X adds X's edges to G (the edges G already has among its roots stay).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Mapping

from .canon import canonical_key, to_graph6
from .errors import InputError, ResourceError
from .graph import ColoredRootedGraph, components, weight_of
from .minors import find_clique_minor, find_topological_minor, is_clique_minor_model

MAX_LIBRARY_DELTA = 4
MAX_EXTENDED_ROOTS = 5
MAX_REPRESENTATIVE_VERTICES = 12


def isolated_count(h: ColoredRootedGraph) -> int:
    return sum(1 for v in h.vertices if not h.adj[v])


def folio_size(h: ColoredRootedGraph) -> int:
    """|E(H)| + is(H), the quantity bounded by δ."""
    return h.m + isolated_count(h)


@dataclass(frozen=True)
class Folio:
    delta: int
    keys: frozenset
    members: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __contains__(self, h) -> bool:
        return canonical_key(h) in self.keys

    def __len__(self):
        return len(self.keys)

    def strings(self) -> list[str]:
        return sorted(to_graph6(h) for h in self.members.values())


# ---------------------------------------------------------------- pattern library

@lru_cache(maxsize=None)
def _shapes(delta: int) -> tuple:
    """Unrooted graphs with |E| + is ≤ δ, one per isomorphism class.

    Graphs without isolated vertices grow one edge at a time (old or new
    endpoints); isolated vertices are added at the end.
    """
    if delta > MAX_LIBRARY_DELTA:
        raise ResourceError(f"pattern library capped at δ = {MAX_LIBRARY_DELTA}")
    layers = [[ColoredRootedGraph.build([], [])]]
    for _ in range(delta):
        seen = {}
        for h in layers[-1]:
            m = h.n
            for u, v in combinations(range(m + 2), 2):
                if v >= m + 1 and u != m:
                    continue  # new endpoints are m (and m + 1)
                if v < m and h.has_edge(u, v):
                    continue
                grown = ColoredRootedGraph.build(range(max(m, v + 1)), list(h.edges) + [(u, v)])
                seen.setdefault(canonical_key(grown), grown)
        layers.append(list(seen.values()))
    out = {}
    for e, layer in enumerate(layers):
        for h in layer:
            for i in range(delta - e + 1):
                g = ColoredRootedGraph.build(range(h.n + i), h.edges)
                out.setdefault(canonical_key(g), g)
    return tuple(out.values())


@lru_cache(maxsize=None)
def _library(delta: int, nlabels: int) -> tuple:
    """Rooted patterns with labels drawn from 1..nlabels, one per isomorphism class."""
    seen = {}
    labels = range(1, nlabels + 1)
    for shape in _shapes(delta):
        vs = shape.vertices
        for j in range(min(len(vs), nlabels) + 1):
            for chosen in combinations(vs, j):
                for labs in permutations(labels, j):
                    h = shape.with_roots(dict(zip(chosen, labs)))
                    seen.setdefault(canonical_key(h), h)
    return tuple(seen.values())


def pattern_library(delta: int, labels: Iterable[int]) -> list[ColoredRootedGraph]:
    """Every rooted graph with |E| + is ≤ δ whose root labels lie in `labels`."""
    return [h for _, h in _keyed_library(delta, tuple(sorted(set(labels))))]


@lru_cache(maxsize=4096)
def _keyed_library(delta: int, labels: tuple) -> tuple:
    if delta < 0:
        raise InputError("δ must be non-negative")
    rename = {i + 1: lab for i, lab in enumerate(labels)}
    out = []
    for h in _library(delta, len(labels)):
        if h.roots:
            h = h.with_roots({v: rename[lab] for v, lab in h.roots.items()})
        out.append((canonical_key(h), h))
    return tuple(out)


def all_rooted_patterns(delta: int, labels: Iterable[int]) -> list[ColoredRootedGraph]:
    return [h for h in pattern_library(delta, labels) if len(h.roots) == h.n]


# ---------------------------------------------------------------- folios

def _bare(g: ColoredRootedGraph) -> ColoredRootedGraph:
    return g if not any(g.colors.values()) else g.with_colors({})


def delta_folio(g: ColoredRootedGraph, delta: int, witnesses: dict | None = None) -> Folio:
    """The δ-folio of g. If `witnesses` is a dict it receives key -> model."""
    g = _bare(g)
    members = {}
    for key, h in _keyed_library(delta, tuple(sorted(g.roots.values()))):
        model = find_topological_minor(g, h)
        if model is not None:
            members[key] = h
            if witnesses is not None:
                witnesses[key] = model
    return Folio(delta, frozenset(members), members)


def w_bounded_delta_folio(g: ColoredRootedGraph, delta: int, w: Mapping[int, int]) -> Folio:
    """Members of the δ-folio whose rooted vertices v have deg_H(v) ≤ w(η(v)).

    Root images are forced by the labels, so the bound only filters patterns.
    """
    base = delta_folio(g, delta)
    members = {}
    for key, h in base.members.items():
        if all(h.degree(v) <= w.get(g.vertex_of_label(lab), 1) for v, lab in h.roots.items()):
            members[key] = h
    return Folio(delta, frozenset(members), members)


def root_graphs(labels: Iterable[int]) -> list[tuple]:
    """Every graph X on the given labels, as a sorted tuple of label pairs."""
    pairs = list(combinations(sorted(labels), 2))
    out = []
    for mask in range(1 << len(pairs)):
        out.append(tuple(p for i, p in enumerate(pairs) if mask >> i & 1))
    return out


def plus(g: ColoredRootedGraph, x: tuple) -> ColoredRootedGraph:
    """G+X: add the edges of X (given on root labels) to g."""
    if not x:
        return g
    return g.with_edges((g.vertex_of_label(a), g.vertex_of_label(b)) for a, b in x)


@dataclass(frozen=True)
class ExtendedFolio:
    delta: int
    entries: Mapping  # X (tuple of label pairs) -> Folio

    def __eq__(self, other):
        return (isinstance(other, ExtendedFolio) and self.delta == other.delta
                and {x: f.keys for x, f in self.entries.items()}
                == {x: f.keys for x, f in other.entries.items()})

    def __hash__(self):
        return hash((self.delta, tuple(sorted((x, f.keys) for x, f in self.entries.items()))))


def extended_delta_folio(g: ColoredRootedGraph, delta: int, witnesses: dict | None = None) -> ExtendedFolio:
    if len(g.roots) > MAX_EXTENDED_ROOTS:
        raise ResourceError(f"extended folio over {len(g.roots)} roots exceeds cap {MAX_EXTENDED_ROOTS}")
    entries = {}
    for x in root_graphs(g.roots.values()):
        wit = None if witnesses is None else witnesses.setdefault(x, {})
        entries[x] = delta_folio(plus(g, x), delta, wit)
    return ExtendedFolio(delta, entries)


def same_extended_folio_after_deletion(sub: ColoredRootedGraph, reference: ExtendedFolio,
                                       witnesses: dict) -> bool:
    """Does `sub` (a subgraph of the graph the witnesses came from, same roots)
    keep the extended folio `reference`?

    Folios only shrink under deletion, so it is enough to re-find the members
    whose stored model used something that is gone. `witnesses` is updated in
    place only when the answer is yes.
    """
    sub = _bare(sub)
    fresh = {}
    for x, folio in reference.entries.items():
        gx = plus(sub, x)
        wit = witnesses[x]
        for key, h in folio.members.items():
            model = wit[key]
            if _model_survives(gx, model):
                continue
            m2 = find_topological_minor(gx, h)
            if m2 is None:
                return False
            fresh[(x, key)] = m2
    for (x, key), m in fresh.items():
        witnesses[x][key] = m
    return True


def _model_survives(g, model) -> bool:
    for v in model.principal.values():
        if v not in g:
            return False
    for p in model.paths.values():
        for a, b in zip(p, p[1:]):
            if a not in g or b not in g or not g.has_edge(a, b):
                return False
    return True


# ---------------------------------------------------------------- genericity

def is_rooted_generic(f: Folio, delta: int, root_labels: Iterable[int],
                      w_bound: Mapping[int, int] | None = None) -> bool:
    """Every all-rooted H with |E| + is ≤ δ on the given labels is in f.

    With `w_bound` (label -> weight) only the H whose root degrees respect the
    bound are required, which is the meaning for w-bounded folios.
    """
    for h in all_rooted_patterns(delta, root_labels):
        if w_bound is not None and any(h.degree(v) > w_bound.get(lab, 1) for v, lab in h.roots.items()):
            continue
        if canonical_key(h) not in f.keys:
            return False
    return True


def is_generic(f: Folio, delta: int, root_labels: Iterable[int],
               w_bound: Mapping[int, int] | None = None) -> bool:
    for h in pattern_library(delta, root_labels):
        if w_bound is not None and any(h.degree(v) > w_bound.get(lab, 1) for v, lab in h.roots.items()):
            continue
        if canonical_key(h) not in f.keys:
            return False
    return True


def label_weights(g: ColoredRootedGraph, w: Mapping[int, int]) -> dict[int, int]:
    return {lab: w.get(v, 1) for v, lab in g.roots.items()}


def check_generic_hypotheses(g: ColoredRootedGraph, w: Mapping[int, int], t: int,
                             branch_sets, k: int | None = None) -> bool:
    """No separation (G1, G2) with w(separator) < w(R), R ⊆ V(G1) and some branch
    set missing V(G1).

    Taking G1 as small as possible (separator plus the components of G − S that
    meet R) only helps the third condition, so every separator S of weight
    below w(R) is tried with that G1.
    """
    roots = set(g.roots)
    wr = weight_of(w, roots)
    if not is_clique_minor_model(g, branch_sets) or len(branch_sets) != t:
        raise InputError("branch sets are not a K_t minor model")
    if 2 * t < 3 * wr:
        raise InputError(f"precondition violated: t = {t} < 3/2 * w(R) = {1.5 * wr}")
    sets = [set(b) for b in branch_sets]
    vs = list(g.vertices)
    # every vertex weighs at least 1, so |S| < w(R)
    for size in range(0, max(wr, 0)):
        for sep in combinations(vs, size):
            if weight_of(w, sep) >= wr:
                continue
            s = set(sep)
            side = set(s)
            for comp in components(g, [v for v in vs if v not in s]):
                if comp & roots:
                    side |= comp
            if any(not (b & side) for b in sets):
                return False
    return True


def random_clique_model(g: ColoredRootedGraph, t: int):
    """Convenience: a K_t minor model of g or None."""
    return find_clique_minor(g, t)


# ---------------------------------------------------------------- representatives

def min_representative_same_extended_folio(g: ColoredRootedGraph, delta: int) -> ColoredRootedGraph:
    """A vertex-minimum induced subgraph containing the roots with the same extended δ-folio.

    Induced subgraphs suffice: if some subgraph on vertex set S keeps the
    extended folio then so does g[S], by monotonicity.
    """
    if g.n > MAX_REPRESENTATIVE_VERTICES:
        raise ResourceError(f"representative search capped at {MAX_REPRESENTATIVE_VERTICES} vertices")
    target = extended_delta_folio(g, delta)
    roots = set(g.roots)
    rest = [v for v in g.vertices if v not in roots]
    for size in range(len(rest) + 1):
        for extra in combinations(rest, size):
            h = g.induced(roots | set(extra))
            if extended_delta_folio(h, delta) == target:
                return h
    return g
