"""Topological minor models and clique minors, by exhaustive search."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import ResourceError
from .graph import ColoredRootedGraph, complete, components
from .paths import dp_query

MAX_MINOR_VERTICES = 14


@dataclass(frozen=True)
class TopologicalMinorModel:
    principal: dict  # pattern vertex -> subject vertex
    paths: dict = field(default_factory=dict)  # (u, v) pattern edge -> subject path

    def used_vertices(self) -> frozenset:
        out = set(self.principal.values())
        for p in self.paths.values():
            out.update(p)
        return frozenset(out)


def is_topological_minor_model(g: ColoredRootedGraph, pattern: ColoredRootedGraph,
                               model: TopologicalMinorModel, rooted: bool = True) -> bool:
    eta = model.principal
    if set(eta) != set(pattern.vertices) or len(set(eta.values())) != len(eta):
        return False
    if any(v not in g for v in eta.values()):
        return False
    if rooted:
        for v, lab in pattern.roots.items():
            if g.roots.get(eta[v]) != lab:
                return False
    images = set(eta.values())
    interiors = []
    for u, v in pattern.edges:
        p = model.paths.get((u, v))
        if p is None:
            return False
        if {p[0], p[-1]} != {eta[u], eta[v]} or len(p) < 2 or len(set(p)) != len(p):
            return False
        if any(not g.has_edge(a, b) for a, b in zip(p, p[1:])):
            return False
        inner = set(p[1:-1])
        if inner & images:
            return False
        interiors.append(inner)
    seen: set = set()
    for inner in interiors:
        if inner & seen:
            return False
        seen |= inner
    return True


def find_topological_minor(g: ColoredRootedGraph, pattern: ColoredRootedGraph,
                           rooted: bool = True):
    """A TopologicalMinorModel of `pattern` in `g`, or None.

    With rooted=True each rooted pattern vertex must land on the subject root
    carrying the same label; unrooted pattern vertices may land anywhere.
    Isolated unrooted pattern vertices only need spare vertices, so they are
    accounted for as a budget on path interiors instead of being placed.
    """
    if g.n > MAX_MINOR_VERTICES:
        raise ResourceError(f"find_topological_minor: subject has {g.n} > {MAX_MINOR_VERTICES} vertices")
    if pattern.n > g.n:
        return None
    fixed = {}
    if rooted:
        for v, lab in pattern.roots.items():
            w = g.vertex_of_label(lab)
            if w is None:
                return None
            fixed[v] = w
    loose = [v for v in pattern.vertices if v not in fixed]
    isolated = [v for v in loose if pattern.degree(v) == 0]
    placed = sorted((v for v in loose if pattern.degree(v) > 0), key=lambda v: -pattern.degree(v))
    for v, w in fixed.items():
        if g.degree(w) < pattern.degree(v):
            return None
    edges = pattern.edges
    eta = dict(fixed)

    def route():
        images = set(eta.values())
        spare = g.n - len(images) - len(isolated)
        if spare < 0:
            return None
        pairs = [(eta[u], eta[v]) for u, v in edges]
        ok, paths = dp_query(g, pairs, witness=True, blocked=images, internal_budget=spare)
        if not ok:
            return None
        used = set(images)
        for p in paths:
            used.update(p)
        rest = [w for w in g.vertices if w not in used]
        full = dict(eta)
        for v, w in zip(isolated, rest):
            full[v] = w
        return TopologicalMinorModel(full, {e: tuple(p) for e, p in zip(edges, paths)})

    def assign(i):
        if i == len(placed):
            return route()
        v = placed[i]
        taken = set(eta.values())
        for w in g.vertices:
            if w in taken or g.degree(w) < pattern.degree(v):
                continue
            eta[v] = w
            found = assign(i + 1)
            if found is not None:
                return found
            del eta[v]
        return None

    return assign(0)


def has_topological_clique(g: ColoredRootedGraph, t: int) -> bool:
    if t <= 0:
        return True
    return find_topological_minor(g, complete(t), rooted=False) is not None


def max_topological_clique(g: ColoredRootedGraph) -> int:
    t = 0
    while t < g.n and has_topological_clique(g, t + 1):
        t += 1
    return t


# clique minors

def _connected_sets_with_min(g, v, allowed):
    """Every connected vertex set whose smallest member is v, inside `allowed`."""
    start = frozenset([v])
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for x in s:
                for y in g.adj[x]:
                    if y > v and y in allowed and y not in s:
                        t = s | {y}
                        if t not in seen:
                            seen.add(t)
                            nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def find_clique_minor(g: ColoredRootedGraph, t: int):
    """Branch sets of a K_t minor model, or None."""
    if t <= 0:
        return []
    if g.n > MAX_MINOR_VERTICES:
        raise ResourceError(f"clique minor search: {g.n} > {MAX_MINOR_VERTICES} vertices")
    if t > g.n or g.m < t * (t - 1) // 2:
        return None
    chosen: list[frozenset] = []

    def touches(a, b):
        return any(y in b for x in a for y in g.adj[x])

    def rec(lo, used):
        if len(chosen) == t:
            return True
        need = t - len(chosen)
        free = [v for v in g.vertices if v >= lo and v not in used]
        if len(free) < need:
            return False
        for v in free:
            allowed = {u for u in g.vertices if u not in used}
            for s in _connected_sets_with_min(g, v, allowed):
                if g.n - len(used) - len(s) < need - 1:
                    break
                if all(touches(s, b) for b in chosen):
                    chosen.append(s)
                    if rec(v + 1, used | s):
                        return True
                    chosen.pop()
        return False

    return [set(b) for b in chosen] if rec(min(g.vertices, default=0), frozenset()) else None


def has_clique_minor(g: ColoredRootedGraph, t: int) -> bool:
    return find_clique_minor(g, t) is not None


def is_clique_minor_model(g: ColoredRootedGraph, branch_sets) -> bool:
    sets = [set(b) for b in branch_sets]
    if any(not b or not b <= set(g.vertices) for b in sets):
        return False
    for a, b in combinations(sets, 2):
        if a & b or not any(y in b for x in a for y in g.adj[x]):
            return False
    return all(len(components(g, b)) == 1 for b in sets)
