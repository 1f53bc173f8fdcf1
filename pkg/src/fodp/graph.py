"""Colored rooted graphs, separations, unbreakability and distances.

Graphs are immutable values. Vertices are small non-negative integers, every
vertex carries a (possibly empty) set of color indices, and a subset of the
vertices is rooted with pairwise distinct positive labels.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .errors import InputError, ParseError, ResourceError

# Cap on separator enumeration in is_unbreakable.
MAX_SEPARATOR_CANDIDATES = 2_000_000


class ColoredRootedGraph:
    __slots__ = ("vertices", "adj", "colors", "roots", "_by_label", "_edges", "__weakref__")

    def __init__(self, vertices, adj, colors, roots):
        self.vertices: tuple[int, ...] = vertices
        self.adj: dict[int, frozenset[int]] = adj
        self.colors: dict[int, frozenset[int]] = colors
        self.roots: dict[int, int] = roots
        self._by_label = {lab: v for v, lab in roots.items()}
        self._edges = None

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable = (), colors: Mapping | None = None,
              roots: Mapping[int, int] | None = None) -> "ColoredRootedGraph":
        vs = tuple(sorted(set(int(v) for v in vertices)))
        vset = set(vs)
        adj = {v: set() for v in vs}
        for e in edges:
            u, v = tuple(e)
            if u not in vset or v not in vset:
                raise InputError(f"edge {u}-{v} uses an undeclared vertex")
            if u == v:
                raise InputError(f"loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        cols = {v: frozenset() for v in vs}
        for v, cs in (colors or {}).items():
            if v not in vset:
                raise InputError(f"color on undeclared vertex {v}")
            cols[v] = frozenset(int(c) for c in cs)
        rts = {}
        for v, lab in (roots or {}).items():
            if v not in vset:
                raise InputError(f"root on undeclared vertex {v}")
            if lab < 1:
                raise InputError(f"root label {lab} is not positive")
            rts[v] = int(lab)
        if len(set(rts.values())) != len(rts):
            raise InputError("root labels are not pairwise distinct")
        return cls(vs, {v: frozenset(a) for v, a in adj.items()}, cols, rts)

    # basic queries

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> list[tuple[int, int]]:
        if self._edges is None:
            self._edges = sorted((u, v) for u in self.vertices for v in self.adj[u] if u < v)
        return self._edges

    @property
    def m(self) -> int:
        return len(self.edges)

    def __contains__(self, v) -> bool:
        return v in self.adj

    def has_edge(self, u, v) -> bool:
        return v in self.adj.get(u, ())

    def degree(self, v) -> int:
        return len(self.adj[v])

    def root_set(self) -> frozenset[int]:
        return frozenset(self.roots)

    def root_labels(self) -> list[int]:
        return sorted(self.roots.values())

    def vertex_of_label(self, label: int):
        return self._by_label.get(label)

    def num_colors(self) -> int:
        return max((max(c) + 1 for c in self.colors.values() if c), default=0)

    def check_vertices(self, vs: Iterable) -> None:
        for v in vs:
            if v not in self.adj:
                raise InputError(f"unknown vertex {v!r}")

    # derived graphs

    def _make(self, vertices, edges, colors=None, roots=None):
        return ColoredRootedGraph.build(vertices, edges,
                                       self.colors if colors is None else colors,
                                       self.roots if roots is None else roots)

    def induced(self, keep: Iterable[int]) -> "ColoredRootedGraph":
        keep = set(keep)
        self.check_vertices(keep)
        return ColoredRootedGraph.build(
            keep, [(u, v) for u, v in self.edges if u in keep and v in keep],
            {v: c for v, c in self.colors.items() if v in keep},
            {v: lab for v, lab in self.roots.items() if v in keep})

    def with_edges(self, extra: Iterable) -> "ColoredRootedGraph":
        extra = [tuple(e) for e in extra]
        if not extra:
            return self
        return self._make(self.vertices, list(self.edges) + extra)

    def without_edges(self, drop: Iterable) -> "ColoredRootedGraph":
        drop = {frozenset(e) for e in drop}
        return self._make(self.vertices, [e for e in self.edges if frozenset(e) not in drop])

    def without_vertices(self, drop: Iterable[int]) -> "ColoredRootedGraph":
        drop = set(drop)
        return self.induced(v for v in self.vertices if v not in drop)

    def with_roots(self, roots: Mapping[int, int]) -> "ColoredRootedGraph":
        return self._make(self.vertices, self.edges, roots=dict(roots))

    def with_colors(self, colors: Mapping[int, Iterable[int]]) -> "ColoredRootedGraph":
        return self._make(self.vertices, self.edges, colors={v: frozenset(c) for v, c in colors.items()})

    def relabel(self, mapping: Mapping[int, int]) -> "ColoredRootedGraph":
        """Rename vertices through an injective map."""
        return ColoredRootedGraph.build(
            [mapping[v] for v in self.vertices],
            [(mapping[u], mapping[v]) for u, v in self.edges],
            {mapping[v]: c for v, c in self.colors.items()},
            {mapping[v]: lab for v, lab in self.roots.items()})

    def same_as(self, other: "ColoredRootedGraph") -> bool:
        """Structural equality (same vertex ids), not isomorphism."""
        return (self.vertices == other.vertices and self.adj == other.adj
                and self.colors == other.colors and self.roots == other.roots)

    def __repr__(self):
        extra = f", roots={self.roots}" if self.roots else ""
        return f"ColoredRootedGraph(n={self.n}, edges={self.edges}{extra})"


def union(*graphs: ColoredRootedGraph, roots: Mapping[int, int] | None = None) -> ColoredRootedGraph:
    """Glue graphs along shared vertex ids; colors are merged, roots default to the union."""
    vs, es, cols, rts = set(), [], {}, {}
    for g in graphs:
        vs.update(g.vertices)
        es.extend(g.edges)
        for v, c in g.colors.items():
            cols[v] = cols.get(v, frozenset()) | c
        rts.update(g.roots)
    return ColoredRootedGraph.build(vs, set(es), cols, rts if roots is None else roots)


def from_edges(edges: Iterable, n: int | None = None, **kw) -> ColoredRootedGraph:
    edges = [tuple(e) for e in edges]
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return ColoredRootedGraph.build(range(n), edges, **kw)


# named families, handy in tests and the CLI

def complete(n: int, **kw) -> ColoredRootedGraph:
    return from_edges(combinations(range(n), 2), n, **kw)


def path(n: int, **kw) -> ColoredRootedGraph:
    return from_edges([(i, i + 1) for i in range(n - 1)], n, **kw)


def cycle(n: int, **kw) -> ColoredRootedGraph:
    return from_edges([(i, (i + 1) % n) for i in range(n)], n, **kw)


# text format

def parse_graph(text: str) -> ColoredRootedGraph:
    """Read the `g <n> <m> <h>` / `v ...` / `e u v` text format."""
    header = None
    colors, roots, edges = {}, {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "g":
                if header is not None or len(tok) != 4:
                    raise ParseError("bad or repeated header", lineno, 1)
                header = tuple(int(t) for t in tok[1:])
            elif header is None:
                raise ParseError("content before `g` header", lineno, 1)
            elif tok[0] == "v":
                v = int(tok[1])
                cs, i = set(), 2
                while i < len(tok):
                    if tok[i] == "c":
                        i += 1
                        while i < len(tok) and tok[i] not in ("c", "r"):
                            cs.add(int(tok[i]))
                            i += 1
                    elif tok[i] == "r":
                        roots[v] = int(tok[i + 1])
                        i += 2
                    else:
                        raise ParseError(f"unexpected token {tok[i]!r}", lineno, i + 1)
                colors[v] = cs
            elif tok[0] == "e":
                if len(tok) != 3:
                    raise ParseError("edge line needs two endpoints", lineno, 1)
                edges.append((int(tok[1]), int(tok[2])))
            else:
                raise ParseError(f"unknown line type {tok[0]!r}", lineno, 1)
        except (ValueError, IndexError) as exc:
            raise ParseError(f"malformed line: {raw.strip()!r} ({exc})", lineno, 1) from None
    if header is None:
        raise ParseError("missing `g` header", 1, 1)
    n, m, h = header
    for v in colors:
        if not 0 <= v < n:
            raise InputError(f"vertex id {v} outside 0..{n - 1}")
    if len(edges) != m:
        raise InputError(f"header announces {m} edges, found {len(edges)}")
    for v, cs in colors.items():
        if any(not 0 <= c < h for c in cs):
            raise InputError(f"vertex {v} uses a color outside 0..{h - 1}")
    return ColoredRootedGraph.build(range(n), edges, colors, roots)


def format_graph(g: ColoredRootedGraph) -> str:
    """Inverse of parse_graph; vertices are renumbered 0..n-1 in sorted order."""
    idx = {v: i for i, v in enumerate(g.vertices)}
    lines = [f"g {g.n} {g.m} {g.num_colors()}"]
    for v in g.vertices:
        parts = [f"v {idx[v]}"]
        if g.colors[v]:
            parts.append("c " + " ".join(str(c) for c in sorted(g.colors[v])))
        if v in g.roots:
            parts.append(f"r {g.roots[v]}")
        lines.append(" ".join(parts))
    lines.extend(f"e {idx[u]} {idx[v]}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


# connectivity

def components(g: ColoredRootedGraph, within: Iterable[int] | None = None) -> list[frozenset[int]]:
    allowed = set(g.vertices) if within is None else set(within)
    seen, out = set(), []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp, stack = {s}, [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        out.append(frozenset(comp))
    return out


def is_connected(g: ColoredRootedGraph, within: Iterable[int] | None = None) -> bool:
    return len(components(g, within)) <= 1


INF = float("inf")


def distance(g: ColoredRootedGraph, u: int, v: int):
    """BFS distance, or math.inf when v is unreachable."""
    g.check_vertices((u, v))
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return INF


def bfs_distances(g: ColoredRootedGraph, u: int) -> dict[int, int]:
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def bounded_paths(g: ColoredRootedGraph, u: int, v: int, max_len: int,
                  avoid: Iterable[int] = ()) -> Iterator[tuple[int, ...]]:
    """Lazily yield every simple u-v path with at most max_len edges.

    Vertices in `avoid` may not be used as internal vertices.
    """
    g.check_vertices((u, v))
    avoid = set(avoid)
    if u == v:
        yield (u,)
        return
    trail = [u]
    on_trail = {u}

    def rec():
        x = trail[-1]
        for y in sorted(g.adj[x]):
            if y == v:
                yield tuple(trail) + (v,)
            elif y not in on_trail and y not in avoid and len(trail) < max_len:
                trail.append(y)
                on_trail.add(y)
                yield from rec()
                trail.pop()
                on_trail.discard(y)

    yield from rec()


# separations and unbreakability

def is_separation(g: ColoredRootedGraph, a: Iterable[int], b: Iterable[int]) -> bool:
    a, b = set(a), set(b)
    if not a <= set(g.vertices) or not b <= set(g.vertices):
        return False
    if a | b != set(g.vertices):
        return False
    only_a, only_b = a - b, b - a
    return not any(w in only_b for x in only_a for w in g.adj[x])


def order(a: Iterable[int], b: Iterable[int]) -> int:
    return len(set(a) & set(b))


def separations_from(g: ColoredRootedGraph, sep: frozenset[int]) -> Iterator[tuple[frozenset, frozenset]]:
    """All separations whose separator is exactly `sep`.

    Each component of g - sep goes wholly to one side; every separation arises
    this way, so enumerating separators first covers the whole space.
    """
    comps = components(g, set(g.vertices) - sep)
    for mask in range(1 << len(comps)):
        a, b = set(sep), set(sep)
        for i, c in enumerate(comps):
            (a if mask >> i & 1 else b).update(c)
        yield frozenset(a), frozenset(b)


def find_breaking_separation(g: ColoredRootedGraph, h_vertices: Iterable[int], q: int, k: int):
    """A separation of order <= k with more than q vertices of h on both sides, or None."""
    h = set(h_vertices)
    g.check_vertices(h)
    vs = list(g.vertices)
    if len(h) <= q:
        return None
    budget = MAX_SEPARATOR_CANDIDATES
    for size in range(min(k, len(vs)) + 1):
        for sep in combinations(vs, size):
            budget -= 1
            if budget < 0:
                raise ResourceError("is_unbreakable: separator enumeration cap exceeded")
            sep = frozenset(sep)
            base = len(sep & h)
            comps = components(g, set(vs) - sep)
            weights = [len(c & h) for c in comps]
            total = sum(weights)
            # subset sums over components reachable for side A
            reach = {0: ()}
            for i, wt in enumerate(weights):
                nxt = dict(reach)
                for s, chosen in reach.items():
                    nxt.setdefault(s + wt, chosen + (i,))
                reach = nxt
            for s, chosen in reach.items():
                if base + s > q and base + total - s > q:
                    a = set(sep).union(*(comps[i] for i in chosen))
                    b = set(vs) - (a - sep)
                    return frozenset(a), frozenset(b)
    return None


def is_unbreakable(g: ColoredRootedGraph, h_vertices: Iterable[int], q: int, k: int) -> bool:
    """True iff every separation of order <= k leaves at most q vertices of h on some side."""
    return find_breaking_separation(g, h_vertices, q, k) is None


def weight_of(w: Mapping[int, int] | None, vs: Iterable[int]) -> int:
    if w is None:
        return sum(1 for _ in vs)
    return sum(w.get(v, 1) for v in vs)
