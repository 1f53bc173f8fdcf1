"""Rooted tree decompositions and the views built on them.

adh(x) = bag(x) ∩ bag(parent(x)), with bag(parent(root)) = ∅;
cone(x) = union of bags in the subtree of x; comp(x) = cone(x) ∖ adh(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping

from .errors import InputError, ParseError, ResourceError
from .graph import ColoredRootedGraph, components, is_unbreakable

MAX_EXACT_TW_VERTICES = 16
MAX_F_UNBREAK = 2 ** 63 - 1


class TreeDecomposition:
    def __init__(self, bags: Mapping[int, Iterable[int]], tree_edges: Iterable = (), root: int | None = None):
        self.bags = {x: frozenset(b) for x, b in bags.items()}
        if not self.bags:
            raise InputError("a tree decomposition needs at least one node")
        self.root = next(iter(self.bags)) if root is None else root
        if self.root not in self.bags:
            raise InputError(f"root {self.root} is not a node")
        nbrs: dict = {x: [] for x in self.bags}
        count = 0
        for a, b in tree_edges:
            if a not in self.bags or b not in self.bags:
                raise InputError(f"tree edge {a}-{b} mentions an unknown node")
            nbrs[a].append(b)
            nbrs[b].append(a)
            count += 1
        if count != len(self.bags) - 1:
            raise InputError(f"{len(self.bags)} nodes need {len(self.bags) - 1} tree edges, got {count}")
        self.parent: dict = {self.root: None}
        order = [self.root]
        for x in order:
            for y in sorted(nbrs[x]):
                if y in self.parent:
                    if self.parent[x] != y:
                        raise InputError("tree edges contain a cycle")
                    continue
                self.parent[y] = x
                order.append(y)
        if len(order) != len(self.bags):
            raise InputError("tree edges do not connect all nodes")
        self._children = {x: [] for x in self.bags}
        for y in order[1:]:
            self._children[self.parent[y]].append(y)
        self._preorder = order
        self._cone: dict = {}

    @classmethod
    def from_parent(cls, bags, parent: Mapping[int, int | None]):
        root = next(x for x, p in parent.items() if p is None)
        return cls(bags, [(x, p) for x, p in parent.items() if p is not None], root)

    @property
    def nodes(self) -> list[int]:
        return list(self._preorder)

    def children(self, x) -> list[int]:
        return list(self._children[x])

    def postorder(self) -> list[int]:
        return list(reversed(self._preorder))

    def subtree(self, x) -> list[int]:
        out = [x]
        for y in out:
            out.extend(self._children[y])
        return out

    def bag(self, x) -> frozenset:
        return self.bags[x] if x is not None else frozenset()

    def adh(self, x) -> frozenset:
        return self.bags[x] & self.bag(self.parent[x])

    def cone(self, x) -> frozenset:
        c = self._cone.get(x)
        if c is None:
            c = frozenset().union(*(self.bags[y] for y in self.subtree(x)))
            self._cone[x] = c
        return c

    def comp(self, x) -> frozenset:
        return self.cone(x) - self.adh(x)

    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def adhesion_width(self) -> int:
        return max(len(self.adh(x)) for x in self.bags)

    def tree_edges(self) -> list[tuple[int, int]]:
        return [(self.parent[x], x) for x in self._preorder[1:]]

    def rerooted(self, root) -> "TreeDecomposition":
        return TreeDecomposition(self.bags, self.tree_edges(), root)

    def __repr__(self):
        return f"TreeDecomposition(nodes={len(self.bags)}, width={self.width()}, root={self.root})"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(g: ColoredRootedGraph, td: TreeDecomposition) -> ValidationReport:
    rep = ValidationReport()
    vs = set(g.vertices)
    for x in td.nodes:
        extra = td.bags[x] - vs
        if extra:
            rep.violations.append(f"bag {x} mentions non-vertices {sorted(extra)}")
    for v in g.vertices:
        holders = {x for x in td.nodes if v in td.bags[x]}
        if not holders:
            rep.violations.append(f"vertex {v} is in no bag")
            continue
        # the holders are connected iff exactly one of them has its parent outside
        tops = [x for x in holders if td.parent[x] not in holders]
        if len(tops) != 1:
            rep.violations.append(f"bags containing vertex {v} are disconnected: nodes {sorted(holders)}")
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags.values()):
            rep.violations.append(f"edge {u}-{v} is in no bag")
    return rep


# ---------------------------------------------------------------- regularity

def regularity_violations(g: ColoredRootedGraph, td: TreeDecomposition) -> list[str]:
    out = []
    for x in td.nodes:
        if x == td.root:
            continue
        c = td.comp(x)
        if not c:
            out.append(f"node {x}: empty component")
            continue
        if len(components(g, c)) != 1:
            out.append(f"node {x}: component is disconnected")
        for v in sorted(td.adh(x)):
            if not any(u in c for u in g.adj[v]):
                out.append(f"node {x}: adhesion vertex {v} has no neighbour in the component")
    return out


def is_regular(g: ColoredRootedGraph, td: TreeDecomposition) -> bool:
    return not regularity_violations(g, td)


def make_regular(g: ColoredRootedGraph, td: TreeDecomposition) -> TreeDecomposition:
    """Repair td until every non-root node has a nonempty, connected component
    and every adhesion vertex has a neighbour in it."""
    bags = dict(td.bags)
    parent = dict(td.parent)
    while True:
        cur = TreeDecomposition.from_parent(bags, parent)
        changed = False
        for x in cur.nodes:
            if x == cur.root:
                continue
            c = cur.comp(x)
            if not c:
                # cone(x) sits inside the parent bag: drop x, lift its children
                p = parent[x]
                for y in cur.children(x):
                    parent[y] = p
                del bags[x], parent[x]
                changed = True
                break
            parts = components(g, c)
            if len(parts) > 1:
                a = cur.adh(x)
                sub = cur.subtree(x)
                nxt = max(bags) + 1
                for part in parts[1:]:
                    ids = {}
                    for y in sub:
                        ids[y] = nxt
                        nxt += 1
                    for y in sub:
                        bags[ids[y]] = bags[y] & (part | a)
                        parent[ids[y]] = parent[y] if y == x else ids[parent[y]]
                for y in sub:
                    bags[y] = bags[y] & (parts[0] | a)
                changed = True
                break
            lonely = {v for v in cur.adh(x) if not any(u in c for u in g.adj[v])}
            if lonely:
                for y in cur.subtree(x):
                    bags[y] = bags[y] - lonely
                changed = True
                break
        if not changed:
            return cur


# ---------------------------------------------------------------- unbreakability

def is_strongly_unbreakable(g: ColoredRootedGraph, td: TreeDecomposition, q: int, k: int) -> bool:
    for x in td.nodes:
        cone = g.induced(td.cone(x))
        if not is_unbreakable(cone, td.bags[x], q, k):
            return False
    return True


def f_unbreak(c: int, q: int) -> int:
    """q + c * binom(q, floor(q/2))."""
    if c < 0 or q < 0:
        raise InputError("f_unbreak needs c, q >= 0")
    val = q + c * comb(q, q // 2)
    if val > MAX_F_UNBREAK:
        raise ResourceError(f"f_unbreak({c}, {q}) overflows 64 bits")
    return val


# ---------------------------------------------------------------- construction

def build_decomposition(g: ColoredRootedGraph, strategy: str = "exhaustive-minwidth",
                        text: str | None = None) -> TreeDecomposition:
    if strategy == "single-bag":
        return TreeDecomposition({0: g.vertices})
    if strategy == "exhaustive-minwidth":
        return _from_elimination(g, min_width_ordering(g))
    if strategy == "from-file":
        if text is None:
            raise InputError("from-file strategy needs the decomposition text")
        td = parse_td(text)
        rep = validate(g, td)
        if not rep.ok:
            raise InputError("invalid decomposition: " + "; ".join(rep.violations))
        return td
    raise InputError(f"unknown strategy {strategy!r}")


def min_width_ordering(g: ColoredRootedGraph) -> list[int]:
    """An elimination ordering of minimum width, by dynamic programming over vertex subsets."""
    n = g.n
    if n > MAX_EXACT_TW_VERTICES:
        raise ResourceError(f"exact treewidth capped at {MAX_EXACT_TW_VERTICES} vertices, got {n}")
    vs = list(g.vertices)
    idx = {v: i for i, v in enumerate(vs)}
    nb = [0] * n
    for u, v in g.edges:
        nb[idx[u]] |= 1 << idx[v]
        nb[idx[v]] |= 1 << idx[u]

    def q_size(s, i):
        # vertices outside s ∪ {i} reachable from i through s
        seen = 1 << i
        frontier = 1 << i
        out = 0
        while frontier:
            j = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            for_n = nb[j] & ~seen
            seen |= for_n
            out |= for_n & ~s
            frontier |= for_n & s
        return bin(out).count("1")

    full = (1 << n) - 1
    best = {0: (-1, None)}
    for s in range(1, full + 1):
        cand = None
        t = s
        while t:
            i = (t & -t).bit_length() - 1
            t &= t - 1
            rest = s & ~(1 << i)
            w = max(best[rest][0], q_size(rest, i))
            if cand is None or w < cand[0]:
                cand = (w, i)
        best[s] = cand
    order = []
    s = full
    while s:
        i = best[s][1]
        order.append(vs[i])
        s &= ~(1 << i)
    order.reverse()
    return order


def _from_elimination(g, order) -> TreeDecomposition:
    if not order:
        return TreeDecomposition({0: ()})
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.adj[v]) for v in g.vertices}
    bags, parent = {}, {}
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bags[pos[v]] = frozenset(later | {v})
        for a in later:
            adj[a] |= later - {a}
        parent[pos[v]] = min((pos[u] for u in later), default=None)
    # glue the forest into a tree below the last eliminated vertex
    last = len(order) - 1
    for x in list(parent):
        if parent[x] is None and x != last:
            parent[x] = last
    return _contract_nested(bags, parent)


def _contract_nested(bags, parent) -> TreeDecomposition:
    """Merge tree neighbours whose bags are nested."""
    bags, parent = dict(bags), dict(parent)
    changed = True
    while changed:
        changed = False
        for x, p in list(parent.items()):
            if p is None:
                continue
            if bags[x] <= bags[p] or bags[p] <= bags[x]:
                keep = bags[x] | bags[p]
                for y in [y for y, q in parent.items() if q == x]:
                    parent[y] = p
                bags[p] = keep
                del bags[x], parent[x]
                changed = True
                break
    return TreeDecomposition.from_parent(bags, parent)


# ---------------------------------------------------------------- file format

def parse_td(text: str) -> TreeDecomposition:
    """`s td <#bags> <maxbag> <n>`, `b <id> <v>...`, `<id> <id>` tree edges, `c` comments.

    The first bag listed is the root.
    """
    header = None
    bags: dict = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if header is not None or len(parts) != 5 or parts[1] != "td":
                    raise ParseError("bad solution line", lineno, 1)
                header = tuple(int(p) for p in parts[2:])
            elif parts[0] == "b":
                if header is None:
                    raise ParseError("bag before the 's td' line", lineno, 1)
                x = int(parts[1])
                if x in bags:
                    raise ParseError(f"bag {x} listed twice", lineno, 1)
                bags[x] = [int(v) for v in parts[2:]]
            else:
                if len(parts) != 2:
                    raise ParseError("tree edge lines have two bag ids", lineno, 1)
                edges.append((int(parts[0]), int(parts[1])))
        except ValueError as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"not an integer in {line!r}", lineno, 1) from None
    if header is None:
        raise ParseError("missing 's td' line", 1, 1)
    nbags, maxbag, _n = header
    if nbags != len(bags):
        raise ParseError(f"header announces {nbags} bags, found {len(bags)}", 1, 1)
    if bags and max(len(b) for b in bags.values()) > maxbag:
        raise ParseError("a bag is larger than the announced maximum", 1, 1)
    return TreeDecomposition(bags, edges, next(iter(bags)) if bags else None)


def format_td(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width() + 1} {n}"]
    for x in td.nodes:
        lines.append(" ".join(["b", str(x)] + [str(v) for v in sorted(td.bags[x])]))
    for p, x in td.tree_edges():
        lines.append(f"{p} {x}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- replacement

def adhesion_labels(adhesion: Iterable[int]) -> dict[int, int]:
    """The agreed root labelling of an adhesion set: vertex v gets label v + 1."""
    return {v: v + 1 for v in adhesion}


def glue(g: ColoredRootedGraph, attach: Mapping[int, int], h: ColoredRootedGraph):
    """Disjoint union of g and h with h's root labelled ℓ identified with attach⁻¹(ℓ).

    `attach` maps vertices of g to labels. Returns (glued graph, map h-vertex -> new id).
    The result keeps g's roots.
    """
    by_label = {lab: v for v, lab in attach.items()}
    if set(h.roots.values()) != set(by_label):
        raise InputError(f"root labels {sorted(h.roots.values())} do not match {sorted(by_label)}")
    nxt = max(g.vertices, default=-1) + 1
    where = {}
    for v in h.vertices:
        if v in h.roots:
            where[v] = by_label[h.roots[v]]
        else:
            where[v] = nxt
            nxt += 1
    verts = list(g.vertices) + [where[v] for v in h.vertices if v not in h.roots]
    edges = list(g.edges) + [(where[a], where[b]) for a, b in h.edges]
    colors = dict(g.colors)
    for v in h.vertices:
        if v not in h.roots:
            colors[where[v]] = h.colors[v]
    return ColoredRootedGraph.build(verts, edges, colors, g.roots), where


def replace_cone(g: ColoredRootedGraph, td: TreeDecomposition, y: int, h: ColoredRootedGraph,
                 labels: Mapping[int, int] | None = None) -> ColoredRootedGraph:
    """g with comp(y) deleted and h glued along adh(y).

    h must be rooted exactly on the labels of adh(y) (default: adhesion_labels).
    Edges of g inside adh(y) are kept.
    """
    a = td.adh(y)
    labels = dict(adhesion_labels(a) if labels is None else labels)
    if set(labels) != set(a):
        raise InputError("labelling does not cover the adhesion exactly")
    if len(h.roots) != len(a):
        raise InputError(f"replacement has {len(h.roots)} roots, adhesion has {len(a)} vertices")
    rest = g.without_vertices(td.comp(y))
    out, _ = glue(rest, labels, h)
    return out


def cone_graph(g: ColoredRootedGraph, td: TreeDecomposition, y: int,
               labels: Mapping[int, int] | None = None) -> ColoredRootedGraph:
    """G[cone(y)] rooted on adh(y) with the agreed labelling (original roots dropped)."""
    a = td.adh(y)
    labels = adhesion_labels(a) if labels is None else labels
    return g.induced(td.cone(y)).with_roots(labels)


def replacement_threshold(t: int, a: int, c: int) -> int:
    """max(t, 2a + 2, c): no K_{t'} topological minor survives the cone replacement."""
    return max(t, 2 * a + 2, c)
