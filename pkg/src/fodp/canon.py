"""Canonical forms for small colored rooted graphs.

Isomorphisms must preserve colors and root labels. The search is plain
individualization-refinement: refine the ordered partition by neighbour
counts, branch on every vertex of the first non-singleton cell, and keep the
lexicographically smallest adjacency encoding over all leaves.
"""
from __future__ import annotations

from .errors import ResourceError
from .graph import ColoredRootedGraph

MAX_CANON_VERTICES = 14
MAX_CANON_LEAVES = 200_000


def _vertex_label(g, v):
    return (g.roots.get(v, 0), tuple(sorted(g.colors[v])))


def _refine(g, cells):
    cells = [list(c) for c in cells]
    changed = True
    while changed:
        changed = False
        out = []
        where = {v: i for i, c in enumerate(cells) for v in c}
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            sig = {v: tuple(sorted(where[w] for w in g.adj[v])) for v in cell}
            groups: dict = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            if len(groups) > 1:
                changed = True
            out.extend(groups[k] for k in sorted(groups))
        cells = out
    return cells


def canonical_form(g: ColoredRootedGraph) -> tuple[bytes, tuple[int, ...]]:
    """Return (key, order): equal keys iff isomorphic; order lists g's vertices canonically."""
    n = g.n
    if n > MAX_CANON_VERTICES:
        raise ResourceError(f"canonical_form: {n} vertices exceeds cap {MAX_CANON_VERTICES}")
    if n == 0:
        return b"0|", ()
    labels = {v: _vertex_label(g, v) for v in g.vertices}
    start: dict = {}
    for v in g.vertices:
        start.setdefault(labels[v], []).append(v)
    init = [start[k] for k in sorted(start)]
    best = [None, None]
    leaves = [0]

    def encode(order):
        pos = {v: i for i, v in enumerate(order)}
        bits = tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in g.edges))
        return (tuple(labels[v] for v in order), bits)

    def search(cells):
        cells = _refine(g, cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaves[0] += 1
            if leaves[0] > MAX_CANON_LEAVES:
                raise ResourceError("canonical_form: search cap exceeded")
            order = tuple(c[0] for c in cells)
            enc = encode(order)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        cell = cells[target]
        for v in cell:
            rest = [w for w in cell if w != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:])

    search(init)
    enc, order = best
    return repr((n, enc)).encode(), order


def canonical_key(g: ColoredRootedGraph) -> bytes:
    return canonical_form(g)[0]


def canonical_graph(g: ColoredRootedGraph) -> ColoredRootedGraph:
    """The isomorphic copy of g on vertices 0..n-1 in canonical order."""
    _, order = canonical_form(g)
    return g.relabel({v: i for i, v in enumerate(order)})


def to_graph6(g: ColoredRootedGraph) -> str:
    """graph6 string of g's canonical copy, with a `|label:position,...` root suffix."""
    c = canonical_graph(g)
    n = c.n
    if n > 62:
        raise ResourceError("graph6 encoder only handles n <= 62")
    bits = [1 if c.has_edge(i, j) else 0 for j in range(n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = chr(n + 63) + "".join(
        chr(63 + int("".join(map(str, bits[i:i + 6])), 2)) for i in range(0, len(bits), 6))
    if c.roots:
        out += "|" + ",".join(f"{lab}:{v}" for v, lab in sorted(c.roots.items(), key=lambda kv: kv[1]))
    cols = [(v, sorted(cs)) for v, cs in sorted(c.colors.items()) if cs]
    if cols:
        out += "|c" + ";".join(f"{v}:" + ".".join(map(str, cs)) for v, cs in cols)
    return out
