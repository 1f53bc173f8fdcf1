"""Seeded constructions shared by the module tests and the acceptance suite."""
from __future__ import annotations

import random
from itertools import combinations

from fodp.decomposition import (TreeDecomposition, adhesion_labels, build_decomposition, cone_graph,
                                is_regular, make_regular, validate)
from fodp.engine import reduce_greedy
from fodp.folio import extended_delta_folio
from fodp.graph import ColoredRootedGraph, components, is_connected, is_unbreakable
from fodp.signature import extended_sig


def rand_edges(rnd, vs, p):
    return [(u, v) for u, v in combinations(vs, 2) if rnd.random() < p]


# ---------------------------------------------------------------- gluing along a separation

def separation_instance(rnd, r=2, k_max=2):
    """(g, (A, B), R, rep, rep_R) with |A ∩ B| <= 2, roots of g on B, and rep
    rooted on the separator with the extended signature of G[A]."""
    while True:
        n = rnd.randint(4, 7)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), rnd.uniform(0.3, 0.6)),
                                     {v: {0} for v in range(n) if rnd.random() < 0.25})
        s_size = rnd.randint(0, 2)
        sep = set(rnd.sample(range(n), s_size))
        rest = [v for v in range(n) if v not in sep]
        comps = components(g, rest)
        if len(comps) < 2:
            continue
        a = set(sep)
        b = set(sep)
        for i, c in enumerate(comps):
            (a if i % 2 == 0 else b).update(c)
        if rnd.random() < 0.4 and b - sep:
            g = g.with_roots({rnd.choice(sorted(b)): 7})
        R = frozenset(v for v in g.vertices if rnd.random() < 0.7)
        side = g.induced(a).with_roots(adhesion_labels(sep))
        side_R = R & frozenset(a)
        rep, rep_R = _representative(rnd, side, side_R, r, k_max)
        if rep is None:
            continue
        return g, (frozenset(a), frozenset(b)), R, rep, rep_R


def _representative(rnd, side, side_R, r, k_max):
    mode = rnd.random()
    if mode < 0.25:
        # an isomorphic copy with shuffled vertex ids
        perm = list(side.vertices)
        rnd.shuffle(perm)
        ids = {v: 100 + i for i, v in enumerate(perm)}
        return side.relabel(ids), frozenset(ids[v] for v in side_R)
    if mode < 0.75:
        g2, R2, _ = reduce_greedy(side, side_R, r, k_max, 1, folio_ok=False)
        return g2, R2
    # a random small graph on the same roots, accepted only if it matches
    target = extended_sig(side, side_R, r, k_max)
    roots = sorted(side.roots)
    for _ in range(30):
        extra = rnd.randint(0, 2)
        vs = list(roots) + [50 + i for i in range(extra)]
        cand = ColoredRootedGraph.build(vs, rand_edges(rnd, vs, 0.5),
                                        {v: {0} for v in vs if v >= 50 and rnd.random() < 0.3},
                                        side.roots)
        cand_R = frozenset(v for v in vs if rnd.random() < 0.6)
        if extended_sig(cand, cand_R, r, k_max) == target:
            return cand, cand_R
    return None, None


# ---------------------------------------------------------------- attaching small graphs to a bag

def attach_instance(rnd, q, k, c, max_n=9):
    """A bag graph that is (q, k)-unbreakable in the composite, plus at most 3
    attached graphs of at most c new vertices each, hung on an antichain of
    adhesion sets the way a regular decomposition would (connected, and every
    adhesion vertex has a neighbour in the attached part).

    Returns (composite, bag) or None when the bag hypothesis fails.
    """
    nb = rnd.randint(max(2, q + 1), 5)
    bag = list(range(nb))
    edges = rand_edges(rnd, bag, rnd.uniform(0.4, 0.9))
    adhesions = []
    for _ in range(rnd.randint(1, 3)):
        size = rnd.randint(1, min(k + 1, nb))
        a = frozenset(rnd.sample(bag, size))
        if any(a <= b or b <= a for b in adhesions):
            continue
        adhesions.append(a)
    nxt = nb
    for a in adhesions:
        m = rnd.randint(1, c)
        if nxt + m > max_n:
            break
        new = list(range(nxt, nxt + m))
        nxt += m
        for u, v in zip(new, new[1:]):
            edges.append((u, v))
        for x in a:
            edges.append((x, rnd.choice(new)))
        edges += [e for e in rand_edges(rnd, new, 0.5) if e not in edges]
    g = ColoredRootedGraph.build(range(nxt), set(map(tuple, map(sorted, edges))))
    if not is_unbreakable(g, bag, q, k):
        return None
    return g, frozenset(bag)


# ---------------------------------------------------------------- cone replacement

def replacement_instance(rnd, max_tries=200):
    """(g, td, y, h, a, t) with a regular decomposition, y a child of the root,
    h rooted on adh(y) with the extended a-folio of G[cone(y)], and g free of
    a topological K_t."""
    from fodp.minors import max_topological_clique

    for _ in range(max_tries):
        n = rnd.randint(5, 8)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), rnd.uniform(0.25, 0.55)))
        if not is_connected(g):
            continue
        td = make_regular(g, build_decomposition(g))
        if not validate(g, td).ok or not is_regular(g, td):
            continue
        kids = td.children(td.root)
        if not kids:
            continue
        y = rnd.choice(kids)
        a = td.adhesion_width()
        if a == 0 or a > 2:
            continue
        cone = cone_graph(g, td, y)
        ref = extended_delta_folio(cone, a)
        h = _same_folio_graph(rnd, cone, a, ref)
        if h is None:
            continue
        t = max_topological_clique(g) + 1
        return g, td, y, h, a, t
    raise RuntimeError("no replacement instance found")


def _same_folio_graph(rnd, cone, a, ref):
    roots = sorted(cone.roots)
    for _ in range(60):
        extra = rnd.randint(0, 3)
        vs = roots + [100 + i for i in range(extra)]
        cand = ColoredRootedGraph.build(vs, rand_edges(rnd, vs, rnd.uniform(0.3, 0.8)), {}, cone.roots)
        if extended_delta_folio(cand, a) == ref:
            return cand
    return None


# ---------------------------------------------------------------- generic folios

def generic_instance(rnd, k):
    """(g, w, t, branch_sets) with a clique minor model and weights on the roots;
    the hypotheses may or may not hold."""
    from fodp.minors import find_clique_minor

    while True:
        n = rnd.randint(4, 8)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), rnd.uniform(0.45, 0.85)))
        roots = rnd.sample(range(n), rnd.randint(1, 3))
        g = g.with_roots({v: i + 1 for i, v in enumerate(roots)})
        w = {v: (rnd.randint(1, k) if v in g.roots else 1) for v in g.vertices}
        wr = sum(w[v] for v in roots)
        t = -(-3 * wr // 2)
        bs = find_clique_minor(g, t)
        if bs is None:
            continue
        return g, w, t, bs


# ---------------------------------------------------------------- collapse

def collapse_instance(rnd, extra=None, mindeg=1):
    """K6 on 0..5 (singleton branch sets) plus 1-4 extra vertices each joined
    to `mindeg`..`mindeg`+2 earlier vertices."""
    extra = rnd.randint(1, 4) if extra is None else extra
    n = 6 + extra
    edges = set(combinations(range(6), 2))
    for v in range(6, n):
        d = rnd.randint(mindeg, min(v, mindeg + 2))
        for u in rnd.sample(range(v), d):
            edges.add((u, v))
    return ColoredRootedGraph.build(range(n), edges), [[i] for i in range(6)]


def all_decompositions_roots(td: TreeDecomposition):
    return [td.rerooted(x) for x in td.nodes]
