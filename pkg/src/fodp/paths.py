"""Exact disjoint-paths queries.

Two paths are internally vertex-disjoint when no vertex of one is an internal
vertex of the other. Consequences used below:

* every terminal of every requested pair is barred from all interiors;
* a pair (v, v) is met by the one-vertex path, which has no interior;
* a pair of adjacent terminals is met by the bare edge, which has no interior
  either, so it can always be satisfied without consuming anything.

Only the remaining pairs need a search, and that search only chooses
interiors from the non-terminal vertices.
"""
from __future__ import annotations

import weakref
from typing import Iterable, Sequence

from .errors import InputError
from .graph import ColoredRootedGraph

_CACHE: "weakref.WeakKeyDictionary[ColoredRootedGraph, dict]" = weakref.WeakKeyDictionary()


def normalize_pairs(pairs: Iterable) -> tuple[tuple[int, int], ...]:
    out = []
    for p in pairs:
        s, t = p
        out.append((s, t) if s <= t else (t, s))
    return tuple(sorted(out))


def dp_query(g: ColoredRootedGraph, pairs: Sequence, witness: bool = False,
             blocked: Iterable[int] = (), internal_budget: int | None = None):
    """Decide whether internally vertex-disjoint paths join every requested pair.

    `pairs` is a list; repeated pairs demand repeated paths. `blocked` vertices
    may not be used as interiors. `internal_budget` caps the total number of
    interior vertices over all paths (used by topological-minor routing).
    With witness=True returns (found, paths) where paths follows the order of
    `pairs`.
    """
    pairs = [tuple(p) for p in pairs]
    for p in pairs:
        if len(p) != 2:
            raise InputError(f"terminal pair {p!r} is not a pair")
        g.check_vertices(p)
    blocked = frozenset(blocked)
    g.check_vertices(blocked)
    if not witness:
        key = (normalize_pairs(pairs), blocked, internal_budget)
        cache = _CACHE.setdefault(g, {})
        hit = cache.get(key)
        if hit is None:
            hit = _solve(g, pairs, blocked, internal_budget) is not None
            cache[key] = hit
        return hit
    sol = _solve(g, pairs, blocked, internal_budget)
    return (sol is not None), sol


def _solve(g, pairs, blocked, budget):
    terminals = {v for p in pairs for v in p}
    forbidden = terminals | blocked
    result: list = [None] * len(pairs)
    hard = []
    for i, (s, t) in enumerate(pairs):
        if s == t:
            result[i] = (s,)
        elif g.has_edge(s, t):
            result[i] = (s, t)
        else:
            hard.append(i)
    if not hard:
        return result
    free = frozenset(v for v in g.vertices if v not in forbidden)
    # hardest pairs first: fewer options means earlier pruning
    hard.sort(key=lambda i: _reach_size(g, pairs[i], free))
    failed: set = set()

    def search(j, used):
        if j == len(hard):
            return True
        state = (j, used)
        if state in failed:
            return False
        i = hard[j]
        s, t = pairs[i]
        avail = free - used
        if not _connected_through(g, s, t, avail):
            failed.add(state)
            return False
        left = None if budget is None else budget - len(used)
        for interior in _interiors(g, s, t, avail, left):
            if search(j + 1, used | frozenset(interior)):
                result[i] = (s,) + interior + (t,)
                return True
        failed.add(state)
        return False

    return result if search(0, frozenset()) else None


def _reach_size(g, pair, free):
    s, t = pair
    seen, stack = {s}, [s]
    while stack:
        x = stack.pop()
        for y in g.adj[x]:
            if y in free and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen)


def _connected_through(g, s, t, avail):
    seen, stack = {s}, [s]
    while stack:
        x = stack.pop()
        for y in g.adj[x]:
            if y == t:
                return True
            if y in avail and y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def _interiors(g, s, t, avail, limit):
    """Interior vertex sequences of simple s-t paths through `avail`, shortest first-ish."""
    trail: list[int] = []
    on = set()

    def rec(x):
        for y in sorted(g.adj[x]):
            if y == t and trail:
                yield tuple(trail)
            elif y in avail and y not in on and (limit is None or len(trail) < limit):
                trail.append(y)
                on.add(y)
                yield from rec(y)
                trail.pop()
                on.discard(y)

    yield from rec(s)


def is_path_system(g: ColoredRootedGraph, pairs: Sequence, paths: Sequence[Sequence[int]]) -> bool:
    """Check a witness: real paths, matching endpoints, internally disjoint."""
    if len(paths) != len(pairs):
        return False
    for (s, t), p in zip(pairs, paths):
        if not p or len(set(p)) != len(p):
            return False
        if (p[0], p[-1]) != (s, t) and (p[-1], p[0]) != (s, t):
            return False
        if any(not g.has_edge(a, b) for a, b in zip(p, p[1:])):
            return False
    for i, p in enumerate(paths):
        for j, q in enumerate(paths):
            if i != j and set(p) & set(q[1:-1]):
                return False
    return True


_NO_BLOCK = frozenset()


def dp_holds(g: ColoredRootedGraph, key: tuple) -> bool:
    """Unchecked fast path: `key` must already be normalize_pairs output on vertices of g."""
    cache = _CACHE.get(g)
    if cache is None:
        cache = _CACHE.setdefault(g, {})
    full = (key, _NO_BLOCK, None)
    hit = cache.get(full)
    if hit is None:
        hit = _solve(g, list(key), _NO_BLOCK, None) is not None
        cache[full] = hit
    return hit
