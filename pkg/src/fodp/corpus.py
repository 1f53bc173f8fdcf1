"""Seeded random graphs and formulas for testing and benchmarking."""
from __future__ import annotations

import random
from itertools import combinations

from .graph import ColoredRootedGraph
from .logic import DP, And, Color, Edge, Eq, Exists, Forall, Formula, Not, Or, RootLabel


def random_graph(n: int, p: float, rng: random.Random, n_colors: int = 0,
                 n_roots: int = 0) -> ColoredRootedGraph:
    edges = [e for e in combinations(range(n), 2) if rng.random() < p]
    colors = {v: {c for c in range(n_colors) if rng.random() < 0.4} for v in range(n)}
    roots = {}
    if n_roots:
        for i, v in enumerate(rng.sample(range(n), min(n_roots, n))):
            roots[v] = i + 1
    return ColoredRootedGraph.build(range(n), edges, colors, roots)


def random_atom(rng: random.Random, vs: list[str], k_max: int, n_colors: int, labels=()) -> Formula:
    kinds = ["eq", "edge", "edge"]
    if n_colors:
        kinds.append("color")
    if labels:
        kinds.append("root")
    if k_max:
        kinds += ["dp", "dp", "dp"]
    kind = rng.choice(kinds)
    if kind == "eq":
        return Eq(rng.choice(vs), rng.choice(vs))
    if kind == "edge":
        return Edge(rng.choice(vs), rng.choice(vs))
    if kind == "color":
        return Color(rng.randrange(n_colors), rng.choice(vs))
    if kind == "root":
        return RootLabel(rng.choice(list(labels)), rng.choice(vs))
    k = rng.randint(1, k_max)
    return DP(tuple((rng.choice(vs), rng.choice(vs)) for _ in range(k)))


def random_matrix(rng, vs, k_max, n_colors, size, labels=()):
    if size <= 1:
        a = random_atom(rng, vs, k_max, n_colors, labels)
        return Not(a) if rng.random() < 0.3 else a
    left = rng.randint(1, size - 1)
    op = And if rng.random() < 0.5 else Or
    f = op(random_matrix(rng, vs, k_max, n_colors, left, labels),
           random_matrix(rng, vs, k_max, n_colors, size - left, labels))
    return Not(f) if rng.random() < 0.15 else f


def random_sentence(rng: random.Random, rank: int = 3, k_max: int = 2, n_colors: int = 0,
                    free: tuple[str, ...] = (), labels=(), size: int | None = None) -> Formula:
    """A prenex formula with `rank` quantifiers whose free variables are `free`."""
    bound = [f"x{i}" for i in range(1, rank + 1)]
    vs = list(free) + bound
    if not vs:
        vs = ["x1"]
        bound = ["x1"]
    f = random_matrix(rng, vs, k_max, n_colors, size or rng.randint(2, 5), labels)
    for x in reversed(bound):
        f = (Exists if rng.random() < 0.5 else Forall)(x, f)
    return f
