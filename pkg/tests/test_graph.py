import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fodp.canon import canonical_key, to_graph6
from fodp.errors import InputError, ParseError
from fodp.graph import (ColoredRootedGraph, bounded_paths, complete, components, cycle, distance,
                        format_graph, from_edges, is_separation, is_unbreakable, order, parse_graph,
                        path, union)

from conftest import all_graphs
from oracles import isomorphic_oracle, simple_paths, unbreakable_oracle


@st.composite
def graphs(draw, max_n=6, colors=2, roots=True):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [e for e in pairs if draw(st.booleans())]
    cols = {v: draw(st.sets(st.integers(0, colors - 1), max_size=colors)) for v in range(n)} if colors else {}
    rts = {}
    if roots and n:
        chosen = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=min(3, n)))
        rts = {v: i + 1 for i, v in enumerate(chosen)}
    return ColoredRootedGraph.build(range(n), edges, cols, rts)


def test_build_rejects_loops_and_unknown_vertices():
    with pytest.raises(InputError):
        ColoredRootedGraph.build([0, 1], [(0, 0)])
    with pytest.raises(InputError):
        ColoredRootedGraph.build([0, 1], [(0, 2)])
    with pytest.raises(InputError):
        ColoredRootedGraph.build([0, 1], [], roots={0: 1, 1: 1})


def test_edges_are_symmetric():
    g = from_edges([(2, 0), (1, 2)])
    assert g.has_edge(0, 2) and g.has_edge(2, 0)
    assert g.edges == [(0, 2), (1, 2)]


def test_parse_format_example():
    text = "# tiny\ng 3 2 2\nv 0 c 0 1 r 5\nv 1\nv 2 c 1\ne 0 1\ne 1 2\n"
    g = parse_graph(text)
    assert g.n == 3 and g.m == 2
    assert g.colors[0] == {0, 1} and g.roots == {0: 5}
    assert parse_graph(format_graph(g)).same_as(g)


@pytest.mark.parametrize("text", [
    "v 0\n",
    "g 2 1 0\ne 0\n",
    "g 2 1 0\nx 1\n",
    "g 2 2 0\ne 0 1\n",
    "g 2 0 1\nv 0 c 3\n",
])
def test_parse_errors(text):
    with pytest.raises(InputError):
        parse_graph(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_graph("g 2 0 0\nv 0 q\n")
    assert info.value.line == 2


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_format_roundtrip(g):
    assert parse_graph(format_graph(g)).same_as(g)


def test_separation_examples():
    k3 = complete(3)
    assert is_separation(k3, {0, 1, 2}, {0, 1, 2}) and order({0, 1, 2}, {0, 1, 2}) == 3
    p3 = path(3)
    assert is_separation(p3, {0, 1}, {1, 2}) and order({0, 1}, {1, 2}) == 1
    assert not is_separation(p3, {0}, {1, 2})


def test_unbreakable_examples():
    assert is_unbreakable(complete(5), range(5), 2, 2)
    two_k4 = union(complete(4), complete(4).relabel({i: i + 4 for i in range(4)})).with_edges([(3, 4)])
    assert not is_unbreakable(two_k4, range(8), 3, 1)
    assert is_unbreakable(from_edges([], 1), [0], 1, 3)


def test_unbreakable_matches_separation_enumeration():
    rnd = random.Random(3)
    for g in list(all_graphs(4)) + [from_edges([e for e in cycle(6).edges if rnd.random() < .8], 6)
                                    for _ in range(10)]:
        h = [v for v in g.vertices if rnd.random() < 0.7]
        for q in range(0, 3):
            for k in range(0, 3):
                assert is_unbreakable(g, h, q, k) == unbreakable_oracle(g, h, q, k)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_cliques_unbreakable_when_q_at_least_k(n):
    for k in range(0, 3):
        for q in range(k, 4):
            assert is_unbreakable(complete(n), range(n), q, k)


def test_distances():
    p3 = path(3)
    assert distance(p3, 0, 2) == 2
    assert distance(p3, 1, 1) == 0
    assert distance(from_edges([], 2), 0, 1) == math.inf


def test_bounded_paths_match_simple_paths():
    g = complete(5)
    for L in range(1, 5):
        got = sorted(bounded_paths(g, 0, 4, L))
        want = sorted(p for p in simple_paths({v: set(g.adj[v]) for v in g.vertices}, 0, 4)
                      if len(p) - 1 <= L)
        assert got == want
    assert list(bounded_paths(g, 2, 2, 3)) == [(2,)]


def test_components():
    g = from_edges([(0, 1), (2, 3)], 5)
    assert sorted(map(sorted, components(g))) == [[0, 1], [2, 3], [4]]


def test_canonical_key_examples():
    c4 = cycle(4)
    assert canonical_key(c4) == canonical_key(c4.relabel({0: 2, 1: 0, 2: 3, 3: 1}))
    assert canonical_key(c4) != canonical_key(path(4))
    k2a = complete(2).with_roots({0: 1, 1: 2})
    k2b = complete(2).with_roots({0: 1, 1: 3})
    assert canonical_key(k2a) != canonical_key(k2b)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=6), st.randoms(use_true_random=False))
def test_canonical_key_invariant_under_relabelling(g, rnd):
    perm = list(g.vertices)
    rnd.shuffle(perm)
    h = g.relabel(dict(zip(g.vertices, perm)))
    assert canonical_key(g) == canonical_key(h)
    assert to_graph6(g) == to_graph6(h)


def test_canonical_key_agrees_with_isomorphism_oracle():
    rnd = random.Random(7)
    gs = []
    for _ in range(60):
        n = rnd.randint(3, 5)
        es = [(u, v) for u in range(n) for v in range(u + 1, n) if rnd.random() < 0.5]
        roots = {0: 1} if rnd.random() < 0.5 else {}
        gs.append(ColoredRootedGraph.build(range(n), es, {1: {0}} if rnd.random() < 0.3 else {}, roots))
    for a in gs[:30]:
        for b in gs[30:]:
            assert (canonical_key(a) == canonical_key(b)) == isomorphic_oracle(a, b)
