import random

import pytest

from fodp.canon import canonical_key
from fodp.errors import InputError
from fodp.folio import (all_rooted_patterns, check_generic_hypotheses, delta_folio,
                        extended_delta_folio, folio_size, is_generic, is_rooted_generic,
                        label_weights, min_representative_same_extended_folio, pattern_library,
                        w_bounded_delta_folio)
from fodp.graph import ColoredRootedGraph, complete, from_edges
from fodp.minors import find_clique_minor

from instances import generic_instance, rand_edges
from oracles import canon_oracle, rooted_topological_minor_oracle, small_rooted_graphs


def key_of(n, es, roots):
    return canonical_key(ColoredRootedGraph.build(range(n), es, roots=roots))


@pytest.mark.parametrize("delta,labels", [(1, ()), (2, ()), (3, ()), (2, (1,)), (2, (1, 2)),
                                          (3, (4, 9))])
def test_library_matches_independent_enumeration(delta, labels):
    want = {canon_oracle(n, es, roots) for n, es, roots in small_rooted_graphs(delta, labels)}
    lib = pattern_library(delta, labels)
    got = set()
    for h in lib:
        ids = {v: i for i, v in enumerate(h.vertices)}
        got.add(canon_oracle(h.n, [(ids[u], ids[v]) for u, v in h.edges],
                             {ids[v]: lab for v, lab in h.roots.items()}))
    assert len(got) == len(lib)
    assert got == want


def test_single_vertex_and_k2_examples():
    one = from_edges([], 1)
    f = delta_folio(one, 1)
    assert f.keys == {key_of(0, [], {}), key_of(1, [], {})}
    k2 = delta_folio(complete(2), 1)
    assert key_of(2, [(0, 1)], {}) in k2.keys and key_of(1, [], {}) in k2.keys
    assert key_of(0, [], {}) in k2.keys


def test_members_respect_bounds():
    rnd = random.Random(3)
    for _ in range(25):
        n = rnd.randint(1, 6)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), 0.5),
                                     roots={v: i + 1 for i, v in enumerate(rnd.sample(range(n), min(n, 2)))})
        for delta in (1, 2, 3):
            f = delta_folio(g, delta)
            assert key_of(0, [], {}) in f.keys
            for h in f.members.values():
                assert folio_size(h) <= delta and h.n <= 2 * delta


def test_folio_agrees_with_model_enumeration():
    rnd = random.Random(8)
    for _ in range(20):
        n = rnd.randint(2, 5)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), 0.5), roots={0: 1, n - 1: 2})
        f = delta_folio(g, 2)
        for h in pattern_library(2, (1, 2)):
            assert (canonical_key(h) in f.keys) == rooted_topological_minor_oracle(g, h)


def test_monotone_under_edge_addition():
    rnd = random.Random(5)
    for _ in range(50):
        n = rnd.randint(2, 6)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), 0.4), roots={0: 1})
        u, v = rnd.sample(range(n), 2)
        delta = rnd.randint(1, 2)
        assert delta_folio(g, delta).keys <= delta_folio(g.with_edges([(u, v)]), delta).keys


def test_extended_folio_examples():
    g = from_edges([], 3)
    assert len(extended_delta_folio(g, 1).entries) == 1
    two = ColoredRootedGraph.build([0, 1], [], roots={0: 1, 1: 2})
    ext = extended_delta_folio(two, 1)
    assert len(ext.entries) == 2
    rooted_k2 = key_of(2, [(0, 1)], {0: 1, 1: 2})
    assert rooted_k2 not in ext.entries[()].keys
    assert rooted_k2 in ext.entries[((1, 2),)].keys


def test_w_bounded_examples():
    rnd = random.Random(2)
    for _ in range(10):
        n = rnd.randint(2, 6)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), 0.6), roots={0: 1, 1: 2})
        huge = {v: 100 for v in g.vertices}
        assert w_bounded_delta_folio(g, 2, huge).keys == delta_folio(g, 2).keys
        zero = w_bounded_delta_folio(g, 2, {v: 0 for v in g.vertices})
        assert all(h.degree(v) == 0 for h in zero.members.values() for v in h.roots)
    star = from_edges([(0, i) for i in range(1, 4)], roots={0: 1})
    bounded = w_bounded_delta_folio(star, 2, {0: 1})
    cherry = key_of(3, [(0, 1), (0, 2)], {0: 1})
    assert cherry in delta_folio(star, 2).keys and cherry not in bounded.keys


def test_rooted_generic_examples():
    g = complete(7).with_roots({0: 1, 1: 2, 2: 3})
    f = delta_folio(g, 3)
    assert is_rooted_generic(f, 3, (1, 2, 3))
    assert is_generic(f, 3, (1, 2, 3))
    empty = delta_folio(from_edges([], 0), 1)
    assert not is_rooted_generic(type(empty)(1, frozenset()), 1, (1,))
    assert all(len(h.roots) == h.n for h in all_rooted_patterns(2, (1, 2)))


def test_generic_implies_rooted_generic():
    rnd = random.Random(12)
    for _ in range(30):
        n = rnd.randint(2, 6)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), 0.7), roots={0: 1, 1: 2})
        f = delta_folio(g, 2)
        if is_generic(f, 2, (1, 2)):
            assert is_rooted_generic(f, 2, (1, 2))


def test_min_representative_examples():
    single = ColoredRootedGraph.build([0], [], roots={0: 1})
    assert min_representative_same_extended_folio(single, 1).same_as(single)
    tail = from_edges([(i, i + 1) for i in range(5)], roots={0: 1})
    rep = min_representative_same_extended_folio(tail, 1)
    assert rep.n <= 2 and extended_delta_folio(rep, 1) == extended_delta_folio(tail, 1)
    k2 = complete(2).with_roots({0: 1, 1: 2})
    assert min_representative_same_extended_folio(k2, 1).m == 1


def test_min_representative_is_minimum():
    rnd = random.Random(14)
    for _ in range(8):
        n = rnd.randint(3, 6)
        g = ColoredRootedGraph.build(range(n), rand_edges(rnd, range(n), 0.5), roots={0: 1, 1: 2})
        rep = min_representative_same_extended_folio(g, 2)
        ref = extended_delta_folio(g, 2)
        assert extended_delta_folio(rep, 2) == ref
        # no induced subgraph with fewer vertices keeps the extended folio
        others = [v for v in g.vertices if v not in g.roots]
        smaller = rep.n - 1 - len(g.roots)
        if smaller >= 0:
            from itertools import combinations
            for extra in combinations(others, smaller):
                assert extended_delta_folio(g.induced(set(g.roots) | set(extra)), 2) != ref


def test_generic_hypothesis_examples():
    g = complete(5).with_roots({0: 1, 1: 2})
    w = {v: 1 for v in g.vertices}
    bs = [[v] for v in range(5)]
    assert check_generic_hypotheses(g, w, 5, bs, 1)
    assert is_rooted_generic(w_bounded_delta_folio(g, 1, w), 1, (1, 2), label_weights(g, w))
    # the roots hang off a cut vertex of weight 1 < w(R) = 2
    leaf = ColoredRootedGraph.build(range(7), list(complete(5).edges) + [(4, 5), (5, 6), (4, 6)],
                                    roots={5: 1, 6: 2})
    bs = find_clique_minor(leaf, 3)
    assert not check_generic_hypotheses(leaf, {v: 1 for v in leaf.vertices}, 3, bs, 1)
    with pytest.raises(InputError):
        check_generic_hypotheses(g, {0: 3, 1: 3}, 5, [[v] for v in range(5)], 1)


def test_hypotheses_imply_rooted_generic():
    rnd = random.Random(40)
    found = 0
    while found < 10:
        k = rnd.randint(1, 2)
        g, w, t, bs = generic_instance(rnd, k)
        if not check_generic_hypotheses(g, w, t, bs, k):
            continue
        found += 1
        f = w_bounded_delta_folio(g, k, w)
        assert is_rooted_generic(f, k, g.roots.values(), label_weights(g, w))
