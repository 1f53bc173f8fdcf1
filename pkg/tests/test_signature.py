import random

import pytest

from fodp.errors import InputError
from fodp.graph import ColoredRootedGraph, complete, from_edges, path
from fodp.signature import (extended_sig, joint_sig, minimal_R, pattern, project_and_glue, sig,
                            xpattern)

from instances import rand_edges, separation_instance
from oracles import fo_eval, sig_oracle
from test_logic import closed


def random_graph(rnd, n, p=0.5, colors=True):
    return ColoredRootedGraph.build(
        range(n), rand_edges(rnd, range(n), p),
        {v: {0} for v in range(n) if colors and rnd.random() < 0.3})


def test_pattern_examples():
    g = path(3)
    p = pattern(g, (0, 1, None), 2)
    assert p.positions == (0, 1, -1)
    atoms = p.atoms()
    assert "E(x1,x2)" in atoms and "DP1[(x1,x2)]" in atoms
    assert "x1=x2" not in atoms
    q = pattern(g, (0, 0), 1)
    assert "x1=x2" in q.atoms()
    # the two end points are joined by a path but not by an edge
    ends = pattern(g, (0, 2), 1).atoms()
    assert "E(x1,x2)" not in ends and "DP1[(x1,x2)]" in ends
    with pytest.raises(InputError):
        pattern(g, (7,), 1)


def test_pattern_sees_roots():
    g = from_edges([(0, 1), (1, 2)], roots={2: 4})
    atoms = pattern(g, (0,), 1).atoms()
    assert "DP1[(x1,r4)]" in atoms
    assert "R4(x1)" in pattern(g, (2,), 1).atoms()


def test_xpattern_covers_root_graphs():
    g = ColoredRootedGraph.build([0, 1], [], roots={0: 1, 1: 2})
    xs = xpattern(g, (0, 1), 1)
    assert len(xs) == 2
    assert "E(x1,x2)" not in xs[0].atoms() and "E(x1,x2)" in xs[1].atoms()


def test_sig_matches_oracle_relation():
    rnd = random.Random(21)
    graphs = []
    for _ in range(40):
        n = rnd.randint(1, 4)
        g = random_graph(rnd, n)
        R = frozenset(v for v in range(n) if rnd.random() < 0.7)
        graphs.append((g, R))
    for r in (1, 2):
        mine = [sig(g, R, r, 2) for g, R in graphs]
        ref = [sig_oracle(g, R, r, 2) for g, R in graphs]
        for i in range(len(graphs)):
            for j in range(i, len(graphs)):
                assert (mine[i] == mine[j]) == (ref[i] == ref[j]), (graphs[i], graphs[j], r)


def test_sig_isomorphism_invariant():
    rnd = random.Random(4)
    for _ in range(30):
        n = rnd.randint(1, 6)
        g = random_graph(rnd, n).with_roots({0: 1})
        R = frozenset(v for v in range(n) if rnd.random() < 0.6)
        perm = list(range(n))
        rnd.shuffle(perm)
        ids = {v: 10 + perm[v] for v in range(n)}
        assert sig(g, R, 2, 2) == sig(g.relabel(ids), {ids[v] for v in R}, 2, 2)
        assert extended_sig(g, R, 1, 1) == extended_sig(g.relabel(ids), {ids[v] for v in R}, 1, 1)


def test_sig_separates_obvious_cases():
    assert sig(path(3), {0, 1, 2}, 1, 1) == sig(complete(3), {0, 1, 2}, 1, 1)
    assert sig(path(3), {0, 1, 2}, 2, 1) != sig(complete(3), {0, 1, 2}, 2, 1)
    assert sig(path(3), set(), 2, 1) == sig(complete(3), set(), 2, 1)
    # two annotated vertices joined by a path, with the middle vertex hidden
    assert sig(path(3), {0, 2}, 2, 1) == sig(path(4), {0, 3}, 2, 1)
    assert sig(path(3), {0, 2}, 2, 1) != sig(from_edges([], 2), {0, 1}, 2, 1)
    with pytest.raises(InputError):
        sig(path(3), {5}, 1, 1)


def test_extended_sig_examples():
    g = ColoredRootedGraph.build([0, 1], [], roots={0: 1, 1: 2})
    ext = extended_sig(g, {0, 1}, 1, 1)
    assert set(ext.entries) == {(), ((1, 2),)}
    k2 = complete(2).with_roots({0: 1, 1: 2})
    plain = extended_sig(k2, {0, 1}, 1, 1)
    assert plain.entries[((1, 2),)] == ext.entries[((1, 2),)]
    assert plain != ext
    assert set(extended_sig(path(2), {0}, 1, 1).entries) == {()}


def test_joint_sig_refines_extended():
    rnd = random.Random(9)
    seen = {}
    for _ in range(40):
        n = rnd.randint(2, 4)
        g = random_graph(rnd, n).with_roots({0: 1, 1: 2})
        R = frozenset(v for v in range(n) if rnd.random() < 0.7)
        j = joint_sig(g, R, 1, 1)
        e = extended_sig(g, R, 1, 1)
        if j in seen:
            assert seen[j] == e
        seen[j] = e


def test_minimal_R_examples():
    # three twin leaves on a star: two of them already look like three
    g = from_edges([(0, 1), (0, 2), (0, 3)])
    R = minimal_R(g, {0, 1, 2, 3}, 2, 1)
    assert len(R) == 3 and 0 in R
    assert minimal_R(g, set(), 2, 1) == frozenset()
    assert minimal_R(g, R, 2, 1) == R


def test_minimal_R_properties():
    rnd = random.Random(33)
    for _ in range(25):
        n = rnd.randint(2, 5)
        g = random_graph(rnd, n).with_roots({0: 1})
        R = frozenset(v for v in range(n) if rnd.random() < 0.8)
        for joint in (False, True):
            m = minimal_R(g, R, 2, 1, joint=joint)
            assert m <= R
            key = (lambda s: joint_sig(g, s, 2, 1)) if joint else (lambda s: extended_sig(g, s, 2, 1))
            assert key(m) == key(R)
            assert all(key(m - {v}) != key(R) for v in m)


def test_project_and_glue_identity():
    g = from_edges([(0, 1), (1, 2), (2, 3)])
    a, b = {0, 1}, {1, 2, 3}
    side = g.induced(a).with_roots({1: 2})
    out, R = project_and_glue(g, (a, b), side, a, 2, 1, check=True)
    assert out.n == 4 and out.m == 3 and len(R) == 4
    assert sig(out, R, 2, 1) == sig(g, range(4), 2, 1)


def test_project_and_glue_errors():
    g = from_edges([(0, 1), (1, 2), (2, 3)])
    a, b = {0, 1}, {1, 2, 3}
    with pytest.raises(InputError):
        project_and_glue(g, (a, b), path(2), {0}, 1, 1)
    with pytest.raises(InputError):
        project_and_glue(g, (a, b), path(2).with_roots({0: 2}), {0}, 1, 1, labels={2: 2})
    with pytest.raises(InputError):
        project_and_glue(g.with_roots({0: 5}), (a, b), path(2).with_roots({0: 2}), {0}, 1, 1)
    wrong = complete(3).with_roots({0: 2})
    with pytest.raises(InputError):
        project_and_glue(g, (a, b), wrong, {0, 1, 2}, 2, 1, check=True)


def test_project_and_glue_keeps_extended_sig():
    rnd = random.Random(77)
    for _ in range(30):
        g, sep, R, rep, rep_R = separation_instance(rnd)
        out, R2 = project_and_glue(g, sep, rep, rep_R, 2, 2, R=R, check=True)
        assert extended_sig(out, R2, 2, 2) == extended_sig(g, R, 2, 2)


def test_adding_a_member_twin_is_a_no_op():
    g = from_edges([(0, 1), (0, 2), (0, 3)])
    assert sig(g, {0, 1, 2}, 2, 1) == sig(g, {0, 1, 2, 3}, 2, 1)
    assert sig(g, {0, 1}, 2, 1) != sig(g, {0, 1, 2}, 3, 1)


def test_equal_sig_means_equal_sentences():
    rnd = random.Random(55)
    groups = {}
    for _ in range(150):
        n = rnd.randint(1, 4)
        g = random_graph(rnd, n)
        R = frozenset(v for v in range(n) if rnd.random() < 0.7)
        groups.setdefault(sig(g, R, 2, 2), []).append((g, R))
    pairs = [grp[:2] for grp in groups.values() if len(grp) >= 2]
    assert len(pairs) >= 5
    for _ in range(40):
        f = closed(rnd, 2, bound=(), k_max=2, n_colors=1, pool=("x", "y"))
        for (g1, R1), (g2, R2) in pairs:
            assert fo_eval(g1, f, domain=R1) == fo_eval(g2, f, domain=R2)
