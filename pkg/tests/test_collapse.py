import random
from itertools import product

import pytest

from fodp.collapse import (CollapseParams, HypothesisError, check_hypotheses, cluster_partition,
                           collapse_eval, emit_collapse_formula, enclosure, min_weight_separator,
                           terminal_weight)
from fodp.errors import InputError, ResourceError
from fodp.graph import complete, from_edges, path
from fodp.logic import evaluate, has_dp
from fodp.minors import find_clique_minor
from fodp.paths import dp_query, normalize_pairs

from conftest import all_graphs
from instances import collapse_instance


def test_cluster_partition_chain():
    g = path(7)
    assert cluster_partition(g, [0, 2, 4, 6], 2) == [frozenset({0, 2, 4, 6})]
    assert cluster_partition(g, [0, 2, 5], 2) == [frozenset({0, 2}), frozenset({5})]
    assert cluster_partition(g, [0, 6], 1) == [frozenset({0}), frozenset({6})]
    two = from_edges([(0, 1)], 4)
    assert cluster_partition(two, [0, 3], 5) == [frozenset({0}), frozenset({3})]


def test_terminal_weight():
    w = terminal_weight(path(4), [1, 2], 3)
    assert w == {0: 1, 1: 3, 2: 3, 3: 1}


def test_separator_on_pendant_vertex():
    # K5 with a pendant vertex 5 hanging off 0
    g = from_edges(list(complete(5).edges) + [(0, 5)])
    w = terminal_weight(g, [5], 2)
    bs = [[i] for i in range(5)]
    s, d = min_weight_separator(g, {5}, w, bs)
    assert s == frozenset({0}) and d == frozenset({0, 5})
    assert enclosure(g, {5}, {0}) == d


def test_separator_prefers_cheapest_then_least():
    g = complete(4)
    w = terminal_weight(g, [0], 1)
    s, d = min_weight_separator(g, {0}, w, [[1], [2], [3]])
    # removing the terminal itself has weight 1 and cuts everything else off
    assert s == frozenset({0}) and d == frozenset({0})


def test_separator_infeasible():
    g = complete(3)
    w = terminal_weight(g, [0], 1)
    assert min_weight_separator(g, {0}, w, [[0, 1, 2]]) is None


def test_params_and_errors():
    assert CollapseParams.instantiate(2, 3) == CollapseParams(2, 3, 32, 48)
    with pytest.raises(InputError):
        CollapseParams(0, 1, 1, 1)
    g, bs = collapse_instance(random.Random(1))
    par = CollapseParams(2, 4, 4, 6)
    with pytest.raises(InputError):
        collapse_eval(g, [(0, 1)], par, bs)
    with pytest.raises(HypothesisError):
        collapse_eval(path(6), [(0, 5)], CollapseParams(1, 1, 1, 3))


def test_eval_examples():
    g = complete(6)
    par = CollapseParams(2, 2, 2, 6)
    bs = [[i] for i in range(6)]
    assert collapse_eval(g, [(0, 1), (2, 3)], par, bs).verdict
    # paths only need to be internally disjoint, so a shared terminal is fine
    assert collapse_eval(g, [(0, 1), (0, 2)], par, bs).verdict
    assert collapse_eval(g, [(0, 0), (1, 2)], par, bs).verdict
    res = collapse_eval(g, [(0, 1), (2, 3)], par, bs)
    assert res.hypotheses["unbreakable"] and res.hypotheses["clique_minor"]
    assert res.witness is not None
    # two pendant vertices that both hang off 0 cannot both be routed
    h = from_edges(list(complete(6).edges) + [(0, 6), (0, 7)])
    par = CollapseParams(2, 3, 1, 6)
    assert not collapse_eval(h, [(6, 1), (7, 2)], par, bs).verdict
    assert collapse_eval(h, [(6, 1), (3, 2)], par, bs).verdict


def test_hypotheses_found_without_model():
    h = check_hypotheses(complete(5), CollapseParams(1, 2, 1, 4))
    assert h["clique_minor"] and len(h["branch_sets"]) == 4
    assert not check_hypotheses(path(5), CollapseParams(1, 2, 1, 3))["clique_minor"]


@pytest.mark.parametrize("L,p,mindeg", [(4, 4, 5), (4, 3, 2), (3, 2, 1), (2, 1, 1)])
def test_agrees_with_path_search(L, p, mindeg):
    rnd = random.Random(L * 10 + p)
    par = CollapseParams(2, L, p, 6)
    done = 0
    while done < 12:
        g, bs = collapse_instance(rnd, mindeg=mindeg)
        if not check_hypotheses(g, par, bs)["unbreakable"]:
            continue
        done += 1
        for _ in range(6):
            pairs = [tuple(rnd.sample(range(g.n), 2)) for _ in range(2)]
            res = collapse_eval(g, pairs, par, bs)
            assert res.verdict == dp_query(g, normalize_pairs(pairs)), (g.edges, pairs)


def test_conditional_invariants():
    rnd = random.Random(19)
    k = 2
    for L, p, mindeg in [(4, 4, 5), (4, 3, 2), (3, 2, 1)]:
        par = CollapseParams(k, L, p, 6)
        seen = 0
        while seen < 10:
            g, bs = collapse_instance(rnd, mindeg=mindeg)
            if not check_hypotheses(g, par, bs)["unbreakable"]:
                continue
            seen += 1
            pairs = [tuple(rnd.sample(range(g.n), 2)) for _ in range(k)]
            part = collapse_eval(g, pairs, par, bs).partition
            union = set().union(*part.separators)
            assert len(union) <= 2 * k * k
            for c, s, d in zip(part.clusters, part.separators, part.enclosures):
                assert c | s <= d
                if len(s) <= p:
                    assert len(d) <= L


def test_emitted_formula_is_dp_free_and_capped():
    f = emit_collapse_formula(CollapseParams(1, 1, 1, 3))
    assert not has_dp(f)
    with pytest.raises(ResourceError):
        emit_collapse_formula(CollapseParams(2, 1, 1, 3))
    with pytest.raises(ResourceError):
        emit_collapse_formula(CollapseParams(1, 3, 1, 3))


def test_emitted_formula_matches_on_small_graphs():
    par = CollapseParams(1, 1, 1, 3)
    f = emit_collapse_formula(par)
    checked = 0
    for n in range(1, 5):
        for g in all_graphs(n):
            bs = find_clique_minor(g, 3)
            if bs is None or not check_hypotheses(g, par, bs)["unbreakable"]:
                continue
            gc = g.with_colors({v: {i for i, b in enumerate(bs) if v in b} for v in g.vertices})
            for x, y in product(g.vertices, repeat=2):
                want = collapse_eval(g, [(x, y)], par, bs).verdict
                assert evaluate(gc, f, {"x1": x, "y1": y}) == want, (g.edges, x, y)
                checked += 1
    assert checked > 50
