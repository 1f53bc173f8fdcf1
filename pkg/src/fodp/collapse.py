"""Evaluating DP_k without path search on unbreakable graphs with a big clique minor.

Terminals close to each other form clusters. Each cluster C_i gets a
minimum-weight separator S_i (terminals weigh k, other vertices 1) cutting it
off from some branch set; the near side is the enclosure D_i. Inside the
enclosures short paths either join a pair directly or carry each terminal to
its own attachment vertex on S. The far side is assumed to link attachment
vertices arbitrarily (its folio rooted at S is rooted-generic under the
hypotheses), so only the bounded part is searched.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product

from .errors import InputError, ResourceError
from .graph import INF, ColoredRootedGraph, bfs_distances, bounded_paths, components, is_unbreakable, weight_of
from .logic import (And, Color, Const, Edge, Eq, Exists, Forall, Formula, Not, Or, conj, disj,
                    free_vars, to_text)
from .minors import find_clique_minor, is_clique_minor_model
from .paths import dp_query, normalize_pairs

MAX_SEPARATOR_SUBSETS = 200_000


class HypothesisError(InputError):
    """The graph does not meet the unbreakability / clique-minor hypotheses."""


@dataclass(frozen=True)
class CollapseParams:
    k: int
    L: int
    p: int
    t: int

    def __post_init__(self):
        if min(self.k, self.L, self.p, self.t) < 0 or self.k < 1:
            raise InputError("collapse parameters must be non-negative with k >= 1")

    @staticmethod
    def nominal_p(k: int) -> int:
        return 4 * k ** 3

    @staticmethod
    def nominal_t(k: int, L: int) -> int:
        return max(6 * k ** 3, 2 * k * L)

    @classmethod
    def instantiate(cls, k: int, L: int) -> "CollapseParams":
        """Nominal p and t for k and L; L stands in for q(p)."""
        return cls(k, L, cls.nominal_p(k), cls.nominal_t(k, L))


@dataclass
class ClusterPartition:
    clusters: list  # frozensets of terminal vertices
    separators: list  # S_i
    enclosures: list  # D_i

    def invariant_violations(self, params: CollapseParams, w) -> list[str]:
        out = []
        for i, (c, s, d) in enumerate(zip(self.clusters, self.separators, self.enclosures)):
            if not (c | s) <= d:
                out.append(f"cluster {i}: C ∪ S not inside D")
            if len(d) > params.L:
                out.append(f"cluster {i}: |D| = {len(d)} > L = {params.L}")
            if weight_of(w, s) > weight_of(w, c):
                out.append(f"cluster {i}: w(S) = {weight_of(w, s)} > w(C) = {weight_of(w, c)}")
        union = set().union(*self.separators) if self.separators else set()
        if len(union) > params.p:
            out.append(f"|S| = {len(union)} > p = {params.p}")
        return out


@dataclass
class CollapseResult:
    verdict: bool
    partition: ClusterPartition
    hypotheses: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    witness: list | None = None


# ---------------------------------------------------------------- clusters and weights

def terminal_support(pairs) -> list:
    return sorted({v for pr in pairs for v in pr})


def cluster_partition(g: ColoredRootedGraph, terminals, L: int) -> list[frozenset]:
    """Classes of the transitive closure of dist(u, v) <= L on the terminal set."""
    terms = sorted(set(terminals))
    g.check_vertices(terms)
    dist = {u: bfs_distances(g, u) for u in terms}
    parent = {u: u for u in terms}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for u, v in combinations(terms, 2):
        if dist[u].get(v, INF) <= L:
            parent[find(u)] = find(v)
    groups: dict = {}
    for u in terms:
        groups.setdefault(find(u), set()).add(u)
    return sorted((frozenset(c) for c in groups.values()), key=min)


def terminal_weight(g: ColoredRootedGraph, terminals, k: int) -> dict[int, int]:
    terms = set(terminals)
    return {v: (k if v in terms else 1) for v in g.vertices}


# ---------------------------------------------------------------- separators

def enclosure(g: ColoredRootedGraph, cluster, sep) -> frozenset:
    """Smallest near side: the separator plus the components of g - sep meeting the cluster."""
    sep = set(sep)
    near = set(sep)
    for comp in components(g, [v for v in g.vertices if v not in sep]):
        if comp & set(cluster):
            near |= comp
    return frozenset(near)


def min_weight_separator(g: ColoredRootedGraph, cluster, w, branch_sets):
    """(S, D) of minimum w(S) such that D ⊇ cluster is the near side and some
    branch set lies outside D; ties go to the lexicographically least S.

    Returns None when no branch set can be cut off.
    """
    cluster = frozenset(cluster)
    sets = [frozenset(b) for b in branch_sets]
    bound = weight_of(w, cluster)
    vs = sorted(g.vertices)
    best = None
    budget = MAX_SEPARATOR_SUBSETS
    for size in range(0, min(bound, len(vs)) + 1):
        for sep in combinations(vs, size):
            budget -= 1
            if budget < 0:
                raise ResourceError("min_weight_separator: candidate cap exceeded")
            ws = weight_of(w, sep)
            if ws > bound or (best is not None and ws > best[0]):
                continue
            d = enclosure(g, cluster, sep)
            if not any(not (b & d) for b in sets):
                continue
            cand = (ws, sep)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    return frozenset(best[1]), enclosure(g, cluster, best[1])


# ---------------------------------------------------------------- hypotheses

def check_hypotheses(g: ColoredRootedGraph, params: CollapseParams, branch_sets=None) -> dict:
    """(L, p)-unbreakability of g and a K_t minor model (found if not given)."""
    out = {"unbreakable": is_unbreakable(g, g.vertices, params.L, params.p)}
    if branch_sets is None:
        branch_sets = find_clique_minor(g, params.t)
        out["clique_minor"] = branch_sets is not None
    else:
        out["clique_minor"] = len(branch_sets) >= params.t and is_clique_minor_model(g, branch_sets)
    out["branch_sets"] = [sorted(b) for b in branch_sets] if branch_sets else None
    return out


# ---------------------------------------------------------------- evaluation

def _solve_bounded(g, pairs, part: ClusterPartition, w, L):
    """Search the bounded part: internal paths or half-paths to attachment vertices."""
    where = {}
    for i, c in enumerate(part.clusters):
        for v in c:
            where[v] = i
    terms = set(where)
    subgraphs = [g.induced(d) for d in part.enclosures]
    interior: set = set()
    attach_deg: dict = {}
    chosen: list = []

    def free_path(p):
        return all(v not in interior and v not in terms and v not in attach_deg for v in p[1:-1])

    def mark(p, on):
        for v in p[1:-1]:
            (interior.add if on else interior.discard)(v)

    def halves(x):
        i = where[x]
        h = subgraphs[i]
        for s in sorted(part.separators[i]):
            # a path leaving through another terminal would pass through it
            if s in interior or (s in terms and s != x):
                continue
            for p in bounded_paths(h, x, s, L, avoid=terms | interior | set(attach_deg)):
                if free_path(p):
                    yield p

    def rec(j):
        if j == len(pairs):
            return True
        x, y = pairs[j]
        if x == y:
            chosen.append(("trivial", (x,)))
            if rec(j + 1):
                return True
            chosen.pop()
            return False
        if where[x] == where[y]:
            h = subgraphs[where[x]]
            for p in bounded_paths(h, x, y, L, avoid=terms | interior | set(attach_deg)):
                if not free_path(p):
                    continue
                mark(p, True)
                chosen.append(("internal", p))
                if rec(j + 1):
                    return True
                chosen.pop()
                mark(p, False)
        for px in halves(x):
            sx = px[-1]
            if attach_deg.get(sx, 0) >= w[sx]:
                continue
            mark(px, True)
            attach_deg[sx] = attach_deg.get(sx, 0) + 1
            for py in halves(y):
                sy = py[-1]
                if sy == sx or attach_deg.get(sy, 0) >= w[sy]:
                    continue
                if not free_path(py) or set(py[1:-1]) & set(px[1:-1]):
                    continue
                mark(py, True)
                attach_deg[sy] = attach_deg.get(sy, 0) + 1
                chosen.append(("external", px, py))
                if rec(j + 1):
                    return True
                chosen.pop()
                attach_deg[sy] -= 1
                if not attach_deg[sy]:
                    del attach_deg[sy]
                mark(py, False)
            attach_deg[sx] -= 1
            if not attach_deg[sx]:
                del attach_deg[sx]
            mark(px, False)
        return False

    ok = rec(0)
    return ok, (list(chosen) if ok else None)


def collapse_eval(g: ColoredRootedGraph, pairs, params: CollapseParams, branch_sets=None,
                  check: bool = True) -> CollapseResult:
    pairs = [tuple(p) for p in pairs]
    if len(pairs) != params.k:
        raise InputError(f"expected {params.k} pairs, got {len(pairs)}")
    terms = terminal_support(pairs)
    g.check_vertices(terms)
    hyp = {}
    if check or branch_sets is None:
        hyp = check_hypotheses(g, params, branch_sets)
        if branch_sets is None and hyp["branch_sets"] is not None:
            branch_sets = hyp["branch_sets"]
    if check and not (hyp["unbreakable"] and hyp["clique_minor"]):
        raise HypothesisError(f"hypotheses fail: unbreakable={hyp['unbreakable']} "
                              f"clique_minor={hyp['clique_minor']}")
    if not branch_sets:
        raise HypothesisError("no clique minor model available")
    w = terminal_weight(g, terms, params.k)
    clusters = cluster_partition(g, terms, params.L)
    seps, encl = [], []
    for c in clusters:
        found = min_weight_separator(g, c, w, branch_sets)
        if found is None:
            raise HypothesisError(f"cluster {sorted(c)}: no branch set can be separated from it")
        seps.append(found[0])
        encl.append(found[1])
    part = ClusterPartition(clusters, seps, encl)
    ok, witness = _solve_bounded(g, pairs, part, w, params.L)
    return CollapseResult(ok, part, hyp, part.invariant_violations(params, w), witness)


def eval_dp_via_collapse(g: ColoredRootedGraph, pairs, params: CollapseParams, branch_sets=None,
                         check: bool = True) -> bool:
    return collapse_eval(g, pairs, params, branch_sets, check).verdict


def dp_reference(g, pairs) -> bool:
    return dp_query(g, normalize_pairs(pairs))


# ---------------------------------------------------------------- the first-order formula

MAX_EMIT_K = 1
MAX_EMIT_L = 2


class _Names:
    def __init__(self):
        self.i = 0

    def __call__(self, base):
        self.i += 1
        return f"{base}{self.i}"


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _dist_le(a, b, L, fresh) -> Formula:
    """dist(a, b) <= L as a first-order formula."""
    alts = [Eq(a, b)]
    for length in range(1, L + 1):
        mids = [fresh("w") for _ in range(length - 1)]
        chain = [a] + mids + [b]
        body = conj(Edge(u, v) for u, v in zip(chain, chain[1:]))
        f = body
        for m in reversed(mids):
            f = Exists(m, f)
        alts.append(f)
    return disj(alts)


def _member(z, names) -> Formula:
    return disj(Eq(z, n) for n in names) if names else Const(False)


def _weight_is(names, terms, k, value) -> Formula:
    """The named (pairwise distinct) vertices weigh exactly `value`."""
    alts = []
    for mask in range(1 << len(names)):
        heavy = [n for i, n in enumerate(names) if mask >> i & 1]
        if k * len(heavy) + len(names) - len(heavy) != value:
            continue
        parts = []
        for n in names:
            is_term = disj(Eq(n, t) for t in terms)
            parts.append(is_term if n in heavy else Not(is_term))
        alts.append(conj(parts))
    return disj(alts) if alts else Const(False)


def _distinct(names) -> list:
    return [Not(Eq(a, b)) for a, b in combinations(names, 2)]


def _reaches(start, x_names, cluster_vars) -> Formula:
    """`start` is joined to a cluster vertex by a path through X."""
    others = [n for n in x_names if n != start]
    alts = []
    for size in range(len(others) + 1):
        for seq in permutations(others, size):
            chain = [start] + list(seq)
            steps = conj(Edge(a, b) for a, b in zip(chain, chain[1:]))
            alts.append(And(steps, _member(chain[-1], list(cluster_vars))))
    return disj(alts)


def _separation(cluster_vars, s_names, x_names, t_colors, fresh, minimal=False) -> Formula:
    """D = S ∪ X holds the cluster, no edge leaves X except into D, and some
    branch set (colour) avoids D. With `minimal`, X is exactly the part of
    G - S reachable from the cluster."""
    d_names = s_names + x_names
    parts = _distinct(d_names)
    parts += [_member(c, d_names) for c in cluster_vars]
    if minimal:
        parts += [_reaches(xn, x_names, cluster_vars) for xn in x_names]
    z = fresh("z")
    for xn in x_names:
        parts.append(Forall(z, Or(_member(z, d_names), Not(Edge(xn, z)))))
    avoid = []
    for c in range(t_colors):
        z2 = fresh("z")
        avoid.append(And(Exists(z2, Color(c, z2)),
                         Forall(z2, Or(Not(Color(c, z2)), Not(_member(z2, d_names))))))
    parts.append(disj(avoid))
    return conj(parts)


def _conjuncts(f):
    if isinstance(f, And):
        return _conjuncts(f.a) + _conjuncts(f.b)
    return [f]


def _exists_all(names, f):
    """∃names f, with each conjunct of f placed right after the last name it
    uses, so evaluation prunes as early as possible. This only uses
    ∃x (A ∧ B) ≡ A ∧ ∃x B for x not free in A."""
    if not names:
        return f
    pos = {n: i for i, n in enumerate(names)}
    levels = [[] for _ in range(len(names) + 1)]
    for c in _conjuncts(f):
        used = [pos[v] for v in free_vars(c) if v in pos]
        levels[max(used) + 1 if used else 0].append(c)
    out = None
    for i in range(len(names), 0, -1):
        here = sorted(levels[i], key=lambda c: len(to_text(c)))
        if out is not None:
            here.append(out)
        out = Exists(names[i - 1], conj(here) if here else Const(True))
    outer = sorted(levels[0], key=lambda c: len(to_text(c)))
    return conj(outer + [out])


def emit_collapse_formula(params: CollapseParams, cluster_shape=None, d_max: int | None = None) -> Formula:
    """A DP-free formula in x1, y1, ..., xk, yk equivalent to the collapse evaluation.

    Branch sets of the clique minor are read from colours 0..t-1. The formula
    guesses the cluster partition of the terminal positions, then per cluster a
    separator of least weight with its enclosure, then short internal paths or
    half-paths to attachment vertices. Enclosures are named explicitly, so
    their size is capped by `d_max` (default L + 1); the formula matches the
    evaluation whenever the chosen enclosures fit.
    `cluster_shape`, a list of blocks of positions, restricts the guess to one
    partition.
    """
    k, L = params.k, params.L
    d_max = L + 1 if d_max is None else d_max
    if k > MAX_EMIT_K or L > MAX_EMIT_L:
        raise ResourceError(f"formula emission capped at k <= {MAX_EMIT_K}, L <= {MAX_EMIT_L}")
    fresh = _Names()
    terms = [v for i in range(1, k + 1) for v in (f"x{i}", f"y{i}")]
    pairs = [(f"x{i}", f"y{i}") for i in range(1, k + 1)]
    shapes = [cluster_shape] if cluster_shape is not None else list(_set_partitions(terms))
    alts = []
    for blocks in shapes:
        blocks = [list(b) for b in blocks]
        block_of = {v: i for i, b in enumerate(blocks) for v in b}
        # cluster relation: connected inside a block under dist <= L, far apart across blocks
        cl = []
        for i, b in enumerate(blocks):
            if len(b) > 1:
                cl.append(_block_connected(b, L, fresh))
            for b2 in blocks[i + 1:]:
                cl += [Not(_dist_le(u, v, L, fresh)) for u in b for v in b2]
        # per block: separators and enclosures, with minimal weight
        per_block = [_block_choices(b, terms, k, L, d_max, params.t, fresh) for b in blocks]
        for choice in product(*per_block):
            names, body = [], list(cl)
            for s_names, x_names, f in choice:
                names += s_names + x_names
                body.append(f)
            body.append(_linkage(pairs, blocks, block_of, choice, terms, k, L, fresh))
            alts.append(_exists_all(names, conj(body)))
    return disj(alts)


def _block_connected(block, L, fresh) -> Formula:
    n = len(block)
    alts = []
    # spanning trees on a tiny vertex set
    edges = list(combinations(range(n), 2))
    for es in combinations(edges, n - 1):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        ok = True
        for a, b in es:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            alts.append(conj(_dist_le(block[a], block[b], L, fresh) for a, b in es))
    return disj(alts)


def _block_choices(block, terms, k, L, d_max, t, fresh):
    """Alternatives (S names, extra names, formula) for one cluster."""
    bound = k * len(set(block))  # w(C) with distinct terminals; duplicates only lower it
    out = []
    for m in range(0, bound + 1):
        for extra in range(0, d_max + 1):
            if m + extra > d_max or m + extra == 0:
                continue
            s_names = [fresh("s") for _ in range(m)]
            x_names = [fresh("d") for _ in range(extra)]
            for value in range(m, k * m + 1):
                here = And(_weight_is(s_names, terms, k, value) if s_names else Const(True),
                           _separation(block, s_names, x_names, t, fresh, minimal=True))
                # nothing lighter works
                lighter = []
                for m2 in range(0, value):
                    for e2 in range(0, d_max + 1):
                        if m2 + e2 > d_max or m2 + e2 == 0:
                            continue
                        s2 = [fresh("s") for _ in range(m2)]
                        x2 = [fresh("d") for _ in range(e2)]
                        wt = disj(_weight_is(s2, terms, k, v2) for v2 in range(m2, min(k * m2, value - 1) + 1)) \
                            if s2 else Const(True)
                        lighter.append(_exists_all(s2 + x2, And(wt, _separation(block, s2, x2, t, fresh))))
                f = And(here, Not(disj(lighter))) if lighter else here
                out.append((s_names, x_names, f))
    return out


def _path_formula(a, b, inside, avoid, L, fresh):
    """Alternatives (interior names, formula) for an a-b path of length <= L inside
    the named set whose interior avoids the named `avoid` vertices."""
    out = []
    for length in range(0, L + 1):
        mids = [fresh("u") for _ in range(max(length - 1, 0))]
        if length == 0:
            out.append(([], Eq(a, b)))
            continue
        chain = [a] + mids + [b]
        parts = [Edge(u, v) for u, v in zip(chain, chain[1:])]
        parts += _distinct(chain)
        parts += [_member(m, inside) for m in mids]
        parts += [Not(Eq(m, x)) for m in mids for x in avoid]
        out.append((mids, conj(parts)))
    return out


def _linkage(pairs, blocks, block_of, choice, terms, k, L, fresh) -> Formula:
    """k = 1 only: the single pair is trivial, internal, or leaves through S."""
    (x, y), = pairs
    bx, by = block_of[x], block_of[y]
    sx_names, xx_names, _ = choice[bx]
    sy_names, xy_names, _ = choice[by]
    alts = [Eq(x, y)]
    if bx == by:
        for mids, f in _path_formula(x, y, sx_names + xx_names, terms, L, fresh):
            alts.append(_exists_all(mids, f))
    for sa in sx_names:
        for sb in sy_names:
            if sa == sb:
                continue
            # an attachment on a terminal must be that terminal itself
            own = [Or(Eq(sa, x), conj(Not(Eq(sa, t)) for t in terms)),
                   Or(Eq(sb, y), conj(Not(Eq(sb, t)) for t in terms))]
            for m1, f1 in _path_formula(x, sa, sx_names + xx_names, terms, L, fresh):
                for m2, f2 in _path_formula(y, sb, sy_names + xy_names, terms, L, fresh):
                    cross = [Not(Eq(a, b)) for a in m1 for b in m2]
                    cross += [Not(Eq(a, sb)) for a in m1] + [Not(Eq(b, sa)) for b in m2]
                    alts.append(_exists_all(m1 + m2, conj([f1, f2, Not(Eq(sa, sb))] + own + cross)))
    return disj(alts)
