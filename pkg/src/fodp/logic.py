"""FO+DP formulas: syntax tree, parser, printer and brute-force semantics.

Grammar (whitespace-insensitive)::

    formula := quant | impl
    quant   := ('EX' | 'ALL') var '.' formula
    impl    := disj ['->' formula]
    disj    := conj {'|' conj}
    conj    := unary {'&' unary}
    unary   := '~' unary | primary
    primary := '(' formula ')' | quant | 'TRUE' | 'FALSE' | atom
    atom    := var '=' var | 'E(' var ',' var ')' | 'C<i>(' var ')'
             | 'R<l>(' var ')' | 'DP<k>[' '(' var ',' var ')' {',' ...} ']'
             | NAME '(' var {',' var} ')'

`a -> b` is sugar for `~a | b`. Names like P(x) parse but have no meaning on
a graph; evaluating them is an error. The bottom value is None: every atom
that mentions it is false except None = None.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InputError, ParseError
from .graph import ColoredRootedGraph
from .paths import dp_query

BOTTOM = None


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Eq(Formula):
    a: str
    b: str


@dataclass(frozen=True)
class Edge(Formula):
    a: str
    b: str


@dataclass(frozen=True)
class Color(Formula):
    index: int
    x: str


@dataclass(frozen=True)
class RootLabel(Formula):
    label: int
    x: str


@dataclass(frozen=True)
class DP(Formula):
    pairs: tuple  # ((x1, y1), ..., (xk, yk))

    @property
    def k(self):
        return len(self.pairs)


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: tuple


@dataclass(frozen=True)
class Not(Formula):
    f: Formula


@dataclass(frozen=True)
class And(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class Or(Formula):
    a: Formula
    b: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    f: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    f: Formula


ATOMS = (Const, Eq, Edge, Color, RootLabel, DP, Pred)
QUANTIFIERS = (Exists, Forall)


def conj(fs: Iterable[Formula]) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else And(out, f)
    return Const(True) if out is None else out


def disj(fs: Iterable[Formula]) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else Or(out, f)
    return Const(False) if out is None else out


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def exists(vs: Iterable[str], f: Formula) -> Formula:
    for v in reversed(list(vs)):
        f = Exists(v, f)
    return f


def forall(vs: Iterable[str], f: Formula) -> Formula:
    for v in reversed(list(vs)):
        f = Forall(v, f)
    return f


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_']*)|(\S))")


def _tokenize(text):
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace is left
            break
        start = m.start(m.lastindex)
        line += text.count("\n", pos, start)
        if "\n" in text[pos:start]:
            line_start = text.rfind("\n", 0, start) + 1
        toks.append((m.group(m.lastindex), line, start - line_start + 1))
        pos = m.end()
    toks.append(("<end>", line, pos - line_start + 1))
    return toks


_KEYWORDS = {"EX", "ALL", "TRUE", "FALSE"}
_INDEXED = re.compile(r"(C|R|DP)(\d+)$")


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def fail(self, msg):
        _, line, col = self.toks[self.i]
        raise ParseError(msg, line, col)

    def take(self, want=None):
        tok = self.toks[self.i][0]
        if want is not None and tok != want:
            self.fail(f"expected {want!r}, found {tok!r}")
        self.i += 1
        return tok

    def var(self):
        tok = self.peek()
        if not re.match(r"[A-Za-z_]", tok) or tok in _KEYWORDS or tok == "<end>":
            self.fail(f"expected a variable, found {tok!r}")
        return self.take()

    def formula(self):
        if self.peek() in ("EX", "ALL"):
            return self.quant()
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return implies(left, self.formula())
        return left

    def quant(self):
        q = self.take()
        v = self.var()
        self.take(".")
        body = self.formula()
        return Exists(v, body) if q == "EX" else Forall(v, body)

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.peek() == "~":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok in ("EX", "ALL"):
            return self.quant()
        if tok in ("TRUE", "FALSE"):
            self.take()
            return Const(tok == "TRUE")
        return self.atom()

    def arglist(self, close):
        args = [self.var()]
        while self.peek() == ",":
            self.take()
            args.append(self.var())
        self.take(close)
        return args

    def atom(self):
        name = self.var()
        nxt = self.peek()
        if nxt == "=":
            self.take()
            return Eq(name, self.var())
        m = _INDEXED.match(name)
        if m and m.group(1) == "DP":
            return self.dp_atom(int(m.group(2)))
        if nxt != "(":
            self.fail(f"expected '=' or '(' after {name!r}")
        self.take("(")
        args = self.arglist(")")
        if name == "E":
            if len(args) != 2:
                self.fail(f"E takes 2 arguments, got {len(args)}")
            return Edge(*args)
        if m:
            if len(args) != 1:
                self.fail(f"{name} takes 1 argument, got {len(args)}")
            idx = int(m.group(2))
            if m.group(1) == "R" and idx < 1:
                self.fail("root labels are positive")
            return Color(idx, args[0]) if m.group(1) == "C" else RootLabel(idx, args[0])
        return Pred(name, tuple(args))

    def dp_atom(self, k):
        self.take("[")
        pairs = []
        while True:
            self.take("(")
            args = self.arglist(")")
            if len(args) != 2:
                self.fail(f"DP arity error: terminal group {tuple(args)} is not a pair")
            pairs.append(tuple(args))
            if self.peek() != ",":
                break
            self.take()
        self.take("]")
        if len(pairs) != k or k < 1:
            self.fail(f"DP arity error: DP{k} given {len(pairs)} pairs")
        return DP(tuple(pairs))


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "<end>":
        p.fail(f"unexpected {p.peek()!r}")
    return f


# ---------------------------------------------------------------- printing

def to_text(f: Formula) -> str:
    if isinstance(f, Const):
        return "TRUE" if f.value else "FALSE"
    if isinstance(f, Eq):
        return f"{f.a}={f.b}"
    if isinstance(f, Edge):
        return f"E({f.a},{f.b})"
    if isinstance(f, Color):
        return f"C{f.index}({f.x})"
    if isinstance(f, RootLabel):
        return f"R{f.label}({f.x})"
    if isinstance(f, DP):
        return f"DP{f.k}[" + ",".join(f"({a},{b})" for a, b in f.pairs) + "]"
    if isinstance(f, Pred):
        return f"{f.name}(" + ",".join(f.args) + ")"
    if isinstance(f, Not):
        return "~" + _operand(f.f)
    if isinstance(f, And):
        return f"({_operand(f.a)} & {_operand(f.b)})"
    if isinstance(f, Or):
        return f"({_operand(f.a)} | {_operand(f.b)})"
    if isinstance(f, Exists):
        return f"EX {f.var}. {to_text(f.f)}"
    if isinstance(f, Forall):
        return f"ALL {f.var}. {to_text(f.f)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f):
    # a quantifier body extends to the right, so it needs brackets inside an operator
    g = f
    while isinstance(g, Not):
        g = g.f
    s = to_text(f)
    return f"({s})" if isinstance(g, QUANTIFIERS) else s


# ---------------------------------------------------------------- syntax queries

def atom_vars(f) -> tuple:
    if isinstance(f, (Eq, Edge)):
        return (f.a, f.b)
    if isinstance(f, (Color, RootLabel)):
        return (f.x,)
    if isinstance(f, DP):
        return tuple(v for p in f.pairs for v in p)
    if isinstance(f, Pred):
        return f.args
    return ()


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, ATOMS):
        return frozenset(atom_vars(f))
    if isinstance(f, Not):
        return free_vars(f.f)
    if isinstance(f, (And, Or)):
        return free_vars(f.a) | free_vars(f.b)
    return free_vars(f.f) - {f.var}


def all_vars(f: Formula) -> set:
    if isinstance(f, ATOMS):
        return set(atom_vars(f))
    if isinstance(f, Not):
        return all_vars(f.f)
    if isinstance(f, (And, Or)):
        return all_vars(f.a) | all_vars(f.b)
    return all_vars(f.f) | {f.var}


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.f)
    if isinstance(f, (And, Or)):
        return max(quantifier_rank(f.a), quantifier_rank(f.b))
    return 1 + quantifier_rank(f.f)


def max_dp_arity(f: Formula) -> int:
    if isinstance(f, DP):
        return f.k
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return max_dp_arity(f.f)
    if isinstance(f, (And, Or)):
        return max(max_dp_arity(f.a), max_dp_arity(f.b))
    return max_dp_arity(f.f)


def is_prenex(f: Formula) -> bool:
    while isinstance(f, QUANTIFIERS):
        f = f.f
    return quantifier_rank(f) == 0


def has_dp(f: Formula) -> bool:
    return max_dp_arity(f) > 0


def substitute(f: Formula, ren: Mapping[str, str]) -> Formula:
    """Rename free occurrences of variables."""
    r = lambda v: ren.get(v, v)
    if isinstance(f, Const):
        return f
    if isinstance(f, Eq):
        return Eq(r(f.a), r(f.b))
    if isinstance(f, Edge):
        return Edge(r(f.a), r(f.b))
    if isinstance(f, Color):
        return Color(f.index, r(f.x))
    if isinstance(f, RootLabel):
        return RootLabel(f.label, r(f.x))
    if isinstance(f, DP):
        return DP(tuple((r(a), r(b)) for a, b in f.pairs))
    if isinstance(f, Pred):
        return Pred(f.name, tuple(map(r, f.args)))
    if isinstance(f, Not):
        return Not(substitute(f.f, ren))
    if isinstance(f, (And, Or)):
        return type(f)(substitute(f.a, ren), substitute(f.b, ren))
    inner = {k: v for k, v in ren.items() if k != f.var}
    return type(f)(f.var, substitute(f.f, inner))


def prenexify(f: Formula) -> Formula:
    """Equivalent prenex form (on nonempty domains).

    Negations are pushed only through quantifiers, so a quantifier-free
    formula comes back unchanged. Bound variables are renamed only when
    pulling them out would capture something.
    """
    taken = set(all_vars(f))

    def fresh(v):
        i = 1
        while f"{v}_{i}" in taken:
            i += 1
        name = f"{v}_{i}"
        taken.add(name)
        return name

    def rec(g):
        # returns (prefix [(kind, var)], matrix)
        if isinstance(g, ATOMS):
            return [], g
        if isinstance(g, Not):
            pre, m = rec(g.f)
            flip = {Exists: Forall, Forall: Exists}
            return [(flip[q], v) for q, v in pre], Not(m)
        if isinstance(g, QUANTIFIERS):
            pre, m = rec(g.f)
            var = g.var
            if any(v == var for _, v in pre):
                var = fresh(var)  # shadowed by an inner binder, so it binds nothing
            return [(type(g), var)] + pre, m
        pa, ma = rec(g.a)
        pb, mb = rec(g.b)
        # bound variables of one side must not occur free on the other, and the
        # two prefixes must use distinct names
        fa, fb = free_vars(g.a), free_vars(g.b)
        used_a = {v for _, v in pa}
        new_pb = []
        for q, v in pb:
            if v in fa or v in used_a:
                w = fresh(v)
                mb = substitute(mb, {v: w})
                # later prefix entries of the same name would shadow; rename them too
                v = w
            new_pb.append((q, v))
        new_pa = []
        names_b = {v for _, v in new_pb}
        for q, v in pa:
            if v in fb or v in names_b:
                w = fresh(v)
                ma = substitute(ma, {v: w})
                v = w
            new_pa.append((q, v))
        return new_pa + new_pb, type(g)(ma, mb)

    pre, m = rec(f)
    for q, v in reversed(pre):
        m = q(v, m)
    return m


# ---------------------------------------------------------------- semantics

def compile_formula(f: Formula):
    """Compile f into fn(g, env, domain) -> bool where env maps variables to vertices."""

    def comp(h):
        if isinstance(h, Const):
            val = h.value
            return lambda g, env, dom: val
        if isinstance(h, Eq):
            a, b = h.a, h.b
            return lambda g, env, dom: env[a] == env[b]
        if isinstance(h, Edge):
            a, b = h.a, h.b

            def edge(g, env, dom):
                u, v = env[a], env[b]
                return u is not None and v is not None and v in g.adj[u]
            return edge
        if isinstance(h, Color):
            i, x = h.index, h.x

            def color(g, env, dom):
                v = env[x]
                return v is not None and i in g.colors[v]
            return color
        if isinstance(h, RootLabel):
            lab, x = h.label, h.x

            def rootlabel(g, env, dom):
                v = env[x]
                return v is not None and g.roots.get(v) == lab
            return rootlabel
        if isinstance(h, DP):
            flat = [v for p in h.pairs for v in p]

            def dp(g, env, dom):
                vals = [env[v] for v in flat]
                if None in vals:
                    return False
                return dp_query(g, list(zip(vals[::2], vals[1::2])))
            return dp
        if isinstance(h, Pred):
            name = h.name

            def pred(g, env, dom):
                raise InputError(f"predicate {name!r} has no interpretation on graphs")
            return pred
        if isinstance(h, Not):
            c = comp(h.f)
            return lambda g, env, dom: not c(g, env, dom)
        if isinstance(h, And):
            ca, cb = comp(h.a), comp(h.b)
            return lambda g, env, dom: ca(g, env, dom) and cb(g, env, dom)
        if isinstance(h, Or):
            ca, cb = comp(h.a), comp(h.b)
            return lambda g, env, dom: ca(g, env, dom) or cb(g, env, dom)
        body = comp(h.f)
        var = h.var
        want = isinstance(h, Exists)

        def quant(g, env, dom):
            saved = env.get(var, _MISSING)
            try:
                for v in dom:
                    env[var] = v
                    if body(g, env, dom) == want:
                        return want
                return not want
            finally:
                if saved is _MISSING:
                    env.pop(var, None)
                else:
                    env[var] = saved
        return quant

    return comp(f)


_MISSING = object()


def evaluate(g: ColoredRootedGraph, f: Formula, val: Mapping[str, int | None] | None = None,
             domain: Iterable[int] | None = None) -> bool:
    """Truth of f in g under val. Quantifiers range over `domain` (default V(g))."""
    val = dict(val or {})
    missing = free_vars(f) - set(val)
    if missing:
        raise InputError(f"unbound variable(s): {', '.join(sorted(missing))}")
    for x, v in val.items():
        if v is not None and v not in g:
            raise InputError(f"variable {x} bound to unknown vertex {v}")
    dom = tuple(g.vertices if domain is None else domain)
    return compile_formula(f)(g, val, dom)
