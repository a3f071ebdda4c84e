"""Iterated definitions with one occurrence of the defined relation.

Given a base formula phi_0(a) and a template Phi(R, a) the naive
sequence phi_{n+1} = Phi(phi_n) copies phi_n once per occurrence of R,
so it grows exponentially.  Compressing Phi first, so that R occurs
exactly once, makes the sequence grow linearly:

    E e1 ... ek ( AND_i (ei = 0 | ei = 1)
                & A u1 ... ua A f ( OR_i (u = t_i & f = ei) -> (f = 1 <-> R(u)) )
                & Phi[R(t_i) := ei = 1] )

The flags ei record the truth values of the k original occurrences and
the single lookup under the universal block ties them to R.  This needs
0 != 1.  When some R(t_i) mentions a variable bound inside Phi, Phi is
put into prenex form first and the flag block goes under the prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import parse_template, render
from .logic import (
    ONE,
    ZERO,
    And,
    BudgetExceeded,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Rel,
    Term,
    Var,
    all_vars,
    conj,
    disj,
    exists,
    forall,
    free_vars,
    node_count,
    rename_bound_apart,
    replace_rel,
    substitute_many,
    subformulas,
    term_vars,
)

REL = "R"


@dataclass(frozen=True)
class Template:
    """phi_0(params) and Phi(R, params); R has arity len(params)."""

    params: tuple[str, ...]
    base: Formula
    body: Formula
    rel: str = REL

    def __post_init__(self) -> None:
        if any(isinstance(g, Rel) for g in subformulas(self.base)):
            raise ValueError("base formula must not mention the relation")
        occ = occurrences(self.body, self.rel)
        if not occ:
            raise ValueError(f"template body has no occurrence of {self.rel}")
        for r in occ:
            if len(r.args) != self.arity:
                raise ValueError(f"{render(r)} does not have arity {self.arity}")

    @property
    def arity(self) -> int:
        return len(self.params)

    @classmethod
    def from_text(cls, params: str, base: str, body: str, rcf: bool = False) -> Template:
        return cls(tuple(p.strip() for p in params.split(",")), parse_template(base, rcf), parse_template(body, rcf))


def occurrences(f: Formula, rel: str = REL) -> list[Rel]:
    return [g for g in subformulas(f) if isinstance(g, Rel) and g.name == rel]


# ------------------------------------------------------------ prenex form


def _flip(prefix: list[tuple[type, str]]) -> list[tuple[type, str]]:
    return [(Forall if q is Exists else Exists, v) for q, v in prefix]


def _prenex(f: Formula) -> tuple[list[tuple[type, str]], Formula]:
    match f:
        case Exists(v, b) | Forall(v, b):
            p, m = _prenex(b)
            return [(type(f), v)] + p, m
        case Not(a):
            p, m = _prenex(a)
            return _flip(p), Not(m)
        case And(l, r) | Or(l, r):
            pl, ml = _prenex(l)
            pr, mr = _prenex(r)
            return pl + pr, type(f)(ml, mr)
        case Implies(l, r):
            pl, ml = _prenex(l)
            pr, mr = _prenex(r)
            return _flip(pl) + pr, Implies(ml, mr)
        case Iff(l, r):
            if not (_has_quantifier(l) or _has_quantifier(r)):
                return [], f
            raise ValueError("cannot prenex <-> with quantified sides; rewrite it first")
    return [], f


def _has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, (Exists, Forall)) for g in subformulas(f))


def prenex(f: Formula, avoid: frozenset[str] | set[str] = frozenset()) -> tuple[list[tuple[type, str]], Formula]:
    """Prefix and matrix of an equivalent prenex formula (nonempty domains)."""
    g = rename_bound_apart(f, set(avoid) | free_vars(f))
    return _prenex(g)


def _wrap(prefix: list[tuple[type, str]], matrix: Formula) -> Formula:
    for q, v in reversed(prefix):
        matrix = q(v, matrix)
    return matrix


# ------------------------------------------------------------ compression


def _fresh_series(stem: str, count: int, taken: set[str]) -> list[str]:
    out: list[str] = []
    i = 1
    while len(out) < count:
        name = f"{stem}{i}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        i += 1
    return out


def compress(body: Formula, rel: str = REL, avoid: frozenset[str] | set[str] = frozenset()) -> Formula:
    """Equivalent formula (under 0 != 1) with exactly one occurrence of rel."""
    occ = occurrences(body, rel)
    if not occ:
        raise ValueError(f"nothing to compress: no occurrence of {rel}")
    arity = len(occ[0].args)
    if any(len(r.args) != arity for r in occ):
        raise ValueError(f"{rel} is used with different arities")
    bound = {v for g in subformulas(body) if isinstance(g, (Exists, Forall)) for v in [g.var]}
    arg_vars = set().union(*(term_vars(a) for r in occ for a in r.args))
    if arg_vars & bound:
        prefix, matrix = prenex(body, avoid)
    else:
        prefix, matrix = [], body
    # one flag per distinct argument tuple, in order of first occurrence
    tuples: dict[tuple[Term, ...], None] = {}
    for r in occurrences(matrix, rel):
        tuples.setdefault(r.args, None)
    taken = set(all_vars(body)) | set(avoid) | {v for _, v in prefix}
    flags = _fresh_series("e", len(tuples), taken)
    us = _fresh_series("u", arity, taken)
    fv = _fresh_series("f", 1, taken)[0]
    flag_of = dict(zip(tuples, flags))
    new_matrix = replace_rel(matrix, rel, lambda args: Eq(Var(flag_of[args]), ONE))
    two_valued = conj(Or(Eq(Var(e), ZERO), Eq(Var(e), ONE)) for e in flags)
    lookup_guard = disj(
        conj([*(Eq(Var(u), t) for u, t in zip(us, args)), Eq(Var(fv), Var(e))]) for args, e in flag_of.items()
    )
    lookup = forall(
        [*us, fv],
        Implies(lookup_guard, Iff(Eq(Var(fv), ONE), Rel(rel, tuple(Var(u) for u in us)))),
    )
    core = exists(flags, And(two_valued, And(lookup, new_matrix)))
    return _wrap(prefix, core)


def plug(host: Formula, rel: str, params: tuple[str, ...], defn: Formula) -> Formula:
    """host with every rel(args) replaced by defn[params := args], capture-avoiding."""
    fv = free_vars(defn)
    if not fv <= set(params):
        raise ValueError(f"definition has extra free variables {sorted(fv - set(params))}")
    return replace_rel(host, rel, lambda args: substitute_many(defn, dict(zip(params, args))))


@dataclass
class IteratedDefinition:
    template: Template
    compressed_body: Formula = field(init=False)
    _cache: list[Formula] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        self.compressed_body = compress(self.template.body, self.template.rel, set(self.template.params))
        if len(occurrences(self.compressed_body, self.template.rel)) != 1:
            raise AssertionError("compression must leave exactly one occurrence")
        self._cache = [self.template.base]

    def iterate(self, n: int) -> Formula:
        if n < 0:
            raise ValueError("n must be >= 0")
        t = self.template
        while len(self._cache) <= n:
            prev = self._cache[-1]
            self._cache.append(plug(self.compressed_body, t.rel, t.params, prev))
        return self._cache[n]

    def expand_naive(self, n: int, node_budget: int = 5_000_000) -> Formula:
        if n < 0:
            raise ValueError("n must be >= 0")
        t = self.template
        k = len(occurrences(t.body, t.rel))
        body_nodes = node_count(t.body)
        cur = t.base
        for _ in range(n):
            estimate = k * node_count(cur) + body_nodes
            if estimate > node_budget:
                raise BudgetExceeded(f"naive expansion would need ~{estimate} nodes (budget {node_budget})")
            cur = plug(t.body, t.rel, t.params, cur)
        return cur


def iterate(defn: IteratedDefinition, n: int) -> Formula:
    return defn.iterate(n)


def expand_naive(defn: IteratedDefinition, n: int, node_budget: int = 5_000_000) -> Formula:
    return defn.expand_naive(n, node_budget)
