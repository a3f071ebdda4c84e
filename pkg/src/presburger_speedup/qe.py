"""Quantifier elimination for Presburger arithmetic over the naturals.

A single existential ``E x. F`` with F quantifier-free is eliminated in
five steps:

1. isolate: cancel x from both sides of each literal;
2. unify: scale every x-literal so x has one common coefficient C
   (``t =_m u`` becomes ``kt =_{mk} ku``);
3. align: add the other companions to both sides so each x-side reads
   ``Cx + t`` with one shared t, then abbreviate ``Cx + t`` as y;
4. guard: ``t <= y & y =_C t & F''(y)``;
5. expand: ``OR_{s in T} OR_{0<=r<=D} F'''(s + r)`` with D the lcm of
   the moduli and T holding 0 and every term compared with y by = or <=.

Nested quantifiers are removed innermost first, ``A x. F`` as
``~E x. ~F``.  Every intermediate whole formula is kept in a
:class:`RewriteTrace`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

from .grammar import render, render_term
from .logic import (
    FALSE,
    TRUE,
    ZERO,
    And,
    BudgetExceeded,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Le,
    LinearTerm,
    Mod,
    Not,
    Or,
    Rel,
    Var,
    all_vars,
    closed_literal_rules,
    conj,
    disj,
    flatten,
    free_vars,
    fresh_name,
    has_mul,
    is_quantifier_free,
    lcm_all,
    linearize,
    nnf,
    node_count,
    substitute,
)

DEFAULT_NODE_BUDGET = 2_000_000

STEP_TAGS = ("NNF", "Step1", "Step2", "Step3", "Step4", "Step5", "BooleanSimplify")


# ------------------------------------------------------------ literals


@dataclass(frozen=True)
class XNormalAtom:
    """A literal mentioning x, read as ``C*x + companion REL other``."""

    kind: str  # "Eq", "Le" or "Mod"
    positive: bool
    x_side: str  # "left" or "right"
    x_coeff: int
    companion: LinearTerm
    other: LinearTerm
    modulus: int = 0

    @classmethod
    def of(cls, lit: Formula, x: str) -> XNormalAtom | None:
        positive, atom = _split(lit)
        kind = type(atom).__name__
        l, r = linearize(atom.left), linearize(atom.right)
        a, b = l.coeff(x), r.coeff(x)
        if a and b:
            raise ValueError(f"{render(lit)} is not isolated in {x}")
        if not a and not b:
            return None
        modulus = atom.m if isinstance(atom, Mod) else 0
        if a:
            return cls(kind, positive, "left", a, l.without(x), r, modulus)
        return cls(kind, positive, "right", b, r.without(x), l, modulus)

    def x_term(self, x: str) -> LinearTerm:
        return LinearTerm.make({x: self.x_coeff}) + self.companion

    def build(self, x_side_term, other_term) -> Formula:
        if self.x_side == "left":
            l, r = x_side_term, other_term
        else:
            l, r = other_term, x_side_term
        atom = {"Eq": lambda: Eq(l, r), "Le": lambda: Le(l, r), "Mod": lambda: Mod(self.modulus, l, r)}[self.kind]()
        return atom if self.positive else Not(atom)

    def to_formula(self, x: str) -> Formula:
        return self.build(self.x_term(x).to_term(), self.other.to_term())


def _split(lit: Formula) -> tuple[bool, Formula]:
    if isinstance(lit, Not):
        if not isinstance(lit.arg, (Eq, Le, Mod)):
            raise ValueError(f"not a literal: {render(lit)}")
        return False, lit.arg
    if not isinstance(lit, (Eq, Le, Mod)):
        raise ValueError(f"not a literal: {render(lit)}")
    return True, lit


def _map_literals(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    match f:
        case And(l, r):
            return And(_map_literals(l, fn), _map_literals(r, fn))
        case Or(l, r):
            return Or(_map_literals(l, fn), _map_literals(r, fn))
    return fn(f)


def _literals(f: Formula) -> list[Formula]:
    out: list[Formula] = []

    def go(g: Formula) -> None:
        if isinstance(g, (And, Or)):
            go(g.left)
            go(g.right)
        else:
            out.append(g)

    go(f)
    return out


def _check_nnf(f: Formula) -> None:
    for lit in _literals(f):
        _split(lit)
        if isinstance(lit, Not) and isinstance(lit.arg, Le):
            raise ValueError("negated <= must be removed by NNF first")
    if has_mul(f):
        raise ValueError("multiplication is not Presburger")


# ------------------------------------------------------------ the steps


def step1_isolate(atom: Formula, x: str) -> Formula:
    """Cancel x from both sides until one side has none left."""
    positive, a = _split(atom)
    l, r = linearize(a.left), linearize(a.right)
    k = min(l.coeff(x), r.coeff(x))
    if k == 0:
        return atom
    l = LinearTerm.make({**l.as_dict, x: l.coeff(x) - k}, l.constant)
    r = LinearTerm.make({**r.as_dict, x: r.coeff(x) - k}, r.constant)
    match a:
        case Eq():
            out: Formula = Eq(l.to_term(), r.to_term())
        case Le():
            out = Le(l.to_term(), r.to_term())
        case Mod(m):
            out = Mod(m, l.to_term(), r.to_term())
    return out if positive else Not(out)


def step2_unify(f: Formula, x: str) -> tuple[Formula, int]:
    """Give x the same coefficient C in every literal; C = 1 if x is absent."""
    coeffs = [n.x_coeff for lit in _literals(f) if (n := XNormalAtom.of(lit, x))]
    big_c = lcm_all(coeffs)

    def fn(lit: Formula) -> Formula:
        n = XNormalAtom.of(lit, x)
        if n is None or n.x_coeff == big_c:
            return lit
        k = big_c // n.x_coeff
        scaled = XNormalAtom(
            n.kind, n.positive, n.x_side, big_c, n.companion.times(k), n.other.times(k), n.modulus * k
        )
        return scaled.to_formula(x)

    return _map_literals(f, fn), big_c


def _aligned(f: Formula, x: str, big_c: int) -> tuple[dict[Formula, XNormalAtom], LinearTerm]:
    atoms: dict[Formula, XNormalAtom] = {}
    for lit in _literals(f):
        n = XNormalAtom.of(lit, x)
        if n is not None and lit not in atoms:
            if n.x_coeff != big_c:
                raise ValueError(f"{render(lit)} has x-coefficient {n.x_coeff}, expected {big_c}")
            atoms[lit] = n
    total = LinearTerm()
    for n in atoms.values():
        total = total + n.companion
    out: dict[Formula, XNormalAtom] = {}
    items = list(atoms.items())
    for i, (lit, n) in enumerate(items):
        rest = LinearTerm()
        for j, (_, other) in enumerate(items):
            if j != i:
                rest = rest + other.companion
        out[lit] = XNormalAtom(n.kind, n.positive, n.x_side, big_c, total, n.other + rest, n.modulus)
    return out, total


def step3_align(f: Formula, x: str, big_c: int, y: str | None = None) -> tuple[Formula, LinearTerm]:
    """Return F''(y) where y stands for C*x + t, and the shared companion t."""
    if y is None:
        y = fresh_name("y", all_vars(f))
    table, t = _aligned(f, x, big_c)
    yv = Var(y)
    return _map_literals(f, lambda lit: table[lit].build(yv, table[lit].other.to_term()) if lit in table else lit), t


def _step3_in_x(f: Formula, x: str, big_c: int) -> Formula:
    table, _ = _aligned(f, x, big_c)
    return _map_literals(f, lambda lit: table[lit].to_formula(x) if lit in table else lit)


def step4_guard(f_doubleprime: Formula, t: LinearTerm, big_c: int, y: str = "y") -> Formula:
    yv, tt = Var(y), t.to_term()
    return And(Le(tt, yv), And(Mod(big_c, yv, tt), f_doubleprime))


@dataclass
class TraceEntry:
    step_tag: str
    before: Formula
    after: Formula
    note: str = ""


@dataclass
class RewriteTrace:
    entries: list[TraceEntry] = field(default_factory=list)

    def add(self, tag: str, before: Formula, after: Formula, note: str = "") -> None:
        if tag not in STEP_TAGS:
            raise ValueError(f"unknown step tag {tag}")
        self.entries.append(TraceEntry(tag, before, after, note))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def chained(self) -> bool:
        return all(a.after == b.before for a, b in zip(self.entries, self.entries[1:]))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            [
                {"step": e.step_tag, "before": render(e.before), "after": render(e.after), "note": e.note}
                for e in self.entries
            ],
            indent=indent,
        )


@dataclass
class ElimResult:
    result: Formula
    big_C: int
    big_D: int
    term_set_T: list[LinearTerm]
    trace: RewriteTrace = field(default_factory=RewriteTrace)


def _term_set(f: Formula, y: str) -> list[LinearTerm]:
    seen: dict[LinearTerm, None] = {LinearTerm(): None}
    yv = Var(y)
    for lit in _literals(f):
        _, a = _split(lit)
        if isinstance(a, (Eq, Le)):
            for s, o in ((a.left, a.right), (a.right, a.left)):
                if s == yv and y not in free_vars(Eq(o, o)):
                    seen.setdefault(linearize(o), None)
    return list(seen)


def step5_expand(
    f_tripleprime: Formula,
    y: str,
    big_c: int = 1,
    node_budget: int | None = None,
) -> ElimResult:
    """Replace E y. F'''(y) by the finite disjunction over T and 0..D."""
    terms = _term_set(f_tripleprime, y)
    big_d = lcm_all(a.m for a in map(lambda lit: _split(lit)[1], _literals(f_tripleprime)) if isinstance(a, Mod))
    if node_budget is not None:
        estimate = len(terms) * (big_d + 1) * node_count(f_tripleprime)
        if estimate > node_budget:
            raise BudgetExceeded(f"Step 5 would build ~{estimate} nodes (budget {node_budget})")
    disjuncts = [
        substitute(f_tripleprime, y, (s + LinearTerm((), r)).to_term()) for s in terms for r in range(big_d + 1)
    ]
    return ElimResult(disj(disjuncts), big_c, big_d, terms)


# ------------------------------------------------------ simplification


def _const(b: bool) -> Formula:
    return TRUE if b else FALSE


def _is_const(f: Formula) -> bool | None:
    if f == TRUE:
        return True
    if f == FALSE:
        return False
    return None


def canonical_atom(a: Formula) -> Formula:
    """Cancel common parts, divide out common factors, fold closed atoms."""
    m = a.m if isinstance(a, Mod) else 0
    return _canon(type(a), linearize(a.left), linearize(a.right), m)


def _divide(t: LinearTerm, g: int, constant: int) -> LinearTerm:
    return LinearTerm(tuple((v, c // g) for v, c in t.coeffs), constant)


def _canon(kind: type, l: LinearTerm, r: LinearTerm, m: int = 0) -> Formula:
    if kind is Mod:
        d: dict[str, int] = {}
        for v in l.variables() | r.variables():
            c = (l.coeff(v) - r.coeff(v)) % m
            if c:
                d[v] = c
        c0 = (l.constant - r.constant) % m
        g = gcd(m, c0, *d.values())
        m, c0 = m // g, c0 // g
        if m == 1:
            return TRUE
        if not d:
            return _const(c0 == 0)
        return Mod(m, LinearTerm.make({v: c // g for v, c in d.items()}, c0).to_term(), ZERO)
    l, r = l.minus_common(r)
    if kind is Le and l.is_constant() and l.constant == 0:
        return TRUE
    if l.is_constant() and r.is_constant():
        return _const(closed_literal_rules(kind(l.to_term(), r.to_term()))[0])
    # over the naturals a side is at least its constant
    if r.is_constant() and l.constant > r.constant:
        return FALSE
    if kind is Eq and l.is_constant() and r.constant > l.constant:
        return FALSE
    g = gcd(*(c for _, c in l.coeffs + r.coeffs))
    if g > 1:
        a, b = l.constant, r.constant
        if kind is Eq:
            if a % g or b % g:
                return FALSE
            l, r = _divide(l, g, a // g), _divide(r, g, b // g)
        else:
            # gL + a <= gR + b  iff  L + ceil(a/g) <= R + floor(b/g); one of a, b is 0
            l, r = _divide(l, g, -(-a // g)), _divide(r, g, b // g)
    return kind(l.to_term(), r.to_term())


def _negate(f: Formula) -> Formula:
    c = _is_const(f)
    return f.arg if isinstance(f, Not) else (Not(f) if c is None else _const(not c))


def expand_simplified(f_tripleprime: Formula, y: str, big_c: int = 1, literal_budget: int | None = None) -> ElimResult:
    """Step 5 with each disjunct simplified as it is produced.

    Equivalent to ``simplify(step5_expand(...).result)`` but never holds
    the raw expansion in memory; used when the raw disjunction would be
    too large to build.
    """
    terms = _term_set(f_tripleprime, y)
    lits = _literals(f_tripleprime)
    big_d = lcm_all(a.m for a in (_split(lit)[1] for lit in lits) if isinstance(a, Mod))

    def prep(g: Formula):
        if isinstance(g, (And, Or)):
            return (type(g), [prep(p) for p in flatten(g, type(g))])
        positive, a = _split(g)
        if y not in free_vars(a):
            return ("const", simplify(g))
        m = a.m if isinstance(a, Mod) else 0
        return ("y", positive, type(a), linearize(a.left), linearize(a.right), m)

    def at(t: LinearTerm, val: LinearTerm) -> LinearTerm:
        k = t.coeff(y)
        return t.without(y) + val.times(k) if k else t

    def inst(node, val: LinearTerm) -> Formula:
        if node[0] == "const":
            return node[1]
        if node[0] == "y":
            _, positive, kind, l, r, m = node
            out = _canon(kind, at(l, val), at(r, val), m)
            return out if positive else _negate(out)
        kind, parts = node
        absorbing = kind is Or
        kept: dict[Formula, None] = {}
        for p in parts:
            s = inst(p, val)
            c = _is_const(s)
            if c is absorbing:
                return _const(absorbing)
            if c is None:
                for q in flatten(s, kind):
                    kept.setdefault(q, None)
        if not kept:
            return _const(not absorbing)
        return conj(kept) if kind is And else disj(kept)

    skeleton = prep(f_tripleprime)
    work = len(terms) * (big_d + 1) * len(lits)
    if literal_budget is not None and work > literal_budget:
        raise BudgetExceeded(f"Step 5 needs ~{work} literal instances (budget {literal_budget})")
    out: dict[Formula, None] = {}
    for s in terms:
        for r in range(big_d + 1):
            d = inst(skeleton, s + LinearTerm((), r))
            c = _is_const(d)
            if c is True:
                return ElimResult(TRUE, big_c, big_d, terms)
            if c is None:
                for q in flatten(d, Or):
                    out.setdefault(q, None)
    return ElimResult(disj(out) if out else FALSE, big_c, big_d, terms)


def simplify(f: Formula) -> Formula:
    """Constant folding, literal canonicalisation and duplicate removal."""
    match f:
        case Eq() | Le() | Mod():
            return canonical_atom(f)
        case Rel():
            return f
        case Not(a):
            s = simplify(a)
            c = _is_const(s)
            if c is not None:
                return _const(not c)
            if isinstance(s, Not):
                return s.arg
            return Not(s)
        case And() | Or():
            kind = type(f)
            absorbing = kind is Or
            out: dict[Formula, None] = {}
            for p in flatten(f, kind):
                s = simplify(p)
                c = _is_const(s)
                if c is absorbing:
                    return _const(absorbing)
                if c is None:
                    for q in flatten(s, kind):
                        out.setdefault(q, None)
            if not out:
                return _const(not absorbing)
            return conj(out) if kind is And else disj(out)
        case Implies(l, r):
            return simplify(Or(Not(l), r))
        case Iff(l, r):
            a, b = simplify(l), simplify(r)
            ca, cb = _is_const(a), _is_const(b)
            if ca is not None:
                return b if ca else simplify(Not(b))
            if cb is not None:
                return a if cb else simplify(Not(a))
            return a if a == b else Iff(a, b)
        case Exists(v, b) | Forall(v, b):
            s = simplify(b)
            if _is_const(s) is not None or v not in free_vars(s):
                return s
            return type(f)(v, s)
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------- whole formulas


def _children(f: Formula) -> tuple[Formula, ...]:
    match f:
        case Not(a):
            return (a,)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return (l, r)
        case Exists(_, b) | Forall(_, b):
            return (b,)
    return ()


def _rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    match f:
        case Not():
            return Not(kids[0])
        case Exists(v) | Forall(v):
            return type(f)(v, kids[0])
    return type(f)(*kids)


def _innermost(f: Formula) -> tuple[int, ...] | None:
    """Path to a quantifier whose body is quantifier-free."""
    path: list[int] = []
    node = f
    found: tuple[int, ...] | None = None
    while True:
        if isinstance(node, (Exists, Forall)):
            found = tuple(path)
        kids = _children(node)
        nxt = next((i for i, k in enumerate(kids) if not is_quantifier_free(k)), None)
        if nxt is None:
            return found
        path.append(nxt)
        node = kids[nxt]


def _get(f: Formula, path: tuple[int, ...]) -> Formula:
    for i in path:
        f = _children(f)[i]
    return f


def _put(f: Formula, path: tuple[int, ...], g: Formula) -> Formula:
    if not path:
        return g
    kids = list(_children(f))
    kids[path[0]] = _put(kids[path[0]], path[1:], g)
    return _rebuild(f, tuple(kids))


def eliminate_exists(
    f: Formula,
    plug: Callable[[Formula], Formula] = lambda g: g,
    avoid: frozenset[str] | set[str] = frozenset(),
    node_budget: int | None = DEFAULT_NODE_BUDGET,
    do_simplify: bool = True,
) -> ElimResult:
    """Eliminate the outer E x of ``f = E x. B`` with B quantifier-free.

    ``plug`` embeds a replacement for f into the surrounding formula so
    that the trace records whole formulas.
    """
    if not isinstance(f, Exists) or not is_quantifier_free(f.body):
        raise ValueError("expected E x. B with B quantifier-free")
    if any(isinstance(g, Rel) for g in _literals(nnf(f.body))):
        raise ValueError("relation symbols cannot be eliminated")
    x = f.var
    trace = RewriteTrace()
    cur = plug(f)

    def record(tag: str, g: Formula, note: str = "") -> None:
        nonlocal cur
        new = plug(g)
        trace.add(tag, cur, new, note)
        cur = new

    body = nnf(f.body)
    _check_nnf(body)
    record("NNF", Exists(x, body), "negation normal form")
    if x not in free_vars(body):
        out = simplify(body) if do_simplify else body
        record("BooleanSimplify", out, f"{x} does not occur")
        return ElimResult(out, 1, 1, [LinearTerm()], trace)

    b1 = _map_literals(body, lambda lit: step1_isolate(lit, x))
    record("Step1", Exists(x, b1), f"isolate {x}")
    b2, big_c = step2_unify(b1, x)
    record("Step2", Exists(x, b2), f"C = {big_c}")
    y = fresh_name("y", set(all_vars(f)) | set(avoid))
    f2, t = step3_align(b2, x, big_c, y)
    record("Step3", Exists(x, _step3_in_x(b2, x, big_c)), f"t = {render_term(t.to_term())}")
    f3 = step4_guard(f2, t, big_c, y)
    record("Step4", Exists(y, f3), f"{y} abbreviates {big_c}*{x} + t")
    try:
        res = step5_expand(f3, y, big_c, node_budget)
        record("Step5", res.result, f"D = {res.big_D}, |T| = {len(res.term_set_T)}")
    except BudgetExceeded:
        if not do_simplify:
            raise
        res = expand_simplified(f3, y, big_c, node_budget)
        record(
            "Step5",
            res.result,
            f"D = {res.big_D}, |T| = {len(res.term_set_T)}; raw expansion over budget, disjuncts simplified as built",
        )
    out = res.result
    if do_simplify:
        out = simplify(out)
        record("BooleanSimplify", out, "fold constants, drop duplicates")
    res.trace = trace
    res.result = out
    return res


def eliminate_all(
    f: Formula,
    node_budget: int | None = DEFAULT_NODE_BUDGET,
    do_simplify: bool = True,
) -> tuple[Formula, RewriteTrace]:
    """Quantifier-free equivalent of f over the naturals, innermost first."""
    trace = RewriteTrace()
    cur = f
    names = set(all_vars(f))
    while (path := _innermost(cur)) is not None:
        q = _get(cur, path)
        if isinstance(q, Forall):
            new = _put(cur, path, Not(Exists(q.var, nnf(Not(q.body)))))
            trace.add("NNF", cur, new, f"A {q.var} as ~E {q.var} ~")
            cur = new
            path = path + (0,)
            q = _get(cur, path)
        base, p = cur, path
        res = eliminate_exists(q, lambda g: _put(base, p, g), names, node_budget, do_simplify)
        trace.entries.extend(res.trace.entries)
        cur = _put(cur, path, res.result)
        if node_budget is not None and node_count(cur) > node_budget:
            raise BudgetExceeded(f"intermediate formula exceeds {node_budget} nodes")
        names |= all_vars(cur)
    return cur, trace


# -------------------------------------------------------------- decide


@dataclass
class Decision:
    value: bool
    quantifier_free: Formula
    rules: list[tuple[Formula, list[int]]]
    trace: RewriteTrace


def evaluate_closed(f: Formula, rules: list[tuple[Formula, list[int]]] | None = None) -> bool:
    """Truth of a closed QF formula; atoms are settled by the literal rules."""
    match f:
        case Eq() | Le() | Mod():
            value, used = closed_literal_rules(f)
            if rules is not None:
                rules.append((f, used))
            return value
        case Not(a):
            return not evaluate_closed(a, rules)
        case And(l, r):
            return evaluate_closed(l, rules) and evaluate_closed(r, rules)
        case Or(l, r):
            return evaluate_closed(l, rules) or evaluate_closed(r, rules)
        case Implies(l, r):
            return (not evaluate_closed(l, rules)) or evaluate_closed(r, rules)
        case Iff(l, r):
            return evaluate_closed(l, rules) == evaluate_closed(r, rules)
    raise ValueError(f"not a closed quantifier-free formula: {render(f)}")


def decide_explained(sentence: Formula, node_budget: int | None = DEFAULT_NODE_BUDGET) -> Decision:
    if free_vars(sentence):
        raise ValueError(f"not a sentence: free variables {sorted(free_vars(sentence))}")
    qf, trace = eliminate_all(sentence, node_budget)
    rules: list[tuple[Formula, list[int]]] = []
    return Decision(evaluate_closed(qf, rules), qf, rules, trace)


def decide(sentence: Formula, node_budget: int | None = DEFAULT_NODE_BUDGET) -> bool:
    """Truth of a closed Presburger sentence in the standard model."""
    return decide_explained(sentence, node_budget).value
