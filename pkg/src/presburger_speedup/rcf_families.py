"""Real-closed-field formula families: Pow_n, Hyp_n, Root_n and axioms.

Formulas here use the RCF signature (0, 1, +, *, <=); ``2`` is written
``1 + 1`` and ``a < b`` is ``a <= b & a != b``.  Nothing here decides
RCF sentences.  Pow_0 is checked by direct evaluation over the
rationals; the rest is measured and checked structurally.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .grammar import parse, parse_template
from .logic import (
    Add,
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Le,
    Mul,
    Not,
    Num,
    One,
    Or,
    Scale,
    Term,
    Var,
    Zero,
    conj,
    forall,
    free_vars,
    fresh_name,
    all_vars,
    is_quantifier_free,
    substitute,
)
from .solovay import IteratedDefinition, Template, occurrences, plug

POW_PARAMS = ("x", "y", "z")
POW_BASE = "(y = 0 -> z = 1) & (y = 1 -> z = x) & (y = 1 + 1 -> z = x * x) & ~(y != 0 & y != 1 & y != 1 + 1)"
POW_BODY = (
    "(E y1. (A y2. (R(1, y1, 1) & R(1, y2, 1) -> y2 <= y1)) & y <= y1 * y1)"
    " & (R(1, y, 1) -> R(x, y, z))"
    " & (~R(1, y, 1) -> (E y3. E y4. E y5. E z2. E z3. E z4."
    " R(1, y3, 1) & R(1, y4, 1) & R(1, y5, 1) & y = y3 * y4 + y5"
    " & R(x, y3, z2) & R(z2, y4, z3) & R(x, y5, z4) & z = z3 * z4))"
)

# R below is a handle for Pow_n(x, y, z)
HYP_PROXIMITY = "E x. E z. 1 < x & R(x, y, z) & z <= 1 + 1"
HYP_MONOTONE = (
    "A x. A x1. 1 < x & 1 < x1 -> (A z. A z1. R(x, y, z) & R(x1, y, z1) -> x < z & (z < z1 -> x < x1))"
)
HYP_DENSE = (
    "A c1. A c2. 1 < c1 & 1 < c2 -> "
    "(c1 != c2 -> (E x0. E c0. R(x0, y, c0) & (c1 < c0 & c0 < c2 | c2 < c0 & c0 < c1) & 1 < x0))"
)
ROOT = "A y. Hyp(y) -> ~(1 < y) | (E r. R(r, y, 1 + 1))"


def pow_template() -> Template:
    return Template.from_text(",".join(POW_PARAMS), POW_BASE, POW_BODY, rcf=True)


@lru_cache(maxsize=1)
def pow_definition() -> IteratedDefinition:
    return IteratedDefinition(pow_template())


def gen_pow(n: int, compressed: bool = True, node_budget: int = 5_000_000) -> Formula:
    """Pow_n(x, y, z): y is a natural <= 2^(2^n) and x^y = z."""
    if n < 0:
        raise ValueError("n must be >= 0")
    d = pow_definition()
    return d.iterate(n) if compressed else d.expand_naive(n, node_budget)


def hyp_rcf_conjuncts(n: int, compressed: bool = True) -> list[Formula]:
    p = gen_pow(n, compressed)
    return [plug(parse_template(t, rcf=True), "R", POW_PARAMS, p) for t in (HYP_PROXIMITY, HYP_MONOTONE, HYP_DENSE)]


def gen_hyp_rcf(n: int, compressed: bool = True) -> Formula:
    """Hyp_n(y): proximity to 1, strict monotonicity, density of y-th powers."""
    return conj(hyp_rcf_conjuncts(n, compressed))


def root_template() -> Formula:
    """Root_n with handles Hyp(y) and R(r, y, 2) for Hyp_n and Pow_n."""
    return parse_template(ROOT, rcf=True)


def gen_root(n: int, compressed: bool = True) -> Formula:
    """Root_n: every y with Hyp_n(y) and y > 1 has a y-th root of 2."""
    t = plug(root_template(), "Hyp", ("y",), gen_hyp_rcf(n, compressed))
    return plug(t, "R", POW_PARAMS, gen_pow(n, compressed))


# ---------------------------------------------------------------- axioms


def _power(x: Term, i: int) -> Term:
    out: Term = x
    for _ in range(i - 1):
        out = Mul(out, x)
    return out


def gen_sqrt_axiom() -> Formula:
    """A z. 0 <= z -> E x. x * x = z."""
    return parse("A z. 0 <= z -> (E x. x * x = z)", rcf=True)


def gen_odd_degree_axiom(m: int) -> Formula:
    """A a0 ... a_{m-1}. E x. x^m + a_{m-1} x^{m-1} + ... + a0 = 0."""
    if m < 1 or m % 2 == 0:
        raise ValueError("degree must be odd and >= 1")
    x = Var("x")
    poly: Term = _power(x, m)
    for i in range(m - 1, -1, -1):
        a = Var(f"a{i}")
        poly = Add(poly, Mul(a, _power(x, i)) if i else a)
    return forall([f"a{i}" for i in range(m)], Exists("x", Eq(poly, Zero())))


def gen_rcf_axiom(kind: str, m: int | None = None) -> Formula:
    if kind.lower() == "sqrt":
        return gen_sqrt_axiom()
    if kind.lower() in ("odd", "odddegree", "odd-degree"):
        if m is None:
            raise ValueError("odd-degree axiom needs a degree")
        return gen_odd_degree_axiom(m)
    raise ValueError(f"unknown RCF axiom kind {kind!r}")


def gen_lub_instance(phi: Formula, x: str) -> Formula:
    """The least-upper-bound axiom for phi(x)."""
    if x not in free_vars(phi):
        raise ValueError(f"{x} is not free in the formula")
    taken = set(all_vars(phi)) | {x}
    d, b, c = (fresh_name(s, taken) for s in ("d", "b", "c"))
    if len({d, b, c}) < 3:
        raise AssertionError("fresh names collided")
    xv = Var(x)

    def bounded_by(t: str) -> Formula:
        return Forall(x, Implies(phi, Le(xv, Var(t))))

    premise = And(Exists(d, substitute(phi, x, Var(d))), Exists(b, bounded_by(b)))
    least = Forall(b, Implies(bounded_by(b), Le(Var(c), Var(b))))
    return Implies(premise, Exists(c, And(bounded_by(c), least)))


# ------------------------------------------------- evaluation over Q


def eval_rcf_term(t: Term, env: Mapping[str, Fraction]) -> Fraction:
    match t:
        case Zero():
            return Fraction(0)
        case One():
            return Fraction(1)
        case Num(k):
            return Fraction(k)
        case Var(name):
            return Fraction(env[name])
        case Add(l, r):
            return eval_rcf_term(l, env) + eval_rcf_term(r, env)
        case Mul(l, r):
            return eval_rcf_term(l, env) * eval_rcf_term(r, env)
        case Scale(k, s):
            return k * eval_rcf_term(s, env)
    raise TypeError(f"not a term: {t!r}")


def eval_rcf_qf(f: Formula, env: Mapping[str, Fraction]) -> bool:
    """Truth of a quantifier-free RCF formula in the ordered field Q."""
    if not is_quantifier_free(f):
        raise ValueError("formula is not quantifier-free")
    match f:
        case Eq(l, r):
            return eval_rcf_term(l, env) == eval_rcf_term(r, env)
        case Le(l, r):
            return eval_rcf_term(l, env) <= eval_rcf_term(r, env)
        case Not(a):
            return not eval_rcf_qf(a, env)
        case And(l, r):
            return eval_rcf_qf(l, env) and eval_rcf_qf(r, env)
        case Or(l, r):
            return eval_rcf_qf(l, env) or eval_rcf_qf(r, env)
        case Implies(l, r):
            return (not eval_rcf_qf(l, env)) or eval_rcf_qf(r, env)
        case Iff(l, r):
            return eval_rcf_qf(l, env) == eval_rcf_qf(r, env)
    raise TypeError(f"cannot evaluate {f!r} over Q")


# sample points for checking Pow_0 over Q
RATIONAL_GRID = tuple(
    Fraction(q) for q in ("-2", "-1", "-1/2", "0", "1/3", "1/2", "1", "3/2", "2", "5/2", "3")
)


def pow0_holds(x: Fraction, y: Fraction, z: Fraction) -> bool:
    return eval_rcf_qf(gen_pow(0), {"x": Fraction(x), "y": Fraction(y), "z": Fraction(z)})


def handle_count(f: Formula) -> int:
    """Number of R and Hyp handles left in a template-level formula."""
    return sum(len(occurrences(f, name)) for name in ("R", "Hyp"))


__all__ = [
    "POW_BASE",
    "POW_BODY",
    "POW_PARAMS",
    "RATIONAL_GRID",
    "eval_rcf_qf",
    "eval_rcf_term",
    "gen_hyp_rcf",
    "gen_lub_instance",
    "gen_odd_degree_axiom",
    "gen_pow",
    "gen_rcf_axiom",
    "gen_root",
    "gen_sqrt_axiom",
    "handle_count",
    "hyp_rcf_conjuncts",
    "pow0_holds",
    "pow_definition",
    "pow_template",
    "root_template",
]

