"""Presburger formula families: Mul_n, Hyp_n, Div_n and axiom schemata.

Mul_n(x, y, z) says y <= 2^(2^n) and x*y = z.  Mul_0 lists the cases
y = 0, 1, 2; Mul_{n+1} writes y = y1*y2 + y4 with four uses of Mul_n,
and Solovay compression turns those four uses into one.
"""

from __future__ import annotations

from functools import lru_cache

import sympy

from .grammar import parse
from .logic import (
    ONE,
    ZERO,
    Add,
    And,
    Eq,
    Forall,
    Formula,
    Implies,
    Mod,
    Or,
    Term,
    Var,
    conj,
    disj,
    exists,
    forall,
    free_vars,
    lt,
    numeral,
    substitute,
    substitute_many,
)
from .solovay import IteratedDefinition, Template

MUL_PARAMS = ("x", "y", "z")
MUL_BASE = "(y = 0 -> z = 0) & (y = 1 -> z = x) & (y = 2 -> z = x + x) & ~(y != 0 & y != 1 & y != 2)"
MUL_BODY = (
    "E y1. E y2. E y3. E y4. E z1. E z2. E z4. "
    "y = y3 + y4 & R(y1, y2, y3) & R(x, y1, z1) & R(z1, y2, z2) & R(x, y4, z4) & z = z2 + z4 & y2 < y1"
)

NAIVE_BUDGET = 5_000_000


def mul_template() -> Template:
    return Template.from_text(",".join(MUL_PARAMS), MUL_BASE, MUL_BODY)


@lru_cache(maxsize=1)
def mul_definition() -> IteratedDefinition:
    return IteratedDefinition(mul_template())


def gen_mul(n: int, compressed: bool = True, node_budget: int = NAIVE_BUDGET) -> Formula:
    """Mul_n(x, y, z)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    d = mul_definition()
    return d.iterate(n) if compressed else d.expand_naive(n, node_budget)


def _term(t: Term | str | int) -> Term:
    if isinstance(t, int):
        return numeral(t)
    if isinstance(t, str):
        return Var(t)
    return t


def mul_at(n: int, a, b, c, compressed: bool = True) -> Formula:
    """Mul_n(a, b, c) for terms, variable names or naturals."""
    return substitute_many(gen_mul(n, compressed), dict(zip(MUL_PARAMS, map(_term, (a, b, c)))))


def gen_hyp(n: int, compressed: bool = True) -> Formula:
    """Hyp_n(y): y is a standard natural <= 2^(2^n)."""
    m = lambda a, b, c: mul_at(n, a, b, c, compressed)  # noqa: E731
    unique = forall(
        ["x"],
        exists(["z"], And(m("x", "y", "z"), forall(["w"], Implies(m("x", "y", "w"), Eq(Var("w"), Var("z")))))),
    )
    distributive = forall(
        ["x0", "x1", "x2"],
        Implies(
            Eq(Var("x0"), Add(Var("x1"), Var("x2"))),
            exists(
                ["z0", "z1", "z2"],
                conj(
                    [
                        m("x1", "y", "z1"),
                        m("x2", "y", "z2"),
                        m("x0", "y", "z0"),
                        Eq(Var("z0"), Add(Var("z1"), Var("z2"))),
                    ]
                ),
            ),
        ),
    )
    return conj([m(1, "y", "y"), m(0, "y", 0), unique, distributive])


def hyp_at(n: int, k: int, compressed: bool = True) -> Formula:
    return substitute(gen_hyp(n, compressed), "y", numeral(k))


def gen_div(n: int, compressed: bool = True) -> Formula:
    """Div_n(x): x is divisible with remainder by every y with Hyp_n(y)."""
    body = exists(
        ["a1", "b1", "b2"],
        conj([mul_at(n, "a1", "y", "b1", compressed), Eq(Var("x"), Add(Var("b1"), Var("b2"))), lt(Var("b2"), Var("y"))]),
    )
    return Forall("y", Implies(gen_hyp(n, compressed), Or(Eq(Var("y"), ZERO), body)))


# ---------------------------------------------------------------- axioms


def gen_pra_alt_axiom(p: int) -> Formula:
    """A x. (x =_p 0 | ... | x =_p p-1)."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    x = Var("x")
    return Forall("x", disj(Mod(p, x, numeral(r)) for r in range(p)))


def pra_alt_axiom_symbols(p: int) -> int:
    """paper_symbols of gen_pra_alt_axiom(p), without building it.

    Each x =_p r expands to E z (z+...+z + r = x | z+...+z + x = r) with
    p copies of z: 3 + 2(2p+1) + 2(1 + |r|) symbols, |0| = 1 and
    |r| = 2r - 1 otherwise.  Summing over r and adding p-1 disjunctions
    and the quantifier gives 6p^2 + 4p + 5.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    return 6 * p * p + 4 * p + 5


def pra_alt_axiom_nodes(p: int) -> int:
    """node_count of gen_pra_alt_axiom(p): quantifier, p-1 disjunctions, 3 nodes per literal."""
    return 4 * p


def pra_minus_axioms() -> list[Formula]:
    texts = [
        "A x. A y. A z. x + (y + z) = (x + y) + z",
        "A x. A y. x + y = y + x",
        "A x. x + 0 = x",
        "A x. A y. A z. x + z = y + z -> x = y",
        "A x. x + 1 != 0",
        "A x. x != 0 -> (E y. x = y + 1)",
        "A x. A y. x <= y | y <= x",
    ]
    return [parse(t) for t in texts]


def gen_induction_instance(phi: Formula, x: str) -> Formula:
    """(phi(0) & A x. (phi(x) -> phi(x+1))) -> A x. phi(x), closed universally."""
    if x not in free_vars(phi):
        raise ValueError(f"{x} is not free in the formula")
    step = Forall(x, Implies(phi, substitute(phi, x, Add(Var(x), ONE))))
    inst = Implies(And(substitute(phi, x, ZERO), step), Forall(x, phi))
    return forall(sorted(free_vars(inst)), inst)


MAX_WINDOW_N = 6


def prime_window(n: int) -> int:
    """Least prime k with 2^(2^n - 1) < k < 2^(2^n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_WINDOW_N:
        raise ValueError(f"window for n={n} is beyond the search budget (n <= {MAX_WINDOW_N})")
    lo, hi = 1 << ((1 << n) - 1), 1 << (1 << n)
    k = sympy.nextprime(lo)
    if not lo < k < hi:
        raise AssertionError("no prime in the window")
    return int(k)


__all__ = [
    "MUL_BASE",
    "MUL_BODY",
    "MUL_PARAMS",
    "gen_div",
    "gen_hyp",
    "gen_induction_instance",
    "gen_mul",
    "gen_pra_alt_axiom",
    "hyp_at",
    "mul_at",
    "mul_definition",
    "mul_template",
    "pra_alt_axiom_nodes",
    "pra_alt_axiom_symbols",
    "pra_minus_axioms",
    "prime_window",
]
