"""Seeded random Presburger formulas for QE testing and benchmarking.

Every formula uses at most three variables (``x``, ``y``, ``z``) and at
most two quantifiers, with coefficients <= 4 and moduli <= 6.  Each
quantifier is either guard-bounded (``E v. v <= g & B`` or
``A v. v <= g -> B`` with g at most a free variable plus a small
constant) or has a quantifier-free body, so the bounded oracle can give
exact verdicts on a grid of small values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .logic import (
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Iff,
    Le,
    LinearTerm,
    Mod,
    Not,
    Or,
    Term,
    free_vars,
    numeral,
    plus,
)

VARIABLES = ("x", "y", "z")
MAX_COEFF = 4
MAX_MODULUS = 6


@dataclass(frozen=True)
class CorpusConfig:
    max_coeff: int = MAX_COEFF
    max_modulus: int = MAX_MODULUS
    max_const: int = 3
    max_guard_const: int = 6


class FormulaGenerator:
    def __init__(self, seed: int, config: CorpusConfig | None = None):
        self.rng = random.Random(seed)
        self.cfg = config or CorpusConfig()

    def term(self, names: list[str]) -> Term:
        rng = self.rng
        k = rng.choice((0, 1, 1, 2)) if names else 0
        coeffs: dict[str, int] = {}
        for v in rng.sample(names, min(k, len(names))):
            coeffs[v] = rng.randint(1, self.cfg.max_coeff)
        const = rng.randint(0, self.cfg.max_const) if rng.random() < 0.5 or not coeffs else 0
        return LinearTerm.make(coeffs, const).to_term()

    def atom(self, names: list[str], must: str | None = None) -> Formula:
        rng = self.rng
        l, r = self.term(names), self.term(names)
        if must is not None:
            k = rng.randint(1, self.cfg.max_coeff)
            mv = LinearTerm.make({must: k}).to_term()
            if rng.random() < 0.5:
                l = plus(mv, l) if l != numeral(0) else mv
            else:
                r = plus(mv, r) if r != numeral(0) else mv
        kind = rng.random()
        if kind < 0.35:
            return Eq(l, r)
        if kind < 0.75:
            return Le(l, r)
        return Mod(rng.randint(2, self.cfg.max_modulus), l, r)

    def qf(self, names: list[str], size: int, must: str | None = None) -> Formula:
        rng = self.rng
        if size <= 1:
            a = self.atom(names, must)
            return Not(a) if rng.random() < 0.25 else a
        left = rng.randint(1, size - 1)
        a = self.qf(names, left, must)
        b = self.qf(names, size - left)
        op = rng.random()
        if op < 0.45:
            return And(a, b)
        if op < 0.8:
            return Or(a, b)
        if op < 0.93:
            return Implies(a, b)
        return Iff(a, b)

    def guard_term(self, free: list[str]) -> Term:
        rng = self.rng
        c = rng.randint(0, self.cfg.max_guard_const)
        if free and rng.random() < 0.6:
            return plus(LinearTerm.make({rng.choice(free): 1}).to_term(), numeral(c)) if c else LinearTerm.make(
                {rng.choice(free): 1}
            ).to_term()
        return numeral(c)

    def quantified(self, v: str, names: list[str], body: Formula, guarded: bool) -> Formula:
        rng = self.rng
        ex = rng.random() < 0.5
        if guarded:
            g = Le(LinearTerm.make({v: 1}).to_term(), self.guard_term([n for n in names if n != v]))
            return Exists(v, And(g, body)) if ex else Forall(v, Implies(g, body))
        return Exists(v, body) if ex else Forall(v, body)

    def formula(self) -> Formula:
        rng = self.rng
        shape = rng.random()
        names = list(VARIABLES)
        if shape < 0.1:
            return self.qf(names, rng.randint(1, 3))
        if shape < 0.45:
            v = rng.choice(names)
            guarded = rng.random() < 0.4
            return self.quantified(v, names, self.qf(names, rng.randint(1, 3), must=v), guarded)
        if shape < 0.75:
            # nested: outer guard-bounded, inner either kind over one literal
            v, w = rng.sample(names, 2)
            inner = self.quantified(w, names, self.qf(names, 1, must=w), rng.random() < 0.5)
            body = inner if rng.random() < 0.6 else And(inner, self.qf(names, 1, must=v))
            return self.quantified(v, names, body, guarded=True)
        v, w = rng.sample(names, 2)
        a = self.quantified(v, names, self.qf(names, rng.randint(1, 2), must=v), rng.random() < 0.4)
        b = self.quantified(w, names, self.qf(names, rng.randint(1, 2), must=w), rng.random() < 0.4)
        return Or(a, b) if rng.random() < 0.5 else And(a, b)


def random_corpus(count: int, seed: int = 0, config: CorpusConfig | None = None) -> list[Formula]:
    gen = FormulaGenerator(seed, config)
    return [gen.formula() for _ in range(count)]


def grid_variables(f: Formula) -> list[str]:
    return sorted(free_vars(f))
