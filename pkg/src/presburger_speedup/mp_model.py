"""The nonstandard models M_p of PrA^-.

The carrier of M_p is the naturals together with the polynomials
a1*X + a0, where X is a new infinite element, a0 is any integer and a1 is
a positive rational whose denominator only has prime factors below p.
Addition is componentwise.  M_p satisfies x =_m 0 | ... | x =_m m-1 for
every m whose prime factors are below p, but X is not divisible with
remainder by p: (X - r)/p would need the coefficient 1/p.

Only literal-level facts are computed here; quantified satisfaction in
M_p is not searched.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import sympy

from .logic import (
    Add,
    Eq,
    Formula,
    Le,
    Mod,
    Mul,
    Not,
    Num,
    One,
    Scale,
    Term,
    Var,
    Zero,
)


@dataclass(frozen=True)
class RestrictedRational:
    """Positive rational q / (p0^r0 ... pt^rt), kept in lowest terms."""

    numerator: int
    factors: tuple[tuple[int, int], ...]  # (prime, exponent), sorted

    @classmethod
    def of(cls, value: Fraction | int, p: int) -> RestrictedRational:
        value = Fraction(value)
        if value <= 0:
            raise ValueError(f"coefficient must be positive, got {value}")
        factors = tuple(sorted(sympy.factorint(value.denominator).items()))
        bad = [q for q, _ in factors if q >= p]
        if bad:
            raise ValueError(f"denominator prime {bad[0]} is not below {p}")
        return cls(value.numerator, factors)

    @property
    def denominator(self) -> int:
        d = 1
        for q, e in self.factors:
            d *= q**e
        return d

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        if not self.factors:
            return str(self.numerator)
        den = "*".join(f"{q}^{e}" if e > 1 else str(q) for q, e in self.factors)
        return f"{self.numerator}/{den}"


@dataclass(frozen=True)
class Nat:
    value: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("naturals are >= 0")

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Poly:
    a1: RestrictedRational
    a0: int

    def __str__(self) -> str:
        lead = "X" if self.a1.value == 1 else f"{self.a1} X"
        if self.a0 == 0:
            return lead
        return f"{lead} + {self.a0}" if self.a0 > 0 else f"{lead} - {-self.a0}"


MpElem = Union[Nat, Poly]


class Mp:
    """Model handle: carries only the parameter p."""

    def __init__(self, p: int):
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __repr__(self) -> str:
        return f"Mp({self.p})"

    # construction
    def nat(self, n: int) -> Nat:
        return Nat(n)

    def poly(self, a1: Fraction | int, a0: int = 0) -> Poly:
        return Poly(RestrictedRational.of(a1, self.p), a0)

    @property
    def X(self) -> Poly:
        return self.poly(1, 0)

    def check(self, e: MpElem) -> MpElem:
        if isinstance(e, Poly):
            if any(q >= self.p for q, _ in e.a1.factors):
                raise ValueError(f"{e} is not an element of M_{self.p}")
        elif not isinstance(e, Nat):
            raise TypeError(f"not an element: {e!r}")
        return e

    # arithmetic
    def add(self, e1: MpElem, e2: MpElem) -> MpElem:
        match e1, e2:
            case Nat(a), Nat(b):
                return Nat(a + b)
            case (Nat(a), Poly(c, d)) | (Poly(c, d), Nat(a)):
                return Poly(c, d + a)
            case Poly(c1, d1), Poly(c2, d2):
                return self.poly(c1.value + c2.value, d1 + d2)
        raise TypeError(f"cannot add {e1!r} and {e2!r}")

    def times(self, k: int, e: MpElem) -> MpElem:
        """k-fold sum e + ... + e (Nat(0) for k = 0)."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0:
            return Nat(0)
        if isinstance(e, Nat):
            return Nat(k * e.value)
        return self.poly(k * e.a1.value, k * e.a0)

    def difference(self, t: MpElem, s: MpElem) -> MpElem | None:
        """The z with s + z = t, if it is in the model."""
        match s, t:
            case Nat(a), Nat(b):
                return Nat(b - a) if b >= a else None
            case Nat(a), Poly(c, d):
                return Poly(c, d - a)
            case Poly(), Nat():
                return None
            case Poly(c1, d1), Poly(c2, d2):
                if c1.value < c2.value:
                    return self.poly(c2.value - c1.value, d2 - d1)
                if c1.value == c2.value and d1 <= d2:
                    return Nat(d2 - d1)
                return None
        raise TypeError(f"cannot subtract {s!r} from {t!r}")

    def leq(self, e1: MpElem, e2: MpElem) -> bool:
        """e1 <= e2, i.e. E z. e1 + z = e2."""
        return self.difference(e2, e1) is not None

    def solve_linear(self, m: int, s: MpElem, t: MpElem) -> MpElem | None:
        """The z with z + ... + z (m times) + s = t, if it exists."""
        if m < 1:
            raise ValueError("m must be >= 1")
        d = self.difference(t, s)
        match d:
            case None:
                return None
            case Nat(v):
                return Nat(v // m) if v % m == 0 else None
            case Poly(c, a0):
                if a0 % m:
                    return None
                q = c.value / m
                if any(f >= self.p for f in sympy.primefactors(q.denominator)):
                    return None
                return self.poly(q, a0 // m)
        raise AssertionError("unreachable")

    def modeq(self, m: int, x: MpElem, s: MpElem) -> bool:
        """x =_m s: E z. (z+...+z + s = x | z+...+z + x = s)."""
        return self.solve_linear(m, s, x) is not None or self.solve_linear(m, x, s) is not None

    def divisible_with_remainder(self, x: MpElem, m: int) -> int | None:
        """The r in 0..m-1 with x = m*b + r for some b in the model, if any."""
        hits = [r for r in range(m) if self.solve_linear(m, Nat(r), x) is not None]
        if len(hits) > 1:
            raise AssertionError(f"remainders of {x} by {m} are not unique: {hits}")
        return hits[0] if hits else None

    # literals
    def eval_term(self, t: Term, env: Mapping[str, MpElem]) -> MpElem:
        match t:
            case Zero():
                return Nat(0)
            case One():
                return Nat(1)
            case Num(k):
                return Nat(k)
            case Var(name):
                if name not in env:
                    raise ValueError(f"unbound variable {name}")
                return self.check(env[name])
            case Add(l, r):
                return self.add(self.eval_term(l, env), self.eval_term(r, env))
            case Scale(k, s):
                return self.times(k, self.eval_term(s, env))
            case Mul():
                raise ValueError("multiplication is not in the signature of M_p")
        raise TypeError(f"not a term: {t!r}")

    def eval_literal(self, lit: Formula, env: Mapping[str, MpElem]) -> bool:
        match lit:
            case Not(a):
                return not self.eval_literal(a, env)
            case Eq(l, r):
                return self.eval_term(l, env) == self.eval_term(r, env)
            case Le(l, r):
                return self.leq(self.eval_term(l, env), self.eval_term(r, env))
            case Mod(m, l, r):
                return self.modeq(m, self.eval_term(l, env), self.eval_term(r, env))
        raise ValueError("only atoms and negated atoms can be evaluated in M_p")

    # sampling
    def sample(self, rng: random.Random, max_nat: int = 60) -> MpElem:
        if rng.random() < 0.3:
            return Nat(rng.randint(0, max_nat))
        small = list(sympy.primerange(2, self.p))
        den = 1
        for q in small:
            den *= q ** rng.choice((0, 0, 1, 2))
        return self.poly(Fraction(rng.randint(1, 40), den), rng.randint(-max_nat, max_nat))


# ------------------------------------------------------------ text syntax

_POLY = re.compile(
    r"^\s*(?:(?P<num>\d+)(?:\s*/\s*(?P<den>[\d^*\s]+?))?\s*(?:\*\s*)?)?X\s*"
    r"(?:(?P<sign>[+-])\s*(?P<a0>-?\d+))?\s*$"
)


def _factorization(text: str) -> int:
    d = 1
    for part in text.split("*"):
        part = part.strip()
        base, _, exp = part.partition("^")
        d *= int(base) ** (int(exp) if exp else 1)
    return d


def parse_elem(text: str, model: Mp) -> MpElem:
    """`n` for a natural, `q/d X + a0` for a polynomial (d may be `3^2*7`)."""
    s = text.strip()
    if re.fullmatch(r"\d+", s):
        return Nat(int(s))
    m = _POLY.match(s)
    if not m:
        raise ValueError(f"cannot read element {text!r}")
    num = int(m["num"]) if m["num"] else 1
    den = _factorization(m["den"]) if m["den"] else 1
    a0 = int(m["a0"]) if m["a0"] else 0
    if m["sign"] == "-":
        a0 = -a0
    return model.poly(Fraction(num, den), a0)


@dataclass
class AxiomCheck:
    p: int
    m: int
    samples: int
    complete: int  # elements with exactly one residue
    missing: list[MpElem]

    @property
    def holds(self) -> bool:
        return not self.missing


def check_residue_axiom(p: int, m: int, samples: int, seed: int = 0) -> AxiomCheck:
    """Sampled check of A x. (x =_m 0 | ... | x =_m m-1) in M_p, with uniqueness."""
    model = Mp(p)
    rng = random.Random(seed)
    pool = [model.X] + [model.sample(rng) for _ in range(samples - 1)]
    missing: list[MpElem] = []
    complete = 0
    for x in pool:
        hits = [r for r in range(m) if model.modeq(m, x, Nat(r))]
        if len(hits) > 1:
            raise AssertionError(f"{x} has several residues mod {m}: {hits}")
        if hits:
            complete += 1
        else:
            missing.append(x)
    return AxiomCheck(p, m, len(pool), complete, missing)


__all__ = [
    "AxiomCheck",
    "Mp",
    "MpElem",
    "Nat",
    "Poly",
    "RestrictedRational",
    "check_residue_axiom",
    "parse_elem",
]
