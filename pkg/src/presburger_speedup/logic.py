"""Terms, formulas and the basic syntactic operations over them.

The language is (0, 1, +) extended by the relations <= and =_m, plus
multiplication for the real-closed-field families.  Every node is an
immutable value; structural equality is the dataclass equality.

Two compact sugar nodes exist so that large numerals and k-fold sums do
not have to be materialized:

* ``Num(k)`` for k >= 2 stands for the right-nested sum 1+(1+...+1);
* ``Scale(k, t)`` for k >= 2 stands for the k-fold sum t+(t+...+t).

``size`` charges them at their expanded cost.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from math import lcm
from typing import Callable, Iterable, Iterator, Mapping

IDENT_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


class BudgetExceeded(RuntimeError):
    """A construction grew past its configured node budget."""


class _Node:
    """Mixin caching the structural hash; formulas get hashed a lot."""

    __slots__ = ()

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self._fields()))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def _fields(cls) -> tuple[str, ...]:
        return tuple(cls.__dataclass_fields__)


# ---------------------------------------------------------------- terms


class Term(_Node):
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Zero(Term):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class One(Term):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str

    __hash__ = _Node.__hash__

    def __post_init__(self) -> None:
        if not IDENT_RE.match(self.name):
            raise ValueError(f"bad identifier {self.name!r}")


@dataclass(frozen=True, eq=True)
class Num(Term):
    """Numeral k >= 2 (sugar for the k-fold sum of 1)."""

    value: int

    __hash__ = _Node.__hash__

    def __post_init__(self) -> None:
        if self.value < 2:
            raise ValueError("Num holds numerals >= 2; use Zero/One or numeral()")


@dataclass(frozen=True, eq=True)
class Add(Term):
    left: Term
    right: Term

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Scale(Term):
    """k-fold sum of a term, k >= 2."""

    k: int
    term: Term

    __hash__ = _Node.__hash__

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("Scale needs k >= 2; use scale()")


@dataclass(frozen=True, eq=True)
class Mul(Term):
    """Field multiplication; only legal in RCF formulas."""

    left: Term
    right: Term

    __hash__ = _Node.__hash__


ZERO = Zero()
ONE = One()


def numeral(k: int) -> Term:
    if k < 0:
        raise ValueError("numerals are natural numbers")
    if k == 0:
        return ZERO
    if k == 1:
        return ONE
    return Num(k)


def scale(k: int, t: Term) -> Term:
    if k < 0:
        raise ValueError("scale factor must be natural")
    if k == 0:
        return ZERO
    if k == 1:
        return t
    return Scale(k, t)


def var(name: str) -> Var:
    return Var(name)


def plus(*terms: Term) -> Term:
    """Left-nested sum of the given terms (0 for no terms)."""
    if not terms:
        return ZERO
    out = terms[0]
    for t in terms[1:]:
        out = Add(out, t)
    return out


# ------------------------------------------------------------- formulas


class Formula(_Node):
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Eq(Formula):
    left: Term
    right: Term

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Le(Formula):
    left: Term
    right: Term

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Mod(Formula):
    """left =_m right, i.e. m divides the difference of the two sides."""

    m: int
    left: Term
    right: Term

    __hash__ = _Node.__hash__

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("modulus must be >= 1")


@dataclass(frozen=True, eq=True)
class Rel(Formula):
    """Occurrence of an uninterpreted relation symbol (template holes)."""

    name: str
    args: tuple[Term, ...]

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Not(Formula):
    arg: Formula

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Implies(Formula):
    left: Formula
    right: Formula

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Iff(Formula):
    left: Formula
    right: Formula

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Exists(Formula):
    var: str
    body: Formula

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Forall(Formula):
    var: str
    body: Formula

    __hash__ = _Node.__hash__


ATOMS = (Eq, Le, Mod, Rel)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Exists, Forall)

TRUE: Formula = Eq(ZERO, ZERO)
FALSE: Formula = Eq(ZERO, ONE)


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is 0 = 0."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is 0 = 1."""
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def exists(names: Iterable[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def forall(names: Iterable[str], body: Formula) -> Formula:
    for n in reversed(list(names)):
        body = Forall(n, body)
    return body


def lt(t: Term, u: Term) -> Formula:
    """t < u over the naturals, as t+1 <= u."""
    return Le(Add(t, ONE), u)


def neq(t: Term, u: Term) -> Formula:
    return Not(Eq(t, u))


def flatten(f: Formula, kind: type) -> list[Formula]:
    """Operands of a nested And/Or chain, left to right."""
    out: list[Formula] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, kind):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


# ------------------------------------------------------- traversal utils


def term_vars(t: Term) -> frozenset[str]:
    return _term_vars(t)


@lru_cache(maxsize=200_000)
def _term_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Add(l, r) | Mul(l, r):
            return _term_vars(l) | _term_vars(r)
        case Scale(_, s):
            return _term_vars(s)
        case _:
            return frozenset()


def atom_terms(f: Formula) -> tuple[Term, ...]:
    match f:
        case Eq(l, r) | Le(l, r) | Mod(_, l, r):
            return (l, r)
        case Rel(_, args):
            return args
    raise TypeError(f"not an atom: {f!r}")


@lru_cache(maxsize=200_000)
def free_vars(f: Formula) -> frozenset[str]:
    match f:
        case Eq() | Le() | Mod() | Rel():
            out: frozenset[str] = frozenset()
            for t in atom_terms(f):
                out |= _term_vars(t)
            return out
        case Not(a):
            return free_vars(a)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return free_vars(l) | free_vars(r)
        case Exists(v, b) | Forall(v, b):
            return free_vars(b) - {v}
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> set[str]:
    """Free and bound variable names occurring anywhere in f."""
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, QUANTIFIERS):
            out.add(g.var)
        elif isinstance(g, ATOMS):
            for t in atom_terms(g):
                out |= _term_vars(t)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        match g:
            case Not(a):
                stack.append(a)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                stack.append(r)
                stack.append(l)
            case Exists(_, b) | Forall(_, b):
                stack.append(b)


@lru_cache(maxsize=200_000)
def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, QUANTIFIERS) for g in subformulas(f))


def count_rel(f: Formula, name: str | None = None) -> int:
    return sum(1 for g in subformulas(f) if isinstance(g, Rel) and (name is None or g.name == name))


def moduli(f: Formula) -> list[int]:
    return [g.m for g in subformulas(f) if isinstance(g, Mod)]


def has_mul(f: Formula) -> bool:
    def term_has(t: Term) -> bool:
        match t:
            case Mul():
                return True
            case Add(l, r):
                return term_has(l) or term_has(r)
            case Scale(_, s):
                return term_has(s)
        return False

    return any(
        isinstance(g, ATOMS) and any(term_has(t) for t in atom_terms(g)) for g in subformulas(f)
    )


def map_atoms(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild f with every atom replaced by fn(atom); binders untouched."""
    match f:
        case Eq() | Le() | Mod() | Rel():
            return fn(f)
        case Not(a):
            return Not(map_atoms(a, fn))
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return type(f)(map_atoms(l, fn), map_atoms(r, fn))
        case Exists(v, b) | Forall(v, b):
            return type(f)(v, map_atoms(b, fn))
    raise TypeError(f"not a formula: {f!r}")


# -------------------------------------------------------- linear terms


@dataclass(frozen=True)
class LinearTerm:
    """Sum of coeff*var plus a constant, coefficients strictly positive.

    ``coeffs`` is kept sorted by variable name so equal linear terms are
    equal values.
    """

    coeffs: tuple[tuple[str, int], ...] = ()
    constant: int = 0

    def __post_init__(self) -> None:
        if any(c <= 0 for _, c in self.coeffs):
            raise ValueError("stored coefficients must be positive")
        if self.constant < 0:
            raise ValueError("constant must be natural")

    @classmethod
    def make(cls, coeffs: Mapping[str, int], constant: int = 0) -> LinearTerm:
        return cls(tuple(sorted((v, c) for v, c in coeffs.items() if c)), constant)

    @property
    def as_dict(self) -> dict[str, int]:
        return dict(self.coeffs)

    def coeff(self, v: str) -> int:
        for name, c in self.coeffs:
            if name == v:
                return c
        return 0

    def variables(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    def __add__(self, other: LinearTerm) -> LinearTerm:
        d = self.as_dict
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return LinearTerm.make(d, self.constant + other.constant)

    def times(self, k: int) -> LinearTerm:
        if k < 0:
            raise ValueError("negative factor")
        return LinearTerm.make({v: c * k for v, c in self.coeffs}, self.constant * k)

    def without(self, v: str) -> LinearTerm:
        return LinearTerm(tuple((n, c) for n, c in self.coeffs if n != v), self.constant)

    def minus_common(self, other: LinearTerm) -> tuple[LinearTerm, LinearTerm]:
        """Cancel everything the two sides share."""
        a, b = self.as_dict, other.as_dict
        for v in set(a) & set(b):
            m = min(a[v], b[v])
            a[v] -= m
            b[v] -= m
        m = min(self.constant, other.constant)
        return (
            LinearTerm.make(a, self.constant - m),
            LinearTerm.make(b, other.constant - m),
        )

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.constant + sum(c * env[v] for v, c in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def to_term(self) -> Term:
        parts = [scale(c, Var(v)) for v, c in self.coeffs]
        if self.constant or not parts:
            parts.append(numeral(self.constant))
        return plus(*parts)


def linearize(t: Term) -> LinearTerm:
    """Collect a (0,1,+) term into coefficient form."""
    return _linearize(t)


@lru_cache(maxsize=200_000)
def _linearize(t: Term) -> LinearTerm:
    match t:
        case Zero():
            return LinearTerm()
        case One():
            return LinearTerm((), 1)
        case Num(k):
            return LinearTerm((), k)
        case Var(name):
            return LinearTerm(((name, 1),), 0)
        case Add(l, r):
            return _linearize(l) + _linearize(r)
        case Scale(k, s):
            return _linearize(s).times(k)
        case Mul():
            raise ValueError("multiplication is not a Presburger term")
    raise TypeError(f"not a term: {t!r}")


def eval_term(t: Term, env: Mapping[str, int]) -> int:
    """Value over the naturals (Mul is ordinary multiplication)."""
    match t:
        case Zero():
            return 0
        case One():
            return 1
        case Num(k):
            return k
        case Var(name):
            return env[name]
        case Add(l, r):
            return eval_term(l, env) + eval_term(r, env)
        case Scale(k, s):
            return k * eval_term(s, env)
        case Mul(l, r):
            return eval_term(l, env) * eval_term(r, env)
    raise TypeError(f"not a term: {t!r}")


# -------------------------------------------------------- substitution


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """First of base, base1, base2, ... (trailing digits of base dropped) not in avoid."""
    avoid = set(avoid)
    stem = base.rstrip("0123456789") or base
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    match t:
        case Var(name):
            return mapping.get(name, t)
        case Add(l, r):
            return Add(subst_term(l, mapping), subst_term(r, mapping))
        case Mul(l, r):
            return Mul(subst_term(l, mapping), subst_term(r, mapping))
        case Scale(k, s):
            return Scale(k, subst_term(s, mapping))
    return t


def substitute(f: Formula, v: str, t: Term) -> Formula:
    """Capture-avoiding f[v := t]."""
    return substitute_many(f, {v: t})


def substitute_many(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution."""
    return _subst(f, tuple(sorted(mapping.items(), key=lambda kv: kv[0])))


@lru_cache(maxsize=50_000)
def _subst(f: Formula, items: tuple[tuple[str, Term], ...]) -> Formula:
    fv = free_vars(f)
    items = tuple((v, t) for v, t in items if v in fv)
    if not items:
        return f
    mapping = dict(items)
    match f:
        case Eq(l, r):
            return Eq(subst_term(l, mapping), subst_term(r, mapping))
        case Le(l, r):
            return Le(subst_term(l, mapping), subst_term(r, mapping))
        case Mod(m, l, r):
            return Mod(m, subst_term(l, mapping), subst_term(r, mapping))
        case Rel(name, args):
            return Rel(name, tuple(subst_term(a, mapping) for a in args))
        case Not(a):
            return Not(_subst(a, items))
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return type(f)(_subst(l, items), _subst(r, items))
        case Exists(v, b) | Forall(v, b):
            incoming: set[str] = set()
            for _, t in items:
                incoming |= _term_vars(t)
            if v in incoming:
                nv = fresh_name(v, incoming | free_vars(b) | set(mapping))
                b = _subst(b, ((v, Var(nv)),))
                v = nv
            return type(f)(v, _subst(b, items))
    raise TypeError(f"not a formula: {f!r}")


def replace_rel(f: Formula, name: str, fn: Callable[[tuple[Term, ...]], Formula]) -> Formula:
    """Replace each occurrence R(args) of relation `name` by fn(args).

    fn's result is inserted as-is, so callers must make sure its free
    variables are not captured (rename bound variables first).
    """

    def on_atom(a: Formula) -> Formula:
        if isinstance(a, Rel) and a.name == name:
            return fn(a.args)
        return a

    return map_atoms(f, on_atom)


def rename_bound_apart(f: Formula, avoid: Iterable[str]) -> Formula:
    """Rename every binder of f whose name is in `avoid` (or reused) to a fresh name."""
    taken = set(avoid) | all_vars(f)
    seen: set[str] = set()

    def go(g: Formula) -> Formula:
        match g:
            case Not(a):
                return Not(go(a))
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                return type(g)(go(l), go(r))
            case Exists(v, b) | Forall(v, b):
                if v in avoid or v in seen:
                    nv = fresh_name(v, taken)
                    taken.add(nv)
                    b = _subst(b, ((v, Var(nv)),))
                    v = nv
                seen.add(v)
                return type(g)(v, go(b))
        return g

    avoid = set(avoid)
    return go(f)


# ----------------------------------------------------------------- NNF


def nnf(f: Formula) -> Formula:
    """Negation normal form over the naturals.

    Negations end up on Eq/Mod/Rel atoms only; a negated t <= u becomes
    u+1 <= t; -> and <-> are expanded.
    """
    return _nnf(f, False)


@lru_cache(maxsize=100_000)
def _nnf(f: Formula, neg: bool) -> Formula:
    match f:
        case Le(l, r):
            return Le(Add(r, ONE), l) if neg else f
        case Eq() | Mod() | Rel():
            return Not(f) if neg else f
        case Not(a):
            return _nnf(a, not neg)
        case And(l, r):
            return (Or if neg else And)(_nnf(l, neg), _nnf(r, neg))
        case Or(l, r):
            return (And if neg else Or)(_nnf(l, neg), _nnf(r, neg))
        case Implies(l, r):
            if neg:
                return And(_nnf(l, False), _nnf(r, True))
            return Or(_nnf(l, True), _nnf(r, False))
        case Iff(l, r):
            if neg:
                return Or(And(_nnf(l, False), _nnf(r, True)), And(_nnf(l, True), _nnf(r, False)))
            return Or(And(_nnf(l, False), _nnf(r, False)), And(_nnf(l, True), _nnf(r, True)))
        case Exists(v, b):
            return Forall(v, _nnf(b, True)) if neg else Exists(v, _nnf(b, False))
        case Forall(v, b):
            return Exists(v, _nnf(b, True)) if neg else Forall(v, _nnf(b, False))
    raise TypeError(f"not a formula: {f!r}")


def is_literal(f: Formula) -> bool:
    return isinstance(f, ATOMS) or (isinstance(f, Not) and isinstance(f.arg, ATOMS))


# ---------------------------------------------------------------- size


# ------------------------------------------------ closed literal rules


def closed_literal_rules(f: Formula) -> tuple[bool, list[int]]:
    """Truth of a closed atom by structural recursion on numerals.

    Returns the truth value and the sequence of literal rules used
    (numbering 1-13 of the closed-literal rule list: 1 ``0=0``,
    2 ``~0=x+1``, 3 ``~x+1=0``, 4 ``x+1=y+1 <-> x=y``, 5 ``0<=x``,
    6 ``~x+1<=0``, 7 ``x+1<=y+1 <-> x<=y``, 8 ``0 != 1+...+1``,
    9 ``0=_m 0``, 10 ``~0=_m k``, 11 ``~k=_m 0`` for 1<=k<m,
    12 ``0=_m x+m <-> 0=_m x``, 13 ``x+1=_m y+1 <-> x=_m y``).
    Repeated applications of one rule are collapsed into one entry.
    """
    if free_vars(f):
        raise ValueError("closed literal expected")
    match f:
        case Eq(l, r):
            a, b = eval_term(l, {}), eval_term(r, {})
            rules = [4] if min(a, b) else []
            a, b = a - min(a, b), b - min(a, b)
            if a == b:
                return True, rules + [1]
            return False, rules + ([2] if a == 0 else [3])
        case Le(l, r):
            a, b = eval_term(l, {}), eval_term(r, {})
            rules = [7] if min(a, b) else []
            a, b = a - min(a, b), b - min(a, b)
            if a == 0:
                return True, rules + [5]
            return False, rules + [6]
        case Mod(m, l, r):
            a, b = eval_term(l, {}), eval_term(r, {})
            # rule 13 strips common successors; by symmetry of =_m the
            # literal is then read as 0 =_m k and reduced by rule 12
            rules = [13]
            k = abs(a - b)
            if k >= m:
                rules.append(12)
                k %= m
            return (True, rules + [9]) if k == 0 else (False, rules + [10])
    raise TypeError(f"not an atom: {f!r}")



@dataclass(frozen=True)
class SizeReport:
    paper_symbols: int
    node_count: int
    rendered_len: int


def term_symbols(t: Term) -> int:
    """Symbols of the fully expanded term (numeral k costs 2k-1)."""
    match t:
        case Zero() | One() | Var():
            return 1
        case Num(k):
            return 2 * k - 1
        case Add(l, r) | Mul(l, r):
            return term_symbols(l) + term_symbols(r) + 1
        case Scale(k, s):
            return k * term_symbols(s) + (k - 1)
    raise TypeError(f"not a term: {t!r}")


def term_nodes(t: Term) -> int:
    match t:
        case Add(l, r) | Mul(l, r):
            return 1 + term_nodes(l) + term_nodes(r)
        case Scale(_, s):
            return 1 + term_nodes(s)
    return 1


def mod_symbols(m: int, left_symbols: int, right_symbols: int) -> int:
    """Symbols of E z (z+...+z + s = x | z+...+z + x = s), m copies of z."""
    # quantifier 2, disjunction 1, each disjunct: m z's, m-1 plus, plus, =, both sides
    return 2 + 1 + 2 * (2 * m + 1) + 2 * (left_symbols + right_symbols)


def le_symbols(left_symbols: int, right_symbols: int, rcf: bool = False) -> int:
    """E z t+z=u (PrA) or E z t+z*z=u (RCF)."""
    return left_symbols + right_symbols + (7 if rcf else 5)


def paper_symbols(f: Formula, rcf: bool = False) -> int:
    """Symbol count of f with every piece of sugar expanded, never materialized."""
    total = 0
    stack = [f]
    while stack:
        g = stack.pop()
        match g:
            case Eq(l, r):
                total += term_symbols(l) + term_symbols(r) + 1
            case Le(l, r):
                total += le_symbols(term_symbols(l), term_symbols(r), rcf)
            case Mod(m, l, r):
                total += mod_symbols(m, term_symbols(l), term_symbols(r))
            case Rel(_, args):
                total += 1 + sum(term_symbols(a) for a in args)
            case Not(a):
                total += 1
                stack.append(a)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                total += 1
                stack.append(l)
                stack.append(r)
            case Exists(_, b) | Forall(_, b):
                total += 2
                stack.append(b)
    return total


def node_count(f: Formula) -> int:
    total = 0
    stack = [f]
    while stack:
        g = stack.pop()
        total += 1
        match g:
            case Eq(l, r) | Le(l, r) | Mod(_, l, r):
                total += term_nodes(l) + term_nodes(r)
            case Rel(_, args):
                total += sum(term_nodes(a) for a in args)
            case Not(a):
                stack.append(a)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                stack.append(l)
                stack.append(r)
            case Exists(_, b) | Forall(_, b):
                stack.append(b)
    return total


def size(f: Formula, rcf: bool = False) -> SizeReport:
    from .grammar import render

    return SizeReport(
        paper_symbols=paper_symbols(f, rcf),
        node_count=node_count(f),
        rendered_len=len(render(f).encode("utf-8")),
    )


def lcm_all(values: Iterable[int]) -> int:
    return lcm(1, *values)
